"""Matrix thermodynamic uncertainty bounds for qubit collision models."""

from ._core import (
    F_closed,
    G_of_D,
    IoError,
    bloch_state,
    bound_B,
    chi2_lambda,
    config_keys,
    derive_seed,
    f_of_D,
    g_inverse,
    gauss_legendre,
    hermitian_eig,
    kl_via_weights,
    matrix_tur_check,
    partial_trace,
    relative_entropy,
    verify,
    witness_bound_integral,
)
from . import _core

__version__ = "0.1.0"


def _entries(options):
    out = []
    for key, value in options.items():
        if isinstance(value, bool):
            value = "true" if value else "false"
        out.append((key, str(value)))
    return out


def simulate_one(seed, **config):
    """One collision record as a dict. Keyword arguments are config keys."""
    return _core._simulate_one(_entries(config), seed)


def run_experiment(**config):
    """Run a full experiment. Returns (records, csv_bytes)."""
    return _core._run_experiment(_entries(config))
