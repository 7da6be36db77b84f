// Subcommands of the `naqtur` tool. Each returns a process exit status and writes
// human-readable progress to `out` and diagnostics to `err`.

#pragma once

#include "naqtur/config.hpp"
#include "naqtur/verify.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>

namespace naqtur {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // a verification check or bound violation failed
  kExitUsage = 2,
  kExitIo = 3,
};

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);

struct SimulateOptions {
  std::optional<std::string> config_path;
  ConfigEntries overrides;  // applied after the config file
  std::optional<std::uint64_t> seed;
  std::optional<std::string> env_seed;  // value of NAQTUR_SEED, if set
  std::string out_dir = ".";
};

// Writes the records CSV and summary JSON; exit 1 if any unflagged record violates
// the bound chain.
int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);

struct BoundOptions {
  std::string input;
  std::string output;  // default: <input stem>.bound.csv next to the input
  int quadrature_order = kDefaultQuadratureOrder;
};

// Appends bound_B, s_simple, F_of_s and range_residual to each row of a CSV holding
// dq_1..dq_m, V_ij and Vp_ij (i <= j, m <= 9). Malformed rows are skipped.
int cmd_bound(const BoundOptions& options, std::ostream& out, std::ostream& err);

struct ReportOptions {
  std::string input;
  std::string out_dir = ".";
  int n_bins = 25;
  int inset_points = 200;
};

// Writes fig1.tsv, fig2.tsv, fig2_binned.tsv and inset.tsv.
int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err);

// Runs `body`, mapping UsageError/ValidationError to 2 and IoError to 3.
int run_guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace naqtur
