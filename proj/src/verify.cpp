#include "naqtur/verify.hpp"

#include "naqtur/collision.hpp"
#include "naqtur/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <unordered_set>

namespace naqtur {

namespace {

constexpr double kMaxBlochRadius = 0.95;

class Suite {
 public:
  explicit Suite(const VerifyOptions& opts) : opts_(opts) {}

  CheckResult& add(std::string module, std::string name, double residual, double tolerance,
                   std::string note = {}) {
    CheckResult c;
    c.module = std::move(module);
    c.name = std::move(name);
    c.residual = residual;
    c.tolerance = tolerance;
    c.passed = residual <= tolerance;
    c.note = std::move(note);
    results_.push_back(std::move(c));
    return results_.back();
  }

  // Deterministic per-check stream.
  Rng rng(std::uint64_t check) const { return Rng(derive_seed(opts_.seed, check)); }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  const VerifyOptions& opts_;
  std::vector<CheckResult> results_;
};

CMatrix random_hermitian(int d, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = cplx(g(rng), g(rng));
  return (a + a.adjoint()) / 2.0;
}

CMatrix random_matrix(int d, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = cplx(g(rng), g(rng));
  return a;
}

DensityMatrix random_density(int d, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  Eigen::VectorXd p(d);
  for (int i = 0; i < d; ++i) p(i) = e(rng);
  p /= p.sum();
  const CMatrix u = haar_unitary(d, rng).matrix();
  return DensityMatrix(u * p.cast<cplx>().asDiagonal() * u.adjoint());
}

DensityMatrix random_qubit(Rng& rng, double r_max = kMaxBlochRadius) {
  std::uniform_real_distribution<double> r(0.0, r_max);
  return bloch_state(r(rng), random_unit_vector(rng));
}

RMatrix random_spd(int m, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  RMatrix a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = g(rng);
  return a * a.transpose() + 0.05 * RMatrix::Identity(m, m);
}

RVector random_rvector(int m, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  RVector v(m);
  for (int i = 0; i < m; ++i) v(i) = g(rng);
  return v;
}

double spectral_norm(const RMatrix& a) {
  const RMatrix ata = a.transpose() * a;
  return std::sqrt(std::max(0.0, symmetric_eig(ata).eigenvalues.maxCoeff()));
}

void qcore_checks(Suite& suite, const VerifyOptions& opts) {
  {
    Rng rng = suite.rng(1);
    double worst = 0.0;
    for (int d : {2, 4}) {
      for (int i = 0; i < opts.samples; ++i) {
        const CMatrix h = random_hermitian(d, rng);
        const double err = frobenius_norm(hermitian_eig(h).reconstruct() - h) / frobenius_norm(h);
        worst = std::max(worst, err);
      }
    }
    suite.add("qcore", "eig_reconstruction", worst, 1e-10, "relative Frobenius error, dims 2 and 4");
  }
  {
    Rng rng = suite.rng(2);
    std::uniform_real_distribution<double> spectrum(-5.0, 5.0);
    double worst = 0.0;
    for (int d : {2, 4}) {
      for (int i = 0; i < opts.samples; ++i) {
        Eigen::VectorXd w(d);
        for (int k = 0; k < d; ++k) w(k) = spectrum(rng);
        const CMatrix u = haar_unitary(d, rng).matrix();
        const CMatrix h = u * w.cast<cplx>().asDiagonal() * u.adjoint();
        const CMatrix e = exp_spectral(HermitianOperator(h)).matrix();
        const double z = real_trace(e);
        const CMatrix back = matrix_log_psd(DensityMatrix(e / z)).matrix() + std::log(z) * identity(d);
        worst = std::max(worst, frobenius_norm(back - h));
      }
    }
    suite.add("qcore", "log_exp_round_trip", worst, 1e-8);
  }
  {
    Rng rng = suite.rng(3);
    double worst = 0.0;
    for (int i = 0; i < opts.samples; ++i) {
      const CMatrix a = random_matrix(2, rng);
      const CMatrix b = random_matrix(2, rng);
      const CMatrix ab = tensor(a, b);
      const double scale = frobenius_norm(a) * frobenius_norm(b);
      worst = std::max(worst, frobenius_norm(partial_trace(ab, 2, 2, Subsystem::A) - a * b.trace()) / scale);
      worst = std::max(worst, frobenius_norm(partial_trace(ab, 2, 2, Subsystem::B) - b * a.trace()) / scale);
    }
    suite.add("qcore", "partial_trace_of_tensor", worst, 1e-12);
  }
  {
    Rng rng = suite.rng(4);
    int failures = 0;
    for (int i = 0; i < opts.samples; ++i) {
      const DensityMatrix rho = random_density(4, rng);
      try {
        (void)partial_trace(rho, 2, 2, Subsystem::A);
        (void)partial_trace(rho, 2, 2, Subsystem::B);
      } catch (const ValidationError&) {
        ++failures;
      }
    }
    suite.add("qcore", "partial_trace_is_state", failures, 0, "reductions failing density validation");
  }
  {
    Rng a = suite.rng(5), b = suite.rng(5);
    double diff = 0.0;
    for (int i = 0; i < 20; ++i) {
      diff = std::max(diff, frobenius_norm(haar_unitary(4, a).matrix() - haar_unitary(4, b).matrix()));
      diff = std::max(diff, frobenius_norm(random_qubit(a).matrix() - random_qubit(b).matrix()));
    }
    suite.add("qcore", "seeded_replay", diff, 0.0);
  }
}

void divergence_checks(Suite& suite, const VerifyOptions& opts) {
  const int n = opts.quadrature_order;
  const QuadratureRule quad = gauss_legendre(n);
  const QuadratureRule quad2 = gauss_legendre(2 * n);
  {
    Rng rng = suite.rng(10);
    double worst_ratio = 0.0, worst_n = 0.0, worst_2n = 0.0;
    for (int i = 0; i < opts.samples; ++i) {
      const DensityMatrix rho = random_qubit(rng), sigma = random_qubit(rng);
      const double d = relative_entropy(rho, sigma);
      const double e1 = std::abs(d - f_divergence_via_weights(rho, sigma, WeightFunction::kl(), quad).value);
      const double e2 = std::abs(d - f_divergence_via_weights(rho, sigma, WeightFunction::kl(), quad2).value);
      worst_ratio = std::max(worst_ratio, e1 / kl_integral_tolerance(n, d));
      worst_n = std::max(worst_n, e1);
      worst_2n = std::max(worst_2n, e2);
    }
    suite.add("divergence", "kl_weight_integral", worst_ratio, 1.0,
              "error / tolerance; tolerance max(1e-8, 1e-6 D" + std::string(n < 64 ? ", 5 exp(-0.55 n))" : ")"));
    // Converged residuals sit at the roundoff floor and may jitter there.
    suite.add("divergence", "kl_residual_order_doubling", worst_2n - std::max(worst_n, 1e-13), 0.0,
              "worst residual at 2n minus worst residual at n");
  }
  {
    Rng rng = suite.rng(11);
    double worst = 0.0;
    for (int i = 0; i < opts.samples; ++i) {
      const DensityMatrix rho = random_qubit(rng), sigma = random_qubit(rng);
      const double petz = petz_f_divergence_spectral(rho, sigma, x_log_x);
      worst = std::max(worst, std::abs(petz - relative_entropy(rho, sigma)));
    }
    suite.add("divergence", "petz_spectral_matches_umegaki", worst, 1e-10);
  }
  {
    Rng rng = suite.rng(12);
    std::uniform_real_distribution<double> lam(0.01, 0.99);
    double worst = 0.0;
    for (int i = 0; i < opts.samples; ++i) {
      const DensityMatrix rho = random_qubit(rng), sigma = random_qubit(rng);
      const double l = lam(rng);
      const double a = chi2_lambda(rho, sigma, l).value;
      const double b = chi2_lambda(sigma, rho, 1.0 - l).value;
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
    suite.add("divergence", "chi2_swap_symmetry", worst, 1e-10);
  }
  {
    Rng rng = suite.rng(13);
    int failures = 0;
    for (int i = 0; i < opts.samples; ++i) {
      const DensityMatrix rho = random_qubit(rng), sigma = random_qubit(rng);
      if (chi2_lambda(rho, rho, 0.3).value > 1e-20) ++failures;
      if (frobenius_norm(rho.matrix() - sigma.matrix()) > 1e-12 && !(chi2_lambda(rho, sigma, 0.3).value > 0.0))
        ++failures;
    }
    suite.add("divergence", "chi2_zero_iff_equal", failures, 0);
  }
  {
    Rng rng = suite.rng(14);
    double worst = 0.0;
    for (int i = 0; i < opts.samples; ++i) {
      const DensityMatrix rho = random_qubit(rng), sigma = random_qubit(rng);
      const double via = f_divergence_via_weights(rho, sigma, WeightFunction::bures_hellinger(), quad).value;
      worst = std::max(worst, std::abs(via - hellinger_affinity(rho, sigma)));
    }
    suite.add("divergence", "bures_hellinger_weight_integral", worst, bures_hellinger_tolerance(opts.quadrature_order));
  }
}

void tur_checks(Suite& suite, const VerifyOptions& opts) {
  const int n = opts.quadrature_order;
  const QuadratureRule quad = gauss_legendre(n);
  {
    Rng rng = suite.rng(20);
    double worst = 0.0;
    for (int j = 0; j <= 60; ++j) {
      const double s = std::pow(10.0, -4.0 + 6.0 * j / 60.0);
      const RMatrix v = random_spd(2, rng);
      RVector dq = random_rvector(2, rng);
      dq *= std::sqrt(s / dq.dot(v.inverse() * dq));
      worst = std::max(worst, std::abs(bound_B(dq, v, v, quad).B - F_closed(s)));
    }
    suite.add("tur", "symmetric_covariance_collapse", worst, closed_form_tolerance(n), "s in [1e-4, 1e2]");
  }
  {
    double worst = 0.0;
    for (int j = 0; j <= 60; ++j) {
      const double s = std::pow(10.0, -4.0 + 3.0 * j / 60.0);
      worst = std::max(worst, std::abs(F_closed(s) - (s / 2 - s * s / 12)) / (s * s * s));
    }
    suite.add("tur", "small_s_expansion", worst, 0.02, "|F - (s/2 - s^2/12)| / s^3 for s <= 0.1");
  }
  {
    double worst = 0.0;
    for (int j = 0; j <= 70; ++j) {
      const double d = std::pow(10.0, -6.0 + 7.0 * j / 70.0);
      worst = std::max(worst, std::abs(F_closed(G_of_D(d)) - d));
    }
    suite.add("tur", "inverse_pair", worst, 1e-10, "D in [1e-6, 10]");
    const double spot = std::abs(G_of_D(2.0 * std::tanh(1.0)) - 4.0 * std::pow(std::sinh(1.0), 2));
    suite.add("tur", "G_spot_value", spot, 1e-9, "G(2 tanh 1) = 4 sinh^2 1");
  }
  {
    Rng rng = suite.rng(21);
    std::normal_distribution<double> g(0.0, 1.0);
    int mismatches = 0;
    for (int i = 0; i < opts.samples; ++i) {
      const int m = 2 + i % 2;
      const RMatrix v = random_spd(m, rng);
      const RVector dq = random_rvector(m, rng);
      const double s = dq.dot(v.inverse() * dq);
      const double d = F_closed(s * std::exp(g(rng)));
      const bool psd = matrix_tur_check(v, dq, d) >= -1e-10;
      const bool below = s <= G_of_D(d) + 1e-10;
      if (psd != below) ++mismatches;
    }
    suite.add("tur", "psd_equivalence", mismatches, 0, "sign disagreements");
  }
  {
    Rng rng = suite.rng(22);
    std::uniform_real_distribution<double> lam(0.01, 0.99);
    double worst = 0.0;
    for (int i = 0; i < opts.samples; ++i) {
      const RMatrix v = random_spd(2, rng), vp = random_spd(2, rng);
      const RVector dq = random_rvector(2, rng);
      const double l = lam(rng);
      const double s = s_lambda(dq, v, vp, l).s;
      const double target = s / (1.0 + l * (1.0 - l) * s);
      const RVector u = optimal_witness_direction(dq, v, vp, l);
      const double h = witness_h(u.dot(dq), u.dot(vp * u), u.dot(v * u), l);
      worst = std::max(worst, std::abs(h - target) / std::max(1.0, target));
    }
    suite.add("tur", "optimizer_attains_quotient", worst, 1e-10);
  }
  {
    Rng rng = suite.rng(23);
    double worst = 0.0;
    for (int i = 0; i < opts.samples; ++i) {
      const RMatrix v = random_spd(2, rng);
      const RVector dq = random_rvector(2, rng);
      const RVector u = v.inverse() * dq;
      worst = std::max(worst, std::abs(witness_bound_integral(u, dq, v, v, quad) - bound_B(dq, v, v, quad).B));
    }
    suite.add("tur", "witness_equality_symmetric", worst, 1e-10, "u = V^-1 dq with V' = V");
  }
  {
    DensityMatrix rho = bloch_state(0.6, Vec3::UnitY());
    const ChargeSet q = default_charges();
    const double err = std::abs(robertson_C(rho, q.charges[0], q.charges[1]) - 0.6);
    suite.add("tur", "robertson_constructed_case", err, 1e-12, "rho = (I + 0.6 sigma_y)/2");
  }
}

void collision_checks(Suite& suite, const VerifyOptions& opts) {
  const QuadratureRule quad = gauss_legendre(opts.quadrature_order);
  const int n = 2 * opts.samples;
  CollisionConfig cc;
  cc.system_mode = SystemMode::Mixed;
  cc.seed = opts.seed;

  double split = 0.0, sigma_gap = 0.0, bound_gap = -kInf, c_excess = -kInf, c_min = kInf;
  double witness_excess = -kInf;
  std::vector<CollisionRecord> records;
  records.reserve(static_cast<std::size_t>(n));
  Rng urng = suite.rng(30);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    CollisionRecord rec = simulate_one(cc, derive_seed(opts.seed, static_cast<std::uint64_t>(i)), quad);
    split = std::max(split, std::abs(rec.sigma - rec.mutual_info - rec.d_bath));
    sigma_gap = std::max(sigma_gap, rec.d_bath - rec.sigma);
    if (!rec.flagged()) bound_gap = std::max(bound_gap, rec.bound_B - rec.d_bath);
    c_excess = std::max(c_excess, rec.robertson_C);
    c_min = std::min(c_min, rec.robertson_C);
    if (!rec.flagged() && i < opts.samples) {
      for (int k = 0; k < 100; ++k) {
        RVector u(2);
        u << g(urng), g(urng);
        witness_excess =
            std::max(witness_excess, witness_bound_integral(u, rec.dq, rec.V, rec.Vp, quad) - rec.bound_B);
      }
    }
    records.push_back(std::move(rec));
  }
  const double bound_tol = opts.quadrature_order >= 64 ? 1e-9 : closed_form_tolerance(opts.quadrature_order);
  suite.add("collision", "split_identity", split, 1e-10, "|Sigma - I - D_bath|");
  suite.add("collision", "sigma_dominates_d_bath", sigma_gap, 1e-12, "D_bath - Sigma");
  suite.add("collision", "d_bath_dominates_bound", bound_gap, bound_tol, "B - D_bath, unflagged records");
  suite.add("collision", "robertson_range", std::max(c_excess - 1.0, -c_min), 1e-9, "C in [0, 1]");
  suite.add("tur", "witness_dominance", witness_excess, 1e-12, "witness integral - B, 100 directions");

  {
    Rng rng = suite.rng(31);
    double worst = 0.0, unit = 0.0;
    for (int i = 0; i < opts.samples; ++i) {
      const BathSample bath = sample_bath(cc, rng);
      const UnitaryOperator u = fixed_point_unitary(bath.rho, rng);
      const CMatrix rr = tensor(bath.rho.matrix(), bath.rho.matrix());
      worst = std::max(worst, frobenius_norm(u.matrix() * rr * u.matrix().adjoint() - rr));
      const UnitaryOperator full = compose_interaction(0.05 + 1.5 * (i % 7) / 7.0, u);
      unit = std::max(unit, frobenius_norm(full.matrix() * full.matrix().adjoint() - identity(4)));
    }
    suite.add("collision", "fixed_point_unitary", worst, 1e-12);
    suite.add("collision", "interaction_unitarity", unit, 1e-12);
  }
  {
    Rng rng = suite.rng(32);
    double worst = 0.0;
    const UnitaryOperator swap = partial_swap(std::numbers::pi / 2);
    for (int i = 0; i < opts.samples; ++i) {
      const DensityMatrix rho_e = random_qubit(rng), rho_s = random_qubit(rng);
      const CollisionOutput out = run_collision(rho_s, rho_e, swap);
      worst = std::max(worst, frobenius_norm(out.rho_E.matrix() - rho_s.matrix()));
    }
    suite.add("collision", "full_swap_limit", worst, 1e-12);
  }
  {
    auto median_drift = [&](SystemMode mode) {
      CollisionConfig c = cc;
      c.system_mode = mode;
      c.eps_min = c.eps_max = 1e-3;
      std::vector<double> drift;
      for (int i = 0; i < opts.samples; ++i)
        drift.push_back(simulate_one(c, derive_seed(opts.seed ^ 0x5a5aULL, static_cast<std::uint64_t>(i)), quad).cov_drift);
      return quantile(drift, 0.5);
    };
    const double ratio = median_drift(SystemMode::SmallIsospectral) / median_drift(SystemMode::HaarIsospectral);
    suite.add("collision", "near_fixed_point_drift_ratio", ratio, 0.1, "median drift, eps = 1e-3 vs Haar");
  }
  {
    CollisionConfig c = cc;
    c.system_mode = SystemMode::SmallIsospectral;
    c.eps_max = 0.1;
    double worst = 0.0;
    for (int i = 0; i < 2 * opts.samples; ++i) {
      const CollisionRecord rec = simulate_one(c, derive_seed(opts.seed ^ 0xa5a5ULL, static_cast<std::uint64_t>(i)), quad);
      if (rec.flagged() || rec.dq.norm() > 1e-2 || rec.s_simple <= 0.0) continue;
      const double s = rec.s_simple;
      const double drift = spectral_norm(rec.V.completeOrthogonalDecomposition().pseudoInverse() * (rec.Vp - rec.V));
      worst = std::max(worst, std::abs(rec.bound_B - s / 2) / (s * s + s * drift));
    }
    suite.add("tur", "quadratic_limit", worst, 1.0, "|B - s/2| / (s^2 + s ||V^-1 (V' - V)||), ||dq|| <= 1e-2");
  }
}

void harness_checks(Suite& suite, const VerifyOptions& opts) {
  {
    std::unordered_set<std::uint64_t> seen;
    constexpr std::uint64_t kCount = 1'000'000;
    seen.reserve(kCount);
    for (std::uint64_t i = 0; i < kCount; ++i) seen.insert(derive_seed(opts.seed, i));
    suite.add("harness", "derive_seed_collisions", static_cast<double>(kCount - seen.size()), 0.0,
              "over 1e6 indices");
  }
  ExperimentConfig cfg;
  cfg.collision.seed = opts.seed;
  cfg.collision.system_mode = SystemMode::Mixed;
  cfg.n_samples = 60;
  cfg.quadrature_order = opts.quadrature_order;
  {
    cfg.workers = 1;
    const std::string a = records_to_csv(run_monte_carlo(cfg).records);
    cfg.workers = 3;
    const std::string b = records_to_csv(run_monte_carlo(cfg).records);
    suite.add("harness", "worker_count_determinism", a == b ? 0.0 : 1.0, 0.0, "CSV bytes, 1 vs 3 workers");
  }
  {
    cfg.workers = 1;
    const auto recs = run_monte_carlo(cfg).records;
    const auto path = std::filesystem::temp_directory_path() /
                      ("naqtur_verify_" + std::to_string(derive_seed(opts.seed, 99)) + ".csv");
    write_csv(recs, path.string());
    const auto back = read_records_csv(path.string());
    std::filesystem::remove(path);
    double worst = back.size() == recs.size() ? 0.0 : kInf;
    for (std::size_t i = 0; i < std::min(back.size(), recs.size()); ++i) {
      const auto& a = recs[i].collision;
      const auto& b = back[i].collision;
      for (auto [x, y] : {std::pair{a.sigma, b.sigma}, {a.d_bath, b.d_bath}, {a.bound_B, b.bound_B},
                          {a.rel_slack, b.rel_slack}, {a.V(0, 1), b.V(0, 1)}, {a.dq(1), b.dq(1)}}) {
        if (std::isnan(x) && std::isnan(y)) continue;
        worst = std::max(worst, std::abs(x - y) / std::max(1.0, std::abs(x)));
      }
    }
    suite.add("harness", "csv_round_trip", worst, 1e-12);
  }
}

}  // namespace

double kl_integral_tolerance(int order, double divergence) {
  const double base = std::max(1e-8, 1e-6 * divergence);
  return order >= 64 ? base : std::max(base, 5.0 * std::exp(-0.55 * order));
}

double closed_form_tolerance(int order) {
  return order >= 64 ? 1e-8 : std::max(1e-8, 20.0 * std::exp(-0.37 * order));
}

double bures_hellinger_tolerance(int order) {
  // sqrt endpoint behaviour: the error falls off like order^-3
  return order >= 64 ? 1e-4 : std::max(1e-4, 20.0 / std::pow(order, 3));
}

std::vector<CheckResult> run_verify_suite(const VerifyOptions& options) {
  if (options.quadrature_order < 2) throw ValidationError("quadrature order must be >= 2");
  if (options.samples < 1) throw ValidationError("samples must be >= 1");
  Suite suite(options);
  qcore_checks(suite, options);
  divergence_checks(suite, options);
  tur_checks(suite, options);
  collision_checks(suite, options);
  harness_checks(suite, options);
  return suite.take();
}

}  // namespace naqtur
