#include "naqtur/collision.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace naqtur {

namespace {

constexpr double kExpRate = 10.0;

double sample_radius(double r_min, double r_max, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double r;
  if (unit(rng) < 0.5) {
    r = std::uniform_real_distribution<double>(r_min, r_max)(rng);
  } else {
    std::exponential_distribution<double> expo(kExpRate);
    do {
      r = r_max - expo(rng);
    } while (r < r_min);
  }
  return std::clamp(r, r_min, r_max);
}

CMatrix swap_operator() {
  CMatrix s = CMatrix::Zero(4, 4);
  s(0, 0) = 1;
  s(1, 2) = 1;
  s(2, 1) = 1;
  s(3, 3) = 1;
  return s;
}

}  // namespace

std::string_view to_string(SystemMode mode) {
  switch (mode) {
    case SystemMode::HaarIsospectral: return "haar-isospectral";
    case SystemMode::SmallIsospectral: return "small-isospectral";
    case SystemMode::IndependentRandom: return "independent-random";
    case SystemMode::Mixed: return "mixed";
  }
  return "unknown";
}

SystemMode parse_system_mode(std::string_view text) {
  for (auto m : {SystemMode::HaarIsospectral, SystemMode::SmallIsospectral,
                 SystemMode::IndependentRandom, SystemMode::Mixed}) {
    if (text == to_string(m)) return m;
  }
  throw ValidationError("unknown system mode '" + std::string(text) +
                        "' (expected haar-isospectral, small-isospectral, independent-random or mixed)");
}

void CollisionConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ValidationError("collision config: " + msg); };
  if (!(0.0 < r_min && r_min <= r_max && r_max < 1.0)) fail("need 0 < r_min <= r_max < 1");
  if (!(0.0 < phi_min && phi_min <= phi_max && phi_max <= std::numbers::pi / 2))
    fail("need 0 < phi_min <= phi_max <= pi/2");
  if (!(0.0 < eps_min && eps_min <= eps_max)) fail("need 0 < eps_min <= eps_max");
  if (k != 2) fail("only k = 2 charges are supported");
  if (!(floor > 0.0)) fail("eigenvalue floor must be positive");
}

BathSample sample_bath(const CollisionConfig& config, Rng& rng) {
  const Vec3 n = random_unit_vector(rng);
  const double r = sample_radius(config.r_min, config.r_max, rng);
  return BathSample{bloch_state(r, n), r, n};
}

DensityMatrix SystemPreparation::prepare(const DensityMatrix& rho_E) const {
  if (mode == SystemMode::IndependentRandom) return bloch_state(r_sys, n_sys);
  return DensityMatrix(rotation * rho_E.matrix() * rotation.adjoint());
}

SystemPreparation sample_system_preparation(SystemMode mode, const CollisionConfig& config,
                                            Rng& rng) {
  SystemPreparation prep;
  prep.mode = mode;
  switch (mode) {
    case SystemMode::HaarIsospectral:
      prep.rotation = haar_su2(rng).matrix();
      break;
    case SystemMode::SmallIsospectral: {
      std::uniform_real_distribution<double> log_eps(std::log(config.eps_min), std::log(config.eps_max));
      prep.eps = std::exp(log_eps(rng));
      prep.axis = random_unit_vector(rng);
      prep.rotation = su2_rotation(prep.axis, prep.eps);
      break;
    }
    case SystemMode::IndependentRandom:
      prep.n_sys = random_unit_vector(rng);
      prep.r_sys = sample_radius(config.r_min, config.r_max, rng);
      break;
    case SystemMode::Mixed:
      throw ValidationError("sample_system_preparation: resolve Mixed to a concrete mode first");
  }
  return prep;
}

DensityMatrix sample_system(SystemMode mode, const DensityMatrix& rho_E,
                            const CollisionConfig& config, Rng& rng) {
  return sample_system_preparation(mode, config, rng).prepare(rho_E);
}

UnitaryOperator partial_swap(double phi) {
  return UnitaryOperator(std::cos(phi) * identity(4) - cplx(0, 1) * std::sin(phi) * swap_operator());
}

FixedPointBlock sample_fixed_point_block(Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  FixedPointBlock block;
  block.alpha = angle(rng);
  block.beta = angle(rng);
  block.u2 = haar_unitary(2, rng).matrix();
  return block;
}

UnitaryOperator fixed_point_unitary(const DensityMatrix& rho_E, const FixedPointBlock& block) {
  if (rho_E.dim() != 2) throw ValidationError("fixed_point_unitary: qubit bath required");
  const CMatrix w = hermitian_eig(rho_E.op()).eigenvectors;
  CMatrix ueig = CMatrix::Zero(4, 4);
  ueig(0, 0) = std::polar(1.0, block.alpha);
  ueig.block(1, 1, 2, 2) = block.u2;
  ueig(3, 3) = std::polar(1.0, block.beta);
  const CMatrix ww = tensor(w, w);
  return UnitaryOperator(ww * ueig * ww.adjoint());
}

UnitaryOperator fixed_point_unitary(const DensityMatrix& rho_E, Rng& rng) {
  return fixed_point_unitary(rho_E, sample_fixed_point_block(rng));
}

UnitaryOperator compose_interaction(double phi, const UnitaryOperator& u_fp) {
  return UnitaryOperator(partial_swap(phi).matrix() * u_fp.matrix());
}

CollisionOutput run_collision(const DensityMatrix& rho_S, const DensityMatrix& rho_E,
                              const UnitaryOperator& u_SE) {
  const int ds = static_cast<int>(rho_S.dim());
  const int de = static_cast<int>(rho_E.dim());
  if (u_SE.dim() != static_cast<Eigen::Index>(ds) * de)
    throw ValidationError("run_collision: unitary does not act on S (x) E");
  const CMatrix& u = u_SE.matrix();
  DensityMatrix rho_SE(u * tensor(rho_S.matrix(), rho_E.matrix()) * u.adjoint());
  DensityMatrix rho_S_after = partial_trace(rho_SE, ds, de, Subsystem::A);
  DensityMatrix rho_E_after = partial_trace(rho_SE, ds, de, Subsystem::B);
  return CollisionOutput{std::move(rho_SE), std::move(rho_S_after), std::move(rho_E_after)};
}

double entropy_production(const DensityMatrix& rho_SE_after, const DensityMatrix& rho_S_after,
                          const DensityMatrix& rho_E, double floor) {
  return relative_entropy(rho_SE_after, tensor(rho_S_after, rho_E), floor);
}

double mutual_information(const DensityMatrix& rho_SE_after, const DensityMatrix& rho_S_after,
                          const DensityMatrix& rho_E_after, double floor) {
  return relative_entropy(rho_SE_after, tensor(rho_S_after, rho_E_after), floor);
}

ChargeSet charges_from_frame(const Mat3& frame) {
  Eigen::Matrix<double, 3, 2> axes;
  axes.col(0) = frame.col(0);
  axes.col(1) = frame.col(2);
  return spin_charges(axes, frame, {"Q1", "Q2"});
}

ChargeSet sample_charges(int k, bool random_frame, Rng& rng) {
  if (k != 2) throw ValidationError("sample_charges: only k = 2 is supported");
  if (!random_frame) return default_charges();
  return charges_from_frame(adjoint_rotation(haar_su2(rng).matrix()));
}

CollisionParams sample_collision_params(const CollisionConfig& config, Rng& rng) {
  config.validate();
  CollisionParams p;
  p.k = config.k;

  // 1. bath
  const BathSample bath = sample_bath(config, rng);
  p.r = bath.r;
  p.n = bath.n;

  // 2. charge frame
  p.random_frame = config.random_frame;
  p.frame = config.random_frame ? adjoint_rotation(haar_su2(rng).matrix()) : Mat3::Identity();

  // 3. system
  SystemMode mode = config.system_mode;
  if (mode == SystemMode::Mixed) {
    constexpr SystemMode kModes[] = {SystemMode::HaarIsospectral, SystemMode::SmallIsospectral,
                                     SystemMode::IndependentRandom};
    mode = kModes[std::uniform_int_distribution<int>(0, 2)(rng)];
  }
  p.system = sample_system_preparation(mode, config, rng);

  // 4. interaction
  p.phi = std::uniform_real_distribution<double>(config.phi_min, config.phi_max)(rng);
  p.use_fixed_point_unitary = config.use_fixed_point_unitary;
  if (config.use_fixed_point_unitary) p.fp = sample_fixed_point_block(rng);
  return p;
}

CollisionRecord evaluate_collision(const CollisionParams& params, const QuadratureRule& quad,
                                   double floor) {
  CollisionRecord rec;
  rec.params = params;
  rec.r = params.r;
  rec.n = params.n;
  rec.phi = params.phi;
  rec.mode = params.system.mode;
  rec.eps = params.system.mode == SystemMode::SmallIsospectral ? params.system.eps : 0.0;

  const DensityMatrix rho_E = bloch_state(params.r, params.n);
  const ChargeSet charges =
      params.random_frame ? charges_from_frame(params.frame) : default_charges();
  const DensityMatrix rho_S = params.system.prepare(rho_E);
  const UnitaryOperator u_fp = params.use_fixed_point_unitary
                                   ? fixed_point_unitary(rho_E, params.fp)
                                   : UnitaryOperator(identity(4));
  const UnitaryOperator u_SE = compose_interaction(params.phi, u_fp);

  const CollisionOutput out = run_collision(rho_S, rho_E, u_SE);

  rec.sigma = entropy_production(out.rho_SE, out.rho_S, rho_E, floor);
  rec.mutual_info = mutual_information(out.rho_SE, out.rho_S, out.rho_E, floor);
  rec.d_bath = relative_entropy(out.rho_E, rho_E, floor);

  rec.dq = current_vector(rho_E, out.rho_E, charges);
  rec.V = covariance_matrix(rho_E, charges);
  rec.Vp = covariance_matrix(out.rho_E, charges);
  rec.cov_drift = frobenius_norm(rec.Vp - rec.V) / frobenius_norm(rec.V);
  rec.robertson_C = robertson_C(rho_E, charges.charges[0], charges.charges[1]);

  const BoundReport rep = bound_B(rec.dq, rec.V, rec.Vp, quad);
  rec.bound_B = rep.B;
  rec.s_simple = rep.s_simple;
  rec.F_of_s = rep.F_of_s;
  rec.range_residual = rep.range_residual;
  if (rep.out_of_range()) rec.flags |= kRecordOutOfRange;

  rec.gap_abs = rec.d_bath - rec.bound_B;
  if (rec.d_bath > 0.0) {
    rec.rel_slack = 1.0 - rec.bound_B / rec.d_bath;
  } else {
    rec.rel_slack = std::numeric_limits<double>::quiet_NaN();
    rec.flags |= kRecordZeroDbath;
  }
  return rec;
}

CollisionRecord simulate_one(const CollisionConfig& config, std::uint64_t sample_seed,
                             const QuadratureRule& quad) {
  Rng rng(sample_seed);
  CollisionRecord rec = evaluate_collision(sample_collision_params(config, rng), quad, config.floor);
  rec.sample_seed = sample_seed;
  return rec;
}

}  // namespace naqtur
