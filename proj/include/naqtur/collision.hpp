// One-shot qubit collision S + E -> U (rho_S (x) rho_E) U^dagger and the
// thermodynamic scalars attached to it.

#pragma once

#include "naqtur/divergence.hpp"
#include "naqtur/qcore.hpp"
#include "naqtur/tur.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace naqtur {

enum class SystemMode {
  HaarIsospectral,
  SmallIsospectral,
  IndependentRandom,
  // Per-sample uniform choice among the three modes above.
  Mixed,
};

std::string_view to_string(SystemMode mode);
SystemMode parse_system_mode(std::string_view text);

struct CollisionConfig {
  double r_min = 0.1;
  double r_max = 0.95;
  double phi_min = 0.05;
  double phi_max = 1.57;
  SystemMode system_mode = SystemMode::HaarIsospectral;
  double eps_min = 1e-3;
  double eps_max = 0.3;
  int k = 2;
  bool random_frame = true;
  bool use_fixed_point_unitary = true;
  std::uint64_t seed = 0;
  double floor = kDefaultFloor;

  void validate() const;
};

struct BathSample {
  DensityMatrix rho;
  double r;
  Vec3 n;
};

// n uniform on S^2; r from a 50/50 mixture of Unif[r_min, r_max] and
// r_max - Exp(10) (rejected outside the range).
BathSample sample_bath(const CollisionConfig& config, Rng& rng);

// How rho_S is obtained from rho_E. For the isospectral modes rho_S = U rho_E U^dagger;
// in independent mode rho_S is a fresh Bloch state (r_sys, n_sys).
struct SystemPreparation {
  SystemMode mode = SystemMode::HaarIsospectral;
  CMatrix rotation = CMatrix::Identity(2, 2);
  double eps = 0.0;
  Vec3 axis = Vec3::UnitZ();
  double r_sys = 0.0;
  Vec3 n_sys = Vec3::UnitZ();

  DensityMatrix prepare(const DensityMatrix& rho_E) const;
};

// `mode` must not be Mixed; resolve it first.
SystemPreparation sample_system_preparation(SystemMode mode, const CollisionConfig& config, Rng& rng);
DensityMatrix sample_system(SystemMode mode, const DensityMatrix& rho_E,
                            const CollisionConfig& config, Rng& rng);

// cos(phi) I - i sin(phi) SWAP on C^2 (x) C^2
UnitaryOperator partial_swap(double phi);

// Random parameters of the bath-adapted block unitary.
struct FixedPointBlock {
  double alpha = 0.0;
  double beta = 0.0;
  CMatrix u2 = CMatrix::Identity(2, 2);
};

FixedPointBlock sample_fixed_point_block(Rng& rng);

// (W (x) W) diag(e^{i alpha}, u2, e^{i beta}) (W (x) W)^dagger where W diagonalises rho_E.
// Leaves rho_E (x) rho_E invariant.
UnitaryOperator fixed_point_unitary(const DensityMatrix& rho_E, const FixedPointBlock& block);
UnitaryOperator fixed_point_unitary(const DensityMatrix& rho_E, Rng& rng);

// U_swap(phi) U_fp
UnitaryOperator compose_interaction(double phi, const UnitaryOperator& u_fp);

struct CollisionOutput {
  DensityMatrix rho_SE;
  DensityMatrix rho_S;
  DensityMatrix rho_E;
};

CollisionOutput run_collision(const DensityMatrix& rho_S, const DensityMatrix& rho_E,
                              const UnitaryOperator& u_SE);

// D(rho'_SE || rho'_S (x) rho_E)
double entropy_production(const DensityMatrix& rho_SE_after, const DensityMatrix& rho_S_after,
                          const DensityMatrix& rho_E, double floor = kDefaultFloor);

// D(rho'_SE || rho'_S (x) rho'_E)
double mutual_information(const DensityMatrix& rho_SE_after, const DensityMatrix& rho_S_after,
                          const DensityMatrix& rho_E_after, double floor = kDefaultFloor);

// Only k = 2 is supported: axes (R x, R z) with R uniform on SO(3) when
// random_frame is set, else (x, z).
ChargeSet sample_charges(int k, bool random_frame, Rng& rng);
ChargeSet charges_from_frame(const Mat3& frame);

// Every random choice of one collision. evaluate_collision is a pure function of it.
struct CollisionParams {
  double r = 0.5;
  Vec3 n = Vec3::UnitZ();
  SystemPreparation system;
  double phi = 0.5;
  bool use_fixed_point_unitary = true;
  FixedPointBlock fp;
  bool random_frame = true;
  Mat3 frame = Mat3::Identity();
  int k = 2;
};

CollisionParams sample_collision_params(const CollisionConfig& config, Rng& rng);

enum RecordFlag : unsigned {
  kRecordOutOfRange = 1u << 0,  // dq outside range(V_lambda); bound_B = +inf
  kRecordZeroDbath = 1u << 1,   // D_bath == 0, relative slack undefined
};

struct CollisionRecord {
  double sigma = 0.0;
  double mutual_info = 0.0;
  double d_bath = 0.0;
  double bound_B = 0.0;
  double s_simple = 0.0;
  double F_of_s = 0.0;
  double gap_abs = 0.0;
  double rel_slack = 0.0;
  double cov_drift = 0.0;
  double robertson_C = 0.0;
  RVector dq;
  RMatrix V;
  RMatrix Vp;
  double r = 0.0;
  Vec3 n = Vec3::UnitZ();
  double phi = 0.0;
  double eps = 0.0;
  SystemMode mode = SystemMode::HaarIsospectral;
  double range_residual = 0.0;
  unsigned flags = 0;
  std::uint64_t sample_seed = 0;
  CollisionParams params;

  bool flagged() const { return flags != 0; }
};

CollisionRecord evaluate_collision(const CollisionParams& params, const QuadratureRule& quad,
                                   double floor = kDefaultFloor);

// Pipeline: bath -> charges -> system -> unitary -> evolve -> Sigma, D_bath -> dq, V, V'
// -> bound. Deterministic in (config, sample_seed).
CollisionRecord simulate_one(const CollisionConfig& config, std::uint64_t sample_seed,
                             const QuadratureRule& quad);

}  // namespace naqtur
