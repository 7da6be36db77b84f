// Dense Hermitian linear algebra for small (qubit / two-qubit) Hilbert spaces.
//
// All operators are stored as dynamic Eigen matrices. The wrapper types below
// validate their invariants on construction and are immutable afterwards, so a
// DensityMatrix that exists is a valid state.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace naqtur {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Rng = std::mt19937_64;

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kUnitaryTol = 1e-10;

// Eigenvalue floor used by matrix_log_psd. Clamping p -> max(p, floor) without
// renormalising perturbs Tr[rho log rho] by at most d * floor * |ln floor|
// (about 1.1e-10 for d = 4).
inline constexpr double kDefaultFloor = 1e-12;

class HermitianOperator {
 public:
  // Throws ValidationError if max |m - m^dagger| exceeds kHermitianTol.
  // The stored matrix is the exact Hermitian part of `m`.
  explicit HermitianOperator(const CMatrix& m);

  const CMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  CMatrix m_;
};

class DensityMatrix {
 public:
  // Throws ValidationError unless Hermitian, unit trace (1e-10) and
  // min eigenvalue >= -1e-10.
  explicit DensityMatrix(const CMatrix& m);

  const CMatrix& matrix() const { return op_.matrix(); }
  const HermitianOperator& op() const { return op_; }
  Eigen::Index dim() const { return op_.dim(); }

 private:
  HermitianOperator op_;
};

class UnitaryOperator {
 public:
  // Throws ValidationError unless ||U^dagger U - I||_F <= kUnitaryTol.
  explicit UnitaryOperator(const CMatrix& m);

  const CMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  CMatrix m_;
};

// H = Q diag(eigenvalues) Q^dagger with eigenvalues ascending.
struct SpectralDecomposition {
  RVector eigenvalues;
  CMatrix eigenvectors;

  CMatrix reconstruct() const;
};

struct RealSpectralDecomposition {
  RVector eigenvalues;
  RMatrix eigenvectors;
};

// Cyclic Jacobi. Each eigenvector is phase-fixed so that its first component
// with modulus above 1e-12 is real and positive, making the basis
// deterministic even for degenerate spectra.
SpectralDecomposition hermitian_eig(const HermitianOperator& h);
SpectralDecomposition hermitian_eig(const CMatrix& h);
RealSpectralDecomposition symmetric_eig(const RMatrix& a);

// Q f(Lambda) Q^dagger.
HermitianOperator spectral_apply(const HermitianOperator& h,
                                 const std::function<double(double)>& f);
HermitianOperator exp_spectral(const HermitianOperator& h);

HermitianOperator matrix_log_psd(const DensityMatrix& rho, double floor = kDefaultFloor);
HermitianOperator matrix_sqrt_psd(const DensityMatrix& rho);

CMatrix tensor(const CMatrix& a, const CMatrix& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

enum class Subsystem { A, B };

// Works on arbitrary operators; Tr_B(X (x) Y) = X Tr(Y).
CMatrix partial_trace(const CMatrix& m, int dim_a, int dim_b, Subsystem keep);
DensityMatrix partial_trace(const DensityMatrix& rho, int dim_a, int dim_b, Subsystem keep);

UnitaryOperator haar_su2(Rng& rng);
UnitaryOperator haar_unitary(int d, Rng& rng);

// rho = (I + r n.sigma) / 2. Requires 0 <= r < 1 and |n| = 1.
DensityMatrix bloch_state(double r, const Vec3& n);

// Bloch vector (Tr rho sigma_x, Tr rho sigma_y, Tr rho sigma_z) of a qubit.
Vec3 bloch_vector(const DensityMatrix& rho);

template <typename Derived>
double frobenius_norm(const Eigen::MatrixBase<Derived>& a) {
  return a.norm();
}

CMatrix identity(int d);
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
// n . sigma for a real 3-vector.
CMatrix pauli_dot(const Vec3& n);

// Uniform on S^2 via normalised Gaussians.
Vec3 random_unit_vector(Rng& rng);

// U(eps) = exp(-i eps (a.sigma) / 2) for a unit axis a.
CMatrix su2_rotation(const Vec3& axis, double angle);

// SO(3) image of an SU(2) element: R_ij = Tr(sigma_i U sigma_j U^dagger) / 2.
Mat3 adjoint_rotation(const CMatrix& u);

double real_trace(const CMatrix& m);

}  // namespace naqtur
