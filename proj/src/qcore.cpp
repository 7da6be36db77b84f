#include "naqtur/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace naqtur {

namespace {

template <typename Scalar>
Scalar conj_s(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return x;
  } else {
    return std::conj(x);
  }
}

template <typename Scalar>
double real_s(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return x;
  } else {
    return x.real();
  }
}

template <typename Scalar>
using DynMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Cyclic Jacobi for a self-adjoint matrix. The (p, q) rotation is the product
// of a diagonal phase that makes a_pq real and the classical real rotation
// annihilating it.
template <typename Scalar>
void jacobi(DynMatrix<Scalar> a, RVector& evals, DynMatrix<Scalar>& evecs) {
  const Eigen::Index n = a.rows();
  evecs = DynMatrix<Scalar>::Identity(n, n);
  const double scale = std::max(a.norm(), 1e-300);
  constexpr int kMaxSweeps = 100;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= 1e-16 * scale) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        const double g = std::abs(apq);
        if (g <= 1e-17 * scale) continue;
        const double app = real_s(a(p, p));
        const double aqq = real_s(a(q, q));
        const double theta = (aqq - app) / (2.0 * g);
        const double t =
            (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const Scalar e = apq / g;
        const Scalar ce = conj_s(e);

        // U restricted to (p, q): [[c, s], [-s conj(e), c conj(e)]]
        const Scalar u_pp = c, u_pq = s, u_qp = -s * ce, u_qq = c * ce;

        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * u_pp + akq * u_qp;
          a(k, q) = akp * u_pq + akq * u_qq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar apk = a(p, k), aqk = a(q, k);
          a(p, k) = conj_s(u_pp) * apk + conj_s(u_qp) * aqk;
          a(q, k) = conj_s(u_pq) * apk + conj_s(u_qq) * aqk;
        }
        a(p, q) = Scalar(0);
        a(q, p) = Scalar(0);
        a(p, p) = Scalar(real_s(a(p, p)));
        a(q, q) = Scalar(real_s(a(q, q)));

        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar vkp = evecs(k, p), vkq = evecs(k, q);
          evecs(k, p) = vkp * u_pp + vkq * u_qp;
          evecs(k, q) = vkp * u_pq + vkq * u_qq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return real_s(a(i, i)) < real_s(a(j, j));
  });

  evals.resize(n);
  DynMatrix<Scalar> sorted(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    evals(k) = real_s(a(src, src));
    auto col = evecs.col(src);
    Scalar phase(1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mag = std::abs(col(i));
      if (mag > 1e-12) {
        phase = conj_s(col(i)) / mag;
        break;
      }
    }
    sorted.col(k) = col * phase;
  }
  evecs = std::move(sorted);
}

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw ValidationError(os.str());
  }
}

}  // namespace

HermitianOperator::HermitianOperator(const CMatrix& m) {
  require_square(m, "HermitianOperator");
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (!(asym <= kHermitianTol)) {
    std::ostringstream os;
    os << "HermitianOperator: max |H - H^dagger| = " << asym << " exceeds " << kHermitianTol;
    throw ValidationError(os.str());
  }
  m_ = 0.5 * (m + m.adjoint());
}

DensityMatrix::DensityMatrix(const CMatrix& m) : op_(m) {
  const double tr = real_trace(op_.matrix());
  if (!(std::abs(tr - 1.0) <= kTraceTol)) {
    std::ostringstream os;
    os << "DensityMatrix: trace " << tr << " differs from 1 by more than " << kTraceTol;
    throw ValidationError(os.str());
  }
  const double min_eval = hermitian_eig(op_).eigenvalues.minCoeff();
  if (!(min_eval >= -kPsdTol)) {
    std::ostringstream os;
    os << "DensityMatrix: eigenvalue " << min_eval << " below " << -kPsdTol;
    throw ValidationError(os.str());
  }
}

UnitaryOperator::UnitaryOperator(const CMatrix& m) : m_(m) {
  require_square(m, "UnitaryOperator");
  const double err = (m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols())).norm();
  if (!(err <= kUnitaryTol)) {
    std::ostringstream os;
    os << "UnitaryOperator: ||U^dagger U - I||_F = " << err << " exceeds " << kUnitaryTol;
    throw ValidationError(os.str());
  }
}

CMatrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<cplx>().asDiagonal() * eigenvectors.adjoint();
}

SpectralDecomposition hermitian_eig(const HermitianOperator& h) {
  SpectralDecomposition out;
  jacobi<cplx>(h.matrix(), out.eigenvalues, out.eigenvectors);
  return out;
}

SpectralDecomposition hermitian_eig(const CMatrix& h) { return hermitian_eig(HermitianOperator(h)); }

RealSpectralDecomposition symmetric_eig(const RMatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw ValidationError("symmetric_eig: expected a non-empty square matrix");
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= kHermitianTol * std::max(1.0, a.cwiseAbs().maxCoeff())))
    throw ValidationError("symmetric_eig: matrix is not symmetric");
  RealSpectralDecomposition out;
  jacobi<double>(0.5 * (a + a.transpose()), out.eigenvalues, out.eigenvectors);
  return out;
}

HermitianOperator spectral_apply(const HermitianOperator& h,
                                 const std::function<double(double)>& f) {
  const auto eig = hermitian_eig(h);
  RVector mapped(eig.eigenvalues.size());
  for (Eigen::Index i = 0; i < mapped.size(); ++i) mapped(i) = f(eig.eigenvalues(i));
  return HermitianOperator(eig.eigenvectors * mapped.cast<cplx>().asDiagonal() *
                           eig.eigenvectors.adjoint());
}

HermitianOperator exp_spectral(const HermitianOperator& h) {
  return spectral_apply(h, [](double x) { return std::exp(x); });
}

HermitianOperator matrix_log_psd(const DensityMatrix& rho, double floor) {
  if (!(floor > 0)) throw ValidationError("matrix_log_psd: floor must be positive");
  return spectral_apply(rho.op(), [floor](double p) { return std::log(std::max(p, floor)); });
}

HermitianOperator matrix_sqrt_psd(const DensityMatrix& rho) {
  return spectral_apply(rho.op(), [](double p) { return std::sqrt(std::max(p, 0.0)); });
}

CMatrix tensor(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(tensor(a.matrix(), b.matrix()));
}

CMatrix partial_trace(const CMatrix& m, int dim_a, int dim_b, Subsystem keep) {
  if (dim_a <= 0 || dim_b <= 0 || m.rows() != m.cols() ||
      m.rows() != static_cast<Eigen::Index>(dim_a) * dim_b) {
    std::ostringstream os;
    os << "partial_trace: operator of size " << m.rows() << "x" << m.cols()
       << " does not factor as " << dim_a << " x " << dim_b;
    throw ValidationError(os.str());
  }
  if (keep == Subsystem::A) {
    CMatrix out = CMatrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_a; ++j)
        for (int k = 0; k < dim_b; ++k) out(i, j) += m(i * dim_b + k, j * dim_b + k);
    return out;
  }
  CMatrix out = CMatrix::Zero(dim_b, dim_b);
  for (int i = 0; i < dim_b; ++i)
    for (int j = 0; j < dim_b; ++j)
      for (int k = 0; k < dim_a; ++k) out(i, j) += m(k * dim_b + i, k * dim_b + j);
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, int dim_a, int dim_b, Subsystem keep) {
  return DensityMatrix(partial_trace(rho.matrix(), dim_a, dim_b, keep));
}

UnitaryOperator haar_su2(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector4d x;
  do {
    for (int i = 0; i < 4; ++i) x(i) = normal(rng);
  } while (x.norm() < 1e-12);
  x.normalize();
  const cplx a(x(0), x(1));
  const cplx b(x(2), x(3));
  CMatrix u(2, 2);
  u << a, -std::conj(b), b, std::conj(a);
  return UnitaryOperator(u);
}

UnitaryOperator haar_unitary(int d, Rng& rng) {
  if (d <= 0) throw ValidationError("haar_unitary: dimension must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix z(d, d);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = cplx(re, im) * inv_sqrt2;
    }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  // Absorb the phases of diag(R) so the distribution is exactly Haar.
  for (int j = 0; j < d; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0) q.col(j) *= r(j, j) / mag;
  }
  return UnitaryOperator(q);
}

DensityMatrix bloch_state(double r, const Vec3& n) {
  if (!(r >= 0.0 && r < 1.0)) {
    std::ostringstream os;
    os << "bloch_state: radius must satisfy 0 <= r < 1, got " << r;
    throw ValidationError(os.str());
  }
  if (!(std::abs(n.norm() - 1.0) <= 1e-10))
    throw ValidationError("bloch_state: direction must be a unit vector");
  return DensityMatrix(0.5 * (identity(2) + r * pauli_dot(n)));
}

Vec3 bloch_vector(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw ValidationError("bloch_vector: qubit state required");
  const CMatrix& m = rho.matrix();
  return Vec3(real_trace(m * pauli_x()), real_trace(m * pauli_y()), real_trace(m * pauli_z()));
}

CMatrix identity(int d) { return CMatrix::Identity(d, d); }

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

CMatrix pauli_dot(const Vec3& n) { return n(0) * pauli_x() + n(1) * pauli_y() + n(2) * pauli_z(); }

Vec3 random_unit_vector(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(normal(rng), normal(rng), normal(rng));
  } while (v.norm() < 1e-12);
  return v.normalized();
}

CMatrix su2_rotation(const Vec3& axis, double angle) {
  const Vec3 a = axis.normalized();
  return std::cos(angle / 2) * identity(2) - cplx(0, 1) * std::sin(angle / 2) * pauli_dot(a);
}

Mat3 adjoint_rotation(const CMatrix& u) {
  const CMatrix sig[3] = {pauli_x(), pauli_y(), pauli_z()};
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = 0.5 * real_trace(sig[i] * u * sig[j] * u.adjoint());
  return r;
}

double real_trace(const CMatrix& m) { return m.trace().real(); }

}  // namespace naqtur
