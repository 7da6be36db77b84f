#include "naqtur/tur.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace naqtur {

namespace {

struct PseudoInverse {
  RMatrix eigenvectors;   // kept columns only
  RVector inv_eigenvalues;

  RVector apply(const RVector& x) const {
    return eigenvectors * inv_eigenvalues.asDiagonal() * (eigenvectors.transpose() * x);
  }
};

PseudoInverse pseudo_inverse(const RMatrix& a, double tol) {
  const auto eig = symmetric_eig(a);
  const double lmax = eig.eigenvalues.maxCoeff();
  std::vector<Eigen::Index> keep;
  if (lmax > 0.0) {
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
      if (eig.eigenvalues(i) >= tol * lmax) keep.push_back(i);
  }
  PseudoInverse out;
  out.eigenvectors.resize(a.rows(), static_cast<Eigen::Index>(keep.size()));
  out.inv_eigenvalues.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    out.eigenvectors.col(kk) = eig.eigenvectors.col(keep[k]);
    out.inv_eigenvalues(kk) = 1.0 / eig.eigenvalues(keep[k]);
  }
  return out;
}

RMatrix interpolate(const RMatrix& v, const RMatrix& v_after, double lambda) {
  return (1.0 - lambda) * v_after + lambda * v;
}

double bound_integrand(double lambda, double s) {
  return s / (1.0 + lambda * (1.0 - lambda) * s);
}

void require_sizes(const RVector& dq, const RMatrix& v, const RMatrix& v_after) {
  const Eigen::Index m = dq.size();
  if (v.rows() != m || v.cols() != m || v_after.rows() != m || v_after.cols() != m) {
    std::ostringstream os;
    os << "covariance pair: expected " << m << "x" << m << " matrices, got " << v.rows() << "x"
       << v.cols() << " and " << v_after.rows() << "x" << v_after.cols();
    throw ValidationError(os.str());
  }
}

}  // namespace

ChargeSet spin_charges(const Eigen::Matrix<double, 3, Eigen::Dynamic>& axes, const Mat3& frame,
                       std::vector<std::string> labels) {
  ChargeSet set;
  set.frame = frame;
  for (Eigen::Index u = 0; u < axes.cols(); ++u) {
    set.charges.emplace_back(0.5 * pauli_dot(axes.col(u)));
    if (labels.size() <= static_cast<std::size_t>(u)) labels.push_back("Q" + std::to_string(u + 1));
  }
  set.labels = std::move(labels);
  return set;
}

ChargeSet default_charges() {
  Eigen::Matrix<double, 3, 2> axes;
  axes << 1, 0, 0, 0, 0, 1;
  return spin_charges(axes, Mat3::Identity(), {"QX", "QZ"});
}

RVector current_vector(const DensityMatrix& rho_before, const DensityMatrix& rho_after,
                       const ChargeSet& charges) {
  const CMatrix diff = rho_after.matrix() - rho_before.matrix();
  RVector dq(static_cast<Eigen::Index>(charges.size()));
  for (std::size_t u = 0; u < charges.size(); ++u)
    dq(static_cast<Eigen::Index>(u)) = real_trace(diff * charges.charges[u].matrix());
  return dq;
}

RMatrix covariance_matrix(const DensityMatrix& tau, const ChargeSet& charges) {
  const auto m = static_cast<Eigen::Index>(charges.size());
  const Eigen::Index d = tau.dim();
  std::vector<CMatrix> centred;
  centred.reserve(charges.size());
  for (const auto& q : charges.charges) {
    const double mean = real_trace(tau.matrix() * q.matrix());
    centred.push_back(q.matrix() - mean * CMatrix::Identity(d, d));
  }
  RMatrix v(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = a; b < m; ++b) {
      const auto& qa = centred[static_cast<std::size_t>(a)];
      const auto& qb = centred[static_cast<std::size_t>(b)];
      v(a, b) = 0.5 * real_trace(tau.matrix() * (qa * qb + qb * qa));
      v(b, a) = v(a, b);
    }
  }
  return v;
}

void validate_covariance_pair(const RVector& dq, const RMatrix& v, const RMatrix& v_after) {
  require_sizes(dq, v, v_after);
  if (!dq.allFinite() || !v.allFinite() || !v_after.allFinite())
    throw ValidationError("covariance pair: non-finite entries");
  for (const RMatrix* m : {&v, &v_after}) {
    if ((*m - m->transpose()).cwiseAbs().maxCoeff() > 1e-10)
      throw ValidationError("covariance pair: matrix is not symmetric within 1e-10");
    if (symmetric_eig(*m).eigenvalues.minCoeff() < -1e-10)
      throw ValidationError("covariance pair: matrix is not positive semidefinite within 1e-10");
  }
}

SLambda s_lambda(const RVector& dq, const RMatrix& v, const RMatrix& v_after, double lambda,
                 double tol) {
  require_sizes(dq, v, v_after);
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("s_lambda: lambda must lie in [0, 1]");
  SLambda out;
  const double norm = dq.norm();
  if (norm == 0.0) return out;
  const auto pinv = pseudo_inverse(interpolate(v, v_after, lambda), tol);
  const RVector coeffs = pinv.eigenvectors.transpose() * dq;
  out.s = coeffs.dot(pinv.inv_eigenvalues.cwiseProduct(coeffs));
  const RVector outside = dq - pinv.eigenvectors * coeffs;
  out.range_residual = outside.norm() / std::max(norm, 1e-300);
  return out;
}

RVector optimal_witness_direction(const RVector& dq, const RMatrix& v, const RMatrix& v_after,
                                  double lambda, double tol) {
  require_sizes(dq, v, v_after);
  return pseudo_inverse(interpolate(v, v_after, lambda), tol).apply(dq);
}

BoundReport bound_B(const RVector& dq, const RMatrix& v, const RMatrix& v_after,
                    const QuadratureRule& quad) {
  validate_covariance_pair(dq, v, v_after);
  BoundReport rep;
  const SLambda simple = s_lambda(dq, v, v_after, 1.0);
  rep.s_simple = simple.s;
  rep.F_of_s = F_closed(simple.s);
  rep.range_residual = simple.range_residual;
  double acc = 0.0;
  for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
    const double l = quad.nodes[k];
    const SLambda sl = s_lambda(dq, v, v_after, l);
    rep.range_residual = std::max(rep.range_residual, sl.range_residual);
    acc += quad.weights[k] * l * bound_integrand(l, sl.s);
  }
  if (rep.range_residual > kRangeResidualTol) {
    rep.flags |= kBoundOutOfRange;
    rep.B = kInf;
  } else {
    rep.B = acc;
  }
  return rep;
}

double bound_B_f(const RVector& dq, const RMatrix& v, const RMatrix& v_after,
                 const WeightFunction& w, const QuadratureRule& quad) {
  validate_covariance_pair(dq, v, v_after);
  double acc = 0.0;
  for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
    const double l = quad.nodes[k];
    const SLambda sl = s_lambda(dq, v, v_after, l);
    if (sl.range_residual > kRangeResidualTol) return kInf;
    acc += quad.weights[k] * w(l) * bound_integrand(l, sl.s);
  }
  return acc;
}

double F_closed(double s) {
  if (std::isnan(s) || s < 0.0) throw ValidationError("F_closed: s must be >= 0");
  if (s == 0.0) return 0.0;
  if (std::isinf(s)) return kInf;
  const double x = std::sqrt(s / (s + 4.0));
  // 1 - x = (1 - x^2) / (1 + x) avoids cancellation as s grows
  const double one_minus_x = (4.0 / (s + 4.0)) / (1.0 + x);
  const double artanh = 0.5 * std::log1p(2.0 * x / one_minus_x);
  return 2.0 * x * artanh;
}

double g_inverse(double y) {
  if (std::isnan(y) || y < 0.0) throw ValidationError("g_inverse: argument must be >= 0");
  if (y == 0.0) return 0.0;
  if (std::isinf(y)) return kInf;
  // x tanh x >= x - 1, so the root lies below y + 1
  double lo = 0.0;
  double hi = std::max(2.0, y + 1.0);
  double x = std::clamp(std::max(std::sqrt(y), y), lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double th = std::tanh(x);
    const double f = x * th - y;
    if (f == 0.0) return x;
    if (f > 0.0) hi = x; else lo = x;
    const double df = th + x * (1.0 - th * th);
    double next = x - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-16 * std::max(1.0, x)) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

double G_of_D(double D) {
  if (std::isnan(D) || D < 0.0) throw ValidationError("G_of_D: D must be >= 0");
  const double sh = std::sinh(g_inverse(0.5 * D));
  return 4.0 * sh * sh;
}

double f_of_D(double D) {
  if (std::isnan(D) || D < 0.0) throw ValidationError("f_of_D: D must be >= 0");
  if (D == 0.0) return kInf;
  return 1.0 / G_of_D(D);
}

double matrix_tur_check(const RMatrix& v, const RVector& dq, double D) {
  if (v.rows() != dq.size() || v.cols() != dq.size())
    throw ValidationError("matrix_tur_check: dimension mismatch");
  if (dq.isZero(0.0)) return symmetric_eig(v).eigenvalues.minCoeff();
  const double f = f_of_D(D);
  const RMatrix m = v - f * dq * dq.transpose();
  return symmetric_eig(0.5 * (m + m.transpose())).eigenvalues.minCoeff();
}

double witness_h(double x, double y, double z, double lambda) {
  if (x == 0.0) return 0.0;
  const double den = (1.0 - lambda) * y + lambda * z + lambda * (1.0 - lambda) * x * x;
  if (den <= 0.0) return kInf;
  return x * x / den;
}

double witness_bound_integral(const RVector& u, const RVector& dq, const RMatrix& v,
                              const RMatrix& v_after, const QuadratureRule& quad) {
  require_sizes(dq, v, v_after);
  if (u.size() != dq.size()) throw ValidationError("witness_bound_integral: direction size mismatch");
  if (u.isZero(0.0)) throw ValidationError("witness_bound_integral: direction must be nonzero");
  const double x = u.dot(dq);
  const double y = u.dot(v_after * u);
  const double z = u.dot(v * u);
  return quad.integrate([&](double l) { return l * witness_h(x, y, z, l); });
}

double robertson_C(const DensityMatrix& rho, const HermitianOperator& q1,
                   const HermitianOperator& q2, double eps) {
  const CMatrix& a = q1.matrix();
  const CMatrix& b = q2.matrix();
  const CMatrix comm = cplx(0, 1) * (a * b - b * a);
  const double num = std::abs(real_trace(rho.matrix() * comm));
  ChargeSet pair;
  pair.charges = {q1, q2};
  const RMatrix v = covariance_matrix(rho, pair);
  const double var_prod = std::max(v(0, 0), 0.0) * std::max(v(1, 1), 0.0);
  return num / (2.0 * std::sqrt(var_prod) + eps);
}

}  // namespace naqtur
