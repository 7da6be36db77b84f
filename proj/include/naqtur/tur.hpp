// Currents, symmetrised charge covariances and the matrix thermodynamic
// uncertainty bound
//
//   B(dq, V, V') = int_0^1 lambda s_lambda / (1 + lambda (1 - lambda) s_lambda) dlambda,
//   s_lambda     = dq^T ((1 - lambda) V' + lambda V)^+ dq,
//
// together with its symmetric-covariance closed form F(s), the inverse G = F^{-1},
// the PSD form V - f(D) dq dq^T >= 0 and the scalar witness integrals.

#pragma once

#include "naqtur/divergence.hpp"
#include "naqtur/qcore.hpp"

#include <limits>
#include <string>
#include <vector>

namespace naqtur {

// Relative eigenvalue cutoff of the Moore-Penrose inverse of V_lambda.
inline constexpr double kPinvCutoff = 1e-12;
// A current with a larger relative component outside range(V_lambda) is flagged.
inline constexpr double kRangeResidualTol = 1e-8;
// Robertson ratio regulator.
inline constexpr double kRobertsonEps = 1e-15;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct ChargeSet {
  std::vector<HermitianOperator> charges;
  Mat3 frame = Mat3::Identity();  // rotation that produced the charge axes
  std::vector<std::string> labels;

  std::size_t size() const { return charges.size(); }
};

// Q_u = (e_u . sigma) / 2 for each column e_u of `axes` (3 x m).
ChargeSet spin_charges(const Eigen::Matrix<double, 3, Eigen::Dynamic>& axes, const Mat3& frame,
                       std::vector<std::string> labels = {});
// (sigma_x / 2, sigma_z / 2)
ChargeSet default_charges();

// dq_u = Tr[(rho_after - rho_before) Q_u]
RVector current_vector(const DensityMatrix& rho_before, const DensityMatrix& rho_after,
                       const ChargeSet& charges);

// V_uv = Tr[tau {dQ_u, dQ_v}] / 2 with dQ_u = Q_u - <Q_u>_tau.
RMatrix covariance_matrix(const DensityMatrix& tau, const ChargeSet& charges);

// Throws ValidationError unless V and V' are square, of matching size, symmetric
// and PSD within 1e-10.
void validate_covariance_pair(const RVector& dq, const RMatrix& v, const RMatrix& v_after);

struct SLambda {
  double s = 0.0;
  double range_residual = 0.0;  // ||(I - P_range) dq|| / ||dq||
};

// V_lambda = (1 - lambda) V' + lambda V; eigenvalues below tol * lambda_max are dropped.
SLambda s_lambda(const RVector& dq, const RMatrix& v, const RMatrix& v_after, double lambda,
                 double tol = kPinvCutoff);

// M_lambda^+ dq, the maximiser of the witness quotient at fixed lambda.
RVector optimal_witness_direction(const RVector& dq, const RMatrix& v, const RMatrix& v_after,
                                  double lambda, double tol = kPinvCutoff);

enum BoundFlag : unsigned {
  kBoundOutOfRange = 1u << 0,
};

struct BoundReport {
  double B = 0.0;
  double s_simple = 0.0;  // dq^T V^+ dq
  double F_of_s = 0.0;
  double range_residual = 0.0;  // max over quadrature nodes and lambda = 1
  unsigned flags = 0;

  bool out_of_range() const { return (flags & kBoundOutOfRange) != 0; }
};

// B is reported as +inf with kBoundOutOfRange set when dq leaves the range of V_lambda
// at any node.
BoundReport bound_B(const RVector& dq, const RMatrix& v, const RMatrix& v_after,
                    const QuadratureRule& quad);

// Same integrand with a general Petz weight. Returns +inf when out of range.
double bound_B_f(const RVector& dq, const RMatrix& v, const RMatrix& v_after,
                 const WeightFunction& w, const QuadratureRule& quad);

// 2 sqrt(s/(s+4)) artanh sqrt(s/(s+4)); throws for s < 0.
double F_closed(double s);

// Inverse of x -> x tanh x on [0, inf).
double g_inverse(double y);

// G = F^{-1}, G(D) = 4 sinh^2(g(D/2)). Throws for D < 0.
double G_of_D(double D);
// f(D) = 1 / G(D); +inf at D = 0.
double f_of_D(double D);

// Minimum eigenvalue of V - f(D) dq dq^T.
double matrix_tur_check(const RMatrix& v, const RVector& dq, double D);

// x^2 / ((1 - lambda) y + lambda z + lambda (1 - lambda) x^2); +inf on a zero
// denominator with x != 0.
double witness_h(double x, double y, double z, double lambda);

// int_0^1 lambda h_lambda(u.dq, u^T V' u, u^T V u) dlambda
double witness_bound_integral(const RVector& u, const RVector& dq, const RMatrix& v,
                              const RMatrix& v_after, const QuadratureRule& quad);

// |Tr(rho i[Q1, Q2])| / (2 sqrt(V11 V22) + eps)
double robertson_C(const DensityMatrix& rho, const HermitianOperator& q1,
                   const HermitianOperator& q2, double eps = kRobertsonEps);

}  // namespace naqtur
