// Quantum divergences: Umegaki relative entropy, the chi^2_lambda family and
// its weight-integral representations of Petz f-divergences.

#pragma once

#include "naqtur/qcore.hpp"

#include <functional>
#include <string>
#include <vector>

namespace naqtur {

// Denominators of the chi^2_lambda spectral sum below this value are replaced
// by it and the result is flagged.
inline constexpr double kChi2DenominatorFloor = 1e-14;
inline constexpr int kDefaultQuadratureOrder = 64;

// Gauss-Legendre rule on [0, 1]. Nodes lie strictly inside the interval.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;

  template <typename F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) acc += weights[k] * f(nodes[k]);
    return acc;
  }
};

QuadratureRule gauss_legendre(int order);

class WeightFunction {
 public:
  enum class Kind { KL, BuresHellinger, Custom };

  // w(lambda) = lambda
  static WeightFunction kl();
  // w(lambda) = sqrt(lambda (1 - lambda)) / pi
  static WeightFunction bures_hellinger();
  static WeightFunction custom(std::string name, std::function<double(double)> w);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double operator()(double lambda) const { return w_(lambda); }

 private:
  WeightFunction(Kind kind, std::string name, std::function<double(double)> w)
      : kind_(kind), name_(std::move(name)), w_(std::move(w)) {}

  Kind kind_;
  std::string name_;
  std::function<double(double)> w_;
};

// Value together with a flag telling whether any chi^2 denominator had to be
// regularised.
struct FlaggedValue {
  double value = 0.0;
  bool regularized = false;
};

// Tr[rho (log rho - log sigma)], both logarithms floored at `floor`.
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                        double floor = kDefaultFloor);

// Tr[(rho - sigma) K^{-1} (rho - sigma)] with K = (1 - lambda) L_rho + lambda R_sigma,
// evaluated in the product eigenbasis of rho and sigma.
FlaggedValue chi2_lambda(const DensityMatrix& rho, const DensityMatrix& sigma, double lambda);

// Spectral evaluation of Tr[sigma^{1/2} f(L_rho R_sigma^{-1}) sigma^{1/2}]:
// sum_ij q_j f(p_i / q_j) |<i_rho | j_sigma>|^2. Throws if sigma is rank deficient.
double petz_f_divergence_spectral(const DensityMatrix& rho, const DensityMatrix& sigma,
                                  const std::function<double(double)>& f);

// sum_k weight_k w(node_k) chi^2_{node_k}(rho || sigma)
FlaggedValue f_divergence_via_weights(const DensityMatrix& rho, const DensityMatrix& sigma,
                                      const WeightFunction& w, const QuadratureRule& quad);

// 1 - Tr(sqrt(rho) sqrt(sigma))
double hellinger_affinity(const DensityMatrix& rho, const DensityMatrix& sigma);

// t log t with the continuous extension 0 at t = 0.
double x_log_x(double t);

}  // namespace naqtur
