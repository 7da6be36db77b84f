#include "naqtur/divergence.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace naqtur {

namespace {

// Shared spectral data for chi^2_lambda at many lambda values.
class Chi2Spectrum {
 public:
  Chi2Spectrum(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw ValidationError("chi2_lambda: dimension mismatch");
    const auto er = hermitian_eig(rho.op());
    const auto es = hermitian_eig(sigma.op());
    p_ = er.eigenvalues;
    q_ = es.eigenvalues;
    const CMatrix m = er.eigenvectors.adjoint() * (rho.matrix() - sigma.matrix()) * es.eigenvectors;
    m2_ = m.cwiseAbs2();
  }

  FlaggedValue operator()(double lambda) const {
    FlaggedValue out;
    for (Eigen::Index i = 0; i < p_.size(); ++i) {
      for (Eigen::Index j = 0; j < q_.size(); ++j) {
        double den = (1.0 - lambda) * p_(i) + lambda * q_(j);
        if (den < kChi2DenominatorFloor) {
          den = kChi2DenominatorFloor;
          out.regularized = true;
        }
        out.value += m2_(i, j) / den;
      }
    }
    return out;
  }

 private:
  RVector p_, q_;
  RMatrix m2_;
};

}  // namespace

QuadratureRule gauss_legendre(int order) {
  if (order < 2) throw ValidationError("gauss_legendre: order must be >= 2");
  QuadratureRule rule;
  rule.order = order;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const int n = order;
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1, 1] -> [0, 1]; x is descending in i
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = 0.5 * (1.0 - x);
    rule.nodes[hi] = 0.5 * (1.0 + x);
    rule.weights[lo] = 0.5 * w;
    rule.weights[hi] = 0.5 * w;
  }
  return rule;
}

WeightFunction WeightFunction::kl() {
  return WeightFunction(Kind::KL, "kl", [](double l) { return l; });
}

WeightFunction WeightFunction::bures_hellinger() {
  return WeightFunction(Kind::BuresHellinger, "bures-hellinger", [](double l) {
    return std::sqrt(std::max(l * (1.0 - l), 0.0)) / std::numbers::pi;
  });
}

WeightFunction WeightFunction::custom(std::string name, std::function<double(double)> w) {
  return WeightFunction(Kind::Custom, std::move(name), std::move(w));
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma, double floor) {
  if (rho.dim() != sigma.dim()) throw ValidationError("relative_entropy: dimension mismatch");
  const CMatrix diff = matrix_log_psd(rho, floor).matrix() - matrix_log_psd(sigma, floor).matrix();
  return real_trace(rho.matrix() * diff);
}

FlaggedValue chi2_lambda(const DensityMatrix& rho, const DensityMatrix& sigma, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw ValidationError("chi2_lambda: lambda must lie in (0, 1)");
  return Chi2Spectrum(rho, sigma)(lambda);
}

double petz_f_divergence_spectral(const DensityMatrix& rho, const DensityMatrix& sigma,
                                  const std::function<double(double)>& f) {
  if (rho.dim() != sigma.dim())
    throw ValidationError("petz_f_divergence_spectral: dimension mismatch");
  const auto er = hermitian_eig(rho.op());
  const auto es = hermitian_eig(sigma.op());
  if (!(es.eigenvalues.minCoeff() > 0.0))
    throw ValidationError("petz_f_divergence_spectral: sigma must be full rank");
  const RMatrix overlap = (er.eigenvectors.adjoint() * es.eigenvectors).cwiseAbs2();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < er.eigenvalues.size(); ++i) {
    const double p = std::max(er.eigenvalues(i), 0.0);
    for (Eigen::Index j = 0; j < es.eigenvalues.size(); ++j) {
      const double q = es.eigenvalues(j);
      acc += q * f(p / q) * overlap(i, j);
    }
  }
  return acc;
}

FlaggedValue f_divergence_via_weights(const DensityMatrix& rho, const DensityMatrix& sigma,
                                      const WeightFunction& w, const QuadratureRule& quad) {
  const Chi2Spectrum chi2(rho, sigma);
  FlaggedValue out;
  for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
    const double l = quad.nodes[k];
    const FlaggedValue c = chi2(l);
    out.value += quad.weights[k] * w(l) * c.value;
    out.regularized = out.regularized || c.regularized;
  }
  return out;
}

double hellinger_affinity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw ValidationError("hellinger_affinity: dimension mismatch");
  return 1.0 - real_trace(matrix_sqrt_psd(rho).matrix() * matrix_sqrt_psd(sigma).matrix());
}

double x_log_x(double t) { return t > 0.0 ? t * std::log(t) : 0.0; }

}  // namespace naqtur
