// Self-check suite run by `naqtur verify`: every module invariant evaluated on
// seeded random inputs, reported as one row per check.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace naqtur {

struct VerifyOptions {
  int quadrature_order = 64;
  std::uint64_t seed = 0;
  int samples = 300;  // random draws per check; collision checks use twice as many
};

struct CheckResult {
  std::string module;
  std::string name;
  double residual = 0.0;   // worst observed value of the checked quantity
  double tolerance = 0.0;  // threshold it is compared against
  bool passed = false;
  std::string note;
};

// Accuracy model for the lambda integrals at reduced order. At order >= 64 these
// return the base tolerance unchanged.
double kl_integral_tolerance(int order, double divergence);
double closed_form_tolerance(int order);
double bures_hellinger_tolerance(int order);

std::vector<CheckResult> run_verify_suite(const VerifyOptions& options);

}  // namespace naqtur
