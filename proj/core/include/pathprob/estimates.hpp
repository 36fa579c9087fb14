#pragma once

#include <complex>
#include <string>
#include <vector>

namespace pathprob {

struct RefinementLevel {
  int points_per_dim = 0;
  double value = 0;
  double delta = 0;   // change from the previous (coarser) level; 0 for the first
};

struct TransitionEstimate {
  double value = 0;
  double std_error = 0;
  std::string method;
  int n = 0;
  double eps = 0;
  double gamma = 0;

  std::vector<RefinementLevel> refinement;   // quadrature only, coarse to fine
  double boundary_mass = 0;
};

struct KernelEstimate {
  std::complex<double> amplitude;
  double modulus_squared = 0;
  double error_estimate = 0;

  static KernelEstimate of(std::complex<double> a, double err = 0.0) {
    return {a, std::norm(a), err};
  }
};

} // namespace pathprob
