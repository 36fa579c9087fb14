#pragma once

#include <span>

#include "pathprob/estimates.hpp"
#include "pathprob/lattice.hpp"
#include "pathprob/potentials.hpp"
#include "pathprob/weights.hpp"

namespace pathprob {

struct Window {
  double lo = 0;
  double hi = 0;

  bool contains(double z) const { return z >= lo && z <= hi; }
  double width() const { return hi - lo; }
};

// Covers both endpoints with a margin of 15/gamma.
Window default_window(const LatticeConfig& cfg);

struct QuadratureOptions {
  int refinements = 2;       // coarser nested levels reported below points_per_dim
  double t_max = 0;          // 0: chosen from (n, eps, gamma)
  StepForm form = StepForm::linear;
  double max_boundary_mass = 1e-4;
};

inline constexpr int max_quadrature_n = 6;

// Tensor trapezoid grid in t_j = asinh(s_j / gamma). points_per_dim must be odd for
// the nested refinement levels (ppd-1)/2^k + 1.
TransitionEstimate transition_probability_quadrature(const BandLimitedPotential& p,
                                                     const LatticeConfig& cfg, const Window& window,
                                                     int points_per_dim,
                                                     const QuadratureOptions& opt = {});

enum class Regularizer { gaussian, laplace };

inline constexpr int max_amplitude_n = 4;

// Iterated transfer over Gauss-Legendre panels of the nearest-neighbour chirps.
KernelEstimate amplitude_discrete(const BandLimitedPotential& p, const LatticeConfig& cfg,
                                  Regularizer reg);

TransitionEstimate probability_from_amplitude(const KernelEstimate& k);

// |A|^2 in the (z,u) variables: u-integrals analytic, z-integrals numeric. n <= 3, <= 3 lines.
double product_form_probability(const BandLimitedPotential& p, const LatticeConfig& cfg,
                                Regularizer reg);

struct GammaExtrapolation {
  double value = 0;      // intercept at gamma = 0
  double slope = 0;
  double residual = 0;   // residual standard error of the fit
  double intercept_se = 0;
};

GammaExtrapolation extrapolate_gamma(std::span<const double> gammas, std::span<const double> values);

} // namespace pathprob
