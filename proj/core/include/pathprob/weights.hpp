#pragma once

#include <span>

#include "pathprob/lattice.hpp"
#include "pathprob/potentials.hpp"

namespace pathprob {

enum class StepForm { linear, exponential };

// (s^2+g^2)/((s-c)^2+g^2) - (s^2+g^2)/((s+c)^2+g^2); odd in s, >= 0 for s, c >= 0
double lorentzian_difference(double s, double c, double gamma);

// M(z,s) = -sum_k a_k sin(q_k z + phi_k) D(s, q_k/2)
double step_m(const BandLimitedPotential& p, double z, double s, double gamma);

// R^2 K / (2 pi gamma^2)
double m_bound(const BandLimitedPotential& p, double gamma);

struct MSupremum {
  double value = 0;
  bool certified = true;
};

// sup_s D(s, c) for c > 0
double lorentzian_difference_sup(double c, double gamma, double* argmax = nullptr);

// sum_k |a_k| sup_s D(s, q_k/2), inflated by 1e-9 relative
MSupremum m_sup_certified(const BandLimitedPotential& p, double gamma);

double step_q_linear(const BandLimitedPotential& p, double z, double s, double eps, double gamma);

struct ExponentialStep {
  double value = 0;   // real part, the step factor
  double imag = 0;    // should vanish
  double error_estimate = 0;
  int panels = 0;
};

ExponentialStep step_q_exponential_detail(const BandLimitedPotential& p, double z, double s,
                                          double eps, double gamma);
double step_q_exponential(const BandLimitedPotential& p, double z, double s, double eps,
                          double gamma);

struct PositivityThreshold {
  double lambda_paper = 0;
  double lambda_strict = 0;
  bool unconstrained = false;   // V = 0: every step admissible, both lambdas +inf
  bool certified = true;
};

PositivityThreshold positivity_threshold(const BandLimitedPotential& p, double gamma);

struct StepWitness {
  double z = 0;
  double s = 0;
  double M = 0;
  double Q = 0;
  bool negative = false;
};

// Largest M found on a (z, s) scan seeded at the per-line maximisers; Q at that point for eps.
StepWitness find_negative_step(const BandLimitedPotential& p, double gamma, double eps);

struct WeightEvaluation {
  double W = 0;
  int sign = 0;
  double log_abs_W = 0;
  StepQuantities steps;
  PositivityThreshold lambda;
  bool positive = false;
};

struct SignedLog {
  int sign = 0;
  double log_abs = 0;
};

// log|W| and sign(W) for positions z_0..z_n, without the per-step report
SignedLog path_log_weight(const BandLimitedPotential& p, std::span<const double> z,
                          const LatticeConfig& cfg, StepForm form = StepForm::linear);

WeightEvaluation path_weight(const BandLimitedPotential& p, const Path& path,
                             const LatticeConfig& cfg, StepForm form = StepForm::linear);

} // namespace pathprob
