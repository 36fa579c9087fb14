#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include "pathprob/estimates.hpp"
#include "pathprob/potentials.hpp"

namespace pathprob {

struct OracleSettings {
  double X = 30.0;     // domain [-X, X), periodic
  std::size_t L = 2048;
  double dt = 0.0;     // 0: largest step allowed by the guards
};

struct WavefunctionGrid {
  double X = 0;
  double dx = 0;
  std::vector<double> x;
  std::vector<std::complex<double>> psi;
  double t = 0;

  static WavefunctionGrid make(double X, std::size_t L);
  double norm() const;
  // trigonometric interpolation of psi at an arbitrary point
  std::complex<double> at(double xq) const;
};

// Unit-integral Gaussian of width sigma0, i.e. the free kernel at imaginary time.
WavefunctionGrid gaussian_state(double X, std::size_t L, double center, double sigma0);

struct PropagateOptions {
  double energy_shift = 0;   // V -> V + c
};

// Strang split-step, periodic.
WavefunctionGrid propagate(const WavefunctionGrid& psi0, const BandLimitedPotential& p, double T,
                           double dt, const PropagateOptions& opt = {});

// <psi| -d^2/2 + V |psi> / <psi|psi>
double energy(const WavefunctionGrid& g, const BandLimitedPotential& p);

// Largest dt passing all guards for this grid and potential.
double max_stable_dt(const WavefunctionGrid& grid, const BandLimitedPotential& p,
                     double energy_shift = 0.0);

// (2 pi i T)^(-1/2) exp(i dz^2 / (2T)), analytic in both arguments (principal root).
std::complex<double> free_kernel(std::complex<double> dz, std::complex<double> T);

KernelEstimate free_kernel_exact(double za, double zb, double T);

struct OracleKernel {
  KernelEstimate kernel;
  std::vector<double> sigmas;
  std::vector<std::complex<double>> corrected;   // per sigma0, after smearing correction
  double residual = 0;                           // |extrapolated - finest|
  bool monotone = true;
};

OracleKernel kernel_estimate(const BandLimitedPotential& p, double za, double zb, double T,
                             const std::vector<double>& sigmas, const OracleSettings& s = {});

enum class CkSource { oracle, pathweight, amplitude };

struct CkResult {
  double lhs = 0;
  double rhs = 0;
  double residual = 0;
  double truncation = 0;   // |lhs(W) - lhs(W/2)| / |lhs(W)|
  bool converged = false;
};

struct CkOptions {
  // probability sources: the smearing correction amplifies roundoff as exp(x^2 / 2 sigma(t)^2)
  double window_half_width = 4.0;
  double amplitude_window_half_width = 12.0;
  double sigma0 = 0.2;   // amplitude control smearing width
  std::vector<double> sigmas{0.3, 0.2, 0.15};
  OracleSettings oracle{};
  // pathweight source
  int n_per_leg = 2;
  double gamma = 0.1;
  int points_per_dim = 129;
  int window_nodes = 121;
};

// Probability sources report non-convergence instead of throwing, the lhs of the
// probability composition grows with the window by construction.
CkResult ck_check(const BandLimitedPotential& p, double za, double ta, double tc, double zb,
                  double tb, CkSource source, const CkOptions& opt = {});

void write_wavefunction_csv(std::ostream& os, const WavefunctionGrid& g);
void write_wavefunction_binary(std::ostream& os, const WavefunctionGrid& g);

} // namespace pathprob
