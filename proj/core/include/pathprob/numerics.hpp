#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace pathprob {

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

// splitmix64; one independent stream per (seed, sample index)
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next();
  double uniform();      // (0, 1), never 0 or 1
  double normal();       // Box-Muller, one draw per call
  double cauchy(double scale);

private:
  std::uint64_t state_;
};

// Pairwise (cascade) summation with a fixed association order.
double pairwise_sum(std::span<const double> v);

struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre rule on [-1, 1].
const GaussRule& gauss_legendre(int points);

// Composite rule on [lo, hi] with `panels` equal panels.
GaussRule composite_gauss(double lo, double hi, int panels, int points);

struct LinearFit {
  double intercept = 0;
  double slope = 0;
  double residual_std = 0;   // sqrt(SSR / (m - 2)), 0 when m == 2
  double intercept_se = 0;
  double slope_se = 0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// Lorentzian 2g/(k^2 + g^2), the Fourier transform of exp(-g|u|).
inline double lorentzian(double k, double g) { return 2.0 * g / (k * k + g * g); }

} // namespace pathprob
