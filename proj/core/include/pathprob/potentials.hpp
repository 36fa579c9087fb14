#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace pathprob {

// V(x) contribution a*cos(q*x + phi)
struct SpectralLine {
  double q = 0;
  double a = 0;
  double phi = 0;
};

// Samples of the transform at q_m = m*qmax/M, m = -M..M (2M+1 values).
// V(x) = (dq/2pi) sum_m Vt_m exp(-i x q_m), the rectangle rule of the inverse transform.
struct SpectralGrid {
  double qmax = 0;
  std::vector<std::complex<double>> values;

  int half_width() const { return static_cast<int>(values.size() / 2); }
  double dq() const { return half_width() > 0 ? qmax / half_width() : 0.0; }
};

class BandLimitedPotential {
public:
  BandLimitedPotential() = default;

  // R and K default to max q_k and 2*pi*sum|a_k|; explicit values are validated.
  static BandLimitedPotential from_lines(std::vector<SpectralLine> lines,
                                         std::optional<double> R = std::nullopt,
                                         std::optional<double> K = std::nullopt);
  static BandLimitedPotential from_grid(SpectralGrid grid, std::optional<double> K = std::nullopt);
  static BandLimitedPotential cosine(double a, double q, double phi = 0.0);

  double operator()(double x) const;
  double derivative(double x) const;
  // V(z - u/2) - V(z + u/2)
  double antisymmetric_difference(double z, double u) const;

  // Lines always exist; for a grid they are derived from the Hermitian pairs.
  const std::vector<SpectralLine>& lines() const { return lines_; }
  const std::optional<SpectralGrid>& grid() const { return grid_; }
  bool is_grid() const { return grid_.has_value(); }
  bool is_zero() const { return lines_.empty(); }

  double R() const { return R_; }
  double K() const { return K_; }
  double sup_abs() const;   // sum |a_k| >= sup |V|
  bool is_even() const;     // all phases zero

private:
  std::vector<SpectralLine> lines_;
  std::optional<SpectralGrid> grid_;
  double R_ = 0;
  double K_ = 0;
};

double evaluate_potential(const BandLimitedPotential& p, double x);

// R*K/(2 pi) >= sup |V'|
double force_bound(const BandLimitedPotential& p);

// Imaginary part of the reconstruction from the grid samples (zero for lines).
double reconstruction_imag(const BandLimitedPotential& p, double x);

struct BandLimitResult {
  BandLimitedPotential potential;
  double offset = 0;       // dropped q = 0 component (sample mean)
  double linf_error = 0;   // max |V_R(x_i) - (v_i - offset)| on the sample grid
  int modes = 0;           // retained positive wavenumbers
};

// Samples v_i at x0 + i*h. Keeps 0 < |q_m| <= R of the DFT, Nyquist excluded.
BandLimitResult band_limit(std::span<const double> samples, double x0, double h, double R);

} // namespace pathprob
