#include "pathprob/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <string>


#include "pathprob/errors.hpp"
#include "pathprob/numerics.hpp"
#include "fft.hpp"

namespace pathprob {

BandLimitedPotential BandLimitedPotential::from_lines(std::vector<SpectralLine> lines,
                                                      std::optional<double> R,
                                                      std::optional<double> K) {
  BandLimitedPotential p;
  double qmax = 0, sum_a = 0;
  for (const auto& l : lines) {
    if (!std::isfinite(l.q) || !std::isfinite(l.a) || !std::isfinite(l.phi))
      throw UsageError("spectral line with non-finite field");
    if (l.q <= 0) throw UsageError("spectral line wavenumber must be > 0");
    if (l.a == 0) continue;
    qmax = std::max(qmax, l.q);
    sum_a += std::abs(l.a);
    p.lines_.push_back(l);
  }
  p.R_ = R.value_or(qmax);
  if (p.R_ < qmax) throw UsageError("R = " + std::to_string(p.R_) + " below a line at q = " + std::to_string(qmax));
  double k_exact = two_pi * sum_a;
  p.K_ = K.value_or(k_exact);
  if (p.K_ < k_exact * (1 - 1e-12))
    throw UsageError("K = " + std::to_string(p.K_) + " below 2 pi sum|a| = " + std::to_string(k_exact));
  return p;
}

BandLimitedPotential BandLimitedPotential::from_grid(SpectralGrid grid, std::optional<double> K) {
  if (grid.values.empty() || grid.values.size() % 2 == 0)
    throw UsageError("spectral grid needs 2M+1 values");
  const int M = grid.half_width();
  if (M > 0 && !(grid.qmax > 0)) throw UsageError("spectral grid needs qmax > 0");

  double scale = 0;
  for (auto v : grid.values) scale = std::max(scale, std::abs(v));
  if (std::abs(grid.values[M].imag()) > 1e-10 * scale)
    throw UsageError("spectral grid is not Hermitian at m = 0");
  for (int m = 1; m <= M; ++m) {
    auto vp = grid.values[M + m], vm = grid.values[M - m];
    if (std::abs(vm - std::conj(vp)) > 1e-10 * scale)
      throw UsageError("spectral grid is not Hermitian at m = " + std::to_string(m));
  }

  const double dq = grid.dq();
  std::vector<SpectralLine> lines;
  double R = 0;
  for (int m = 1; m <= M; ++m) {
    auto v = 0.5 * (grid.values[M + m] + std::conj(grid.values[M - m]));
    double a = dq * std::abs(v) / pi;
    if (a == 0) continue;
    lines.push_back({m * dq, a, -std::arg(v)});
    R = m * dq;
  }
  grid.values[M] = 0;   // q = 0 is a shift of the energy zero

  BandLimitedPotential p = from_lines(std::move(lines));
  // rectangle rule of the inverse transform; the same rule defines V
  double k_rule = 0;
  for (int m = -M; m <= M; ++m) k_rule += dq * std::abs(grid.values[M + m]);
  p.K_ = K.value_or(k_rule);
  if (p.K_ < k_rule * (1 - 1e-10)) throw UsageError("K below the integral of |Vt| over the grid");
  p.R_ = R;
  p.grid_ = std::move(grid);
  return p;
}

BandLimitedPotential BandLimitedPotential::cosine(double a, double q, double phi) {
  return from_lines({{q, a, phi}});
}

double BandLimitedPotential::operator()(double x) const {
  double v = 0;
  for (const auto& l : lines_) v += l.a * std::cos(l.q * x + l.phi);
  return v;
}

double BandLimitedPotential::derivative(double x) const {
  double v = 0;
  for (const auto& l : lines_) v -= l.a * l.q * std::sin(l.q * x + l.phi);
  return v;
}

double BandLimitedPotential::antisymmetric_difference(double z, double u) const {
  double v = 0;
  for (const auto& l : lines_) v += 2 * l.a * std::sin(l.q * z + l.phi) * std::sin(0.5 * l.q * u);
  return v;
}

double BandLimitedPotential::sup_abs() const {
  double s = 0;
  for (const auto& l : lines_) s += std::abs(l.a);
  return s;
}

bool BandLimitedPotential::is_even() const {
  return std::all_of(lines_.begin(), lines_.end(), [](const SpectralLine& l) { return l.phi == 0; });
}

double evaluate_potential(const BandLimitedPotential& p, double x) { return p(x); }

double force_bound(const BandLimitedPotential& p) { return p.R() * p.K() / two_pi; }

double reconstruction_imag(const BandLimitedPotential& p, double x) {
  if (!p.is_grid()) return 0.0;
  const auto& g = *p.grid();
  const int M = g.half_width();
  const double dq = g.dq();
  std::complex<double> acc = 0;
  for (int m = -M; m <= M; ++m) acc += g.values[M + m] * std::polar(1.0, -x * m * dq);
  return (dq / two_pi * acc).imag();
}

BandLimitResult band_limit(std::span<const double> samples, double x0, double h, double R) {
  const std::size_t N = samples.size();
  if (N < 4) throw UsageError("band_limit: need at least 4 samples");
  if (!(h > 0)) throw UsageError("band_limit: sample spacing must be > 0");
  if (!(R >= 0)) throw UsageError("band_limit: R must be >= 0");
  if (R > pi / h)
    throw UsageError("band_limit: R = " + std::to_string(R) + " exceeds the Nyquist wavenumber " +
                     std::to_string(pi / h));

  std::vector<std::complex<double>> data(samples.begin(), samples.end());
  detail::FftPlan(data, FFTW_BACKWARD).execute();

  const double dq = two_pi / (static_cast<double>(N) * h);
  int M = static_cast<int>(std::floor(R / dq * (1 + 1e-12)));
  M = std::min<int>(M, static_cast<int>((N - 1) / 2));

  BandLimitResult out;
  out.offset = data[0].real() / static_cast<double>(N);

  SpectralGrid grid;
  grid.qmax = M * dq;
  grid.values.assign(2 * M + 1, 0.0);
  for (int m = 1; m <= M; ++m) {
    double q = m * dq;
    auto vp = h * std::polar(1.0, x0 * q) * data[m];
    grid.values[M + m] = vp;
    grid.values[M - m] = std::conj(vp);
  }
  out.modes = M;
  if (M == 0) {
    out.potential = BandLimitedPotential{};
  } else {
    out.potential = BandLimitedPotential::from_grid(std::move(grid));
  }

  double err = 0;
  for (std::size_t i = 0; i < N; ++i) {
    double x = x0 + static_cast<double>(i) * h;
    err = std::max(err, std::abs(out.potential(x) - (samples[i] - out.offset)));
  }
  out.linf_error = err;
  return out;
}

} // namespace pathprob
