#include "pathprob/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "fft.hpp"
#include "pathprob/errors.hpp"
#include "pathprob/numerics.hpp"
#include "pathprob/quadrature.hpp"

namespace pathprob {

namespace {

using cplx = std::complex<double>;

std::vector<double> wavenumbers(std::size_t L, double dx) {
  std::vector<double> k(L);
  const double dk = two_pi / (static_cast<double>(L) * dx);
  for (std::size_t m = 0; m < L; ++m) {
    long mm = m < (L + 1) / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(L);
    k[m] = dk * static_cast<double>(mm);
  }
  return k;
}

double sup_potential(const BandLimitedPotential& p, double shift) { return p.sup_abs() + std::abs(shift); }

void check_guards(const WavefunctionGrid& g, const BandLimitedPotential& p, double dt, double shift) {
  const double vmax = sup_potential(p, shift);
  const double kin = 0.5 * (pi / g.dx) * (pi / g.dx);
  if (g.dx * p.R() > 0.5)
    throw NumericError("oracle: dx*R = " + std::to_string(g.dx * p.R()) + " > 0.5; refine the grid");
  if (dt * vmax > 0.1 || dt * kin > 0.5)
    throw NumericError("oracle: dt = " + std::to_string(dt) + " violates the phase-step guards; use dt <= " +
                       std::to_string(max_stable_dt(g, p, shift)));
}

} // namespace

WavefunctionGrid WavefunctionGrid::make(double X, std::size_t L) {
  if (!(X > 0) || L < 16) throw UsageError("oracle grid: need X > 0 and L >= 16");
  WavefunctionGrid g;
  g.X = X;
  g.dx = 2 * X / static_cast<double>(L);
  g.x.resize(L);
  for (std::size_t i = 0; i < L; ++i) g.x[i] = -X + static_cast<double>(i) * g.dx;
  g.psi.assign(L, 0.0);
  return g;
}

double WavefunctionGrid::norm() const {
  double acc = 0;
  for (auto v : psi) acc += std::norm(v);
  return acc * dx;
}

cplx WavefunctionGrid::at(double xq) const {
  const std::size_t L = psi.size();
  std::vector<cplx> hat(psi);
  detail::FftPlan(hat, FFTW_FORWARD).execute();
  const double dk = two_pi / (static_cast<double>(L) * dx);
  const double r = xq - x[0];
  cplx acc = 0;
  for (std::size_t m = 0; m < L; ++m) {
    long mm = m < (L + 1) / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(L);
    if (L % 2 == 0 && m == L / 2) {
      acc += hat[m] * std::cos(dk * static_cast<double>(m) * r);
      continue;
    }
    acc += hat[m] * std::polar(1.0, dk * static_cast<double>(mm) * r);
  }
  return acc / static_cast<double>(L);
}

WavefunctionGrid gaussian_state(double X, std::size_t L, double center, double sigma0) {
  WavefunctionGrid g = WavefunctionGrid::make(X, L);
  if (!(sigma0 >= 4 * g.dx)) throw UsageError("oracle: sigma0 = " + std::to_string(sigma0) + " below 4 dx");
  const double c = 1.0 / std::sqrt(two_pi * sigma0 * sigma0);
  for (std::size_t i = 0; i < L; ++i) {
    double d = g.x[i] - center;
    g.psi[i] = c * std::exp(-d * d / (2 * sigma0 * sigma0));
  }
  return g;
}

double max_stable_dt(const WavefunctionGrid& grid, const BandLimitedPotential& p, double energy_shift) {
  const double vmax = sup_potential(p, energy_shift);
  double dt = 0.5 / (0.5 * (pi / grid.dx) * (pi / grid.dx));
  if (vmax > 0) dt = std::min(dt, 0.1 / vmax);
  return dt;
}

WavefunctionGrid propagate(const WavefunctionGrid& psi0, const BandLimitedPotential& p, double T,
                           double dt, const PropagateOptions& opt) {
  if (T < 0) throw UsageError("propagate: T must be >= 0");
  if (!(dt > 0)) throw UsageError("propagate: dt must be > 0");
  WavefunctionGrid g = psi0;
  if (T == 0) return g;
  const long steps = std::max(1L, static_cast<long>(std::ceil(T / dt - 1e-9)));
  const double h = T / static_cast<double>(steps);
  check_guards(g, p, h, opt.energy_shift);

  const std::size_t L = g.psi.size();
  const std::vector<double> k = wavenumbers(L, g.dx);
  std::vector<cplx> half_v(L), full_v(L), kin(L);
  for (std::size_t i = 0; i < L; ++i) {
    double v = p(g.x[i]) + opt.energy_shift;
    half_v[i] = std::polar(1.0, -0.5 * h * v);
    full_v[i] = std::polar(1.0, -h * v);
    kin[i] = std::polar(1.0, -0.5 * h * k[i] * k[i]) / static_cast<double>(L);
  }

  std::vector<cplx>& psi = g.psi;
  detail::FftPlan fwd(psi, FFTW_FORWARD);
  detail::FftPlan bwd(psi, FFTW_BACKWARD);
  for (std::size_t i = 0; i < L; ++i) psi[i] *= half_v[i];
  for (long n = 0; n < steps; ++n) {
    fwd.execute();
    for (std::size_t i = 0; i < L; ++i) psi[i] *= kin[i];
    bwd.execute();
    const auto& pot = n + 1 < steps ? full_v : half_v;
    for (std::size_t i = 0; i < L; ++i) psi[i] *= pot[i];
  }
  g.t = psi0.t + T;
  return g;
}

double energy(const WavefunctionGrid& g, const BandLimitedPotential& p) {
  const std::size_t L = g.psi.size();
  std::vector<cplx> hat(g.psi);
  detail::FftPlan(hat, FFTW_FORWARD).execute();
  const std::vector<double> k = wavenumbers(L, g.dx);
  double kinetic = 0, norm_k = 0;
  for (std::size_t m = 0; m < L; ++m) {
    kinetic += 0.5 * k[m] * k[m] * std::norm(hat[m]);
    norm_k += std::norm(hat[m]);
  }
  double pot = 0, norm_x = 0;
  for (std::size_t i = 0; i < L; ++i) {
    pot += p(g.x[i]) * std::norm(g.psi[i]);
    norm_x += std::norm(g.psi[i]);
  }
  return kinetic / norm_k + pot / norm_x;
}

cplx free_kernel(cplx dz, cplx T) {
  return std::exp(cplx(0, 1) * dz * dz / (2.0 * T)) / std::sqrt(cplx(0, two_pi) * T);
}

KernelEstimate free_kernel_exact(double za, double zb, double T) {
  if (!(T > 0)) throw UsageError("free_kernel_exact: T must be > 0");
  return KernelEstimate::of(free_kernel(zb - za, T));
}

namespace {

// Linear extrapolation in sigma^2 of complex samples; exact through two points.
cplx extrapolate_sigma2(const std::vector<double>& sigmas, const std::vector<cplx>& v) {
  std::vector<double> x, re, im;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    x.push_back(sigmas[i] * sigmas[i]);
    re.push_back(v[i].real());
    im.push_back(v[i].imag());
  }
  return {fit_line(x, re).intercept, fit_line(x, im).intercept};
}

double spread(double sigma0, double T) { return std::sqrt(sigma0 * sigma0 + T * T / (4 * sigma0 * sigma0)); }

void check_domain(const OracleSettings& s, double zmax, double sigma0, double T) {
  double need = zmax + 5 * spread(sigma0, T);
  if (s.X < need)
    throw UsageError("oracle: domain half-width " + std::to_string(s.X) + " below " + std::to_string(need) +
                     " (endpoints + 5 dispersion widths)");
}

// corrected[i][x] for every grid node: smeared kernel from `center` divided by the free smearing
std::vector<std::vector<cplx>> corrected_kernels(const BandLimitedPotential& p, double center, double T,
                                                 const std::vector<double>& sigmas,
                                                 const OracleSettings& s) {
  std::vector<std::vector<cplx>> out(sigmas.size());
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    WavefunctionGrid g0 = gaussian_state(s.X, s.L, center, sigmas[i]);
    double dt = s.dt > 0 ? s.dt : max_stable_dt(g0, p);
    WavefunctionGrid g = propagate(g0, p, T, dt);
    const cplx Ts(T, -sigmas[i] * sigmas[i]);
    out[i].resize(s.L);
    for (std::size_t j = 0; j < s.L; ++j) {
      double d = g.x[j] - center;
      out[i][j] = g.psi[j] * free_kernel(d, T) / free_kernel(d, Ts);
    }
  }
  return out;
}

} // namespace

OracleKernel kernel_estimate(const BandLimitedPotential& p, double za, double zb, double T,
                             const std::vector<double>& sigmas, const OracleSettings& s) {
  if (!(T > 0)) throw UsageError("kernel_estimate: T must be > 0");
  if (sigmas.size() < 2) throw UsageError("kernel_estimate: need at least two sigma0 values");
  std::vector<double> sig(sigmas);
  std::sort(sig.begin(), sig.end(), std::greater<>());
  if (std::adjacent_find(sig.begin(), sig.end()) != sig.end())
    throw UsageError("kernel_estimate: sigma0 values must be distinct");
  check_domain(s, std::max(std::abs(za), std::abs(zb)), sig.back(), T);

  OracleKernel out;
  out.sigmas = sig;
  out.corrected.resize(sig.size());
  for (std::size_t i = 0; i < sig.size(); ++i) {
    WavefunctionGrid g0 = gaussian_state(s.X, s.L, za, sig[i]);
    double dt = s.dt > 0 ? s.dt : max_stable_dt(g0, p);
    WavefunctionGrid g = propagate(g0, p, T, dt);
    out.corrected[i] = g.at(zb) * free_kernel(zb - za, T) / free_kernel(zb - za, cplx(T, -sig[i] * sig[i]));
  }
  cplx a = extrapolate_sigma2(sig, out.corrected);
  out.residual = std::abs(a - out.corrected.back());
  double prev = std::abs(out.corrected.front() - a);
  for (std::size_t i = 1; i < sig.size(); ++i) {
    double d = std::abs(out.corrected[i] - a);
    if (d > prev * (1 + 1e-9) + 1e-14) out.monotone = false;
    prev = d;
  }
  out.kernel = KernelEstimate::of(a, out.residual);
  return out;
}

namespace {

double trapezoid(const std::vector<double>& f, double h, std::size_t lo, std::size_t hi) {
  double acc = 0;
  for (std::size_t i = lo; i <= hi; ++i) acc += (i == lo || i == hi ? 0.5 : 1.0) * f[i];
  return acc * h;
}

CkResult finish(double lhs_full, double lhs_half, double rhs) {
  CkResult r;
  r.lhs = lhs_full;
  r.rhs = rhs;
  r.residual = std::abs(lhs_full - rhs) / std::abs(rhs);
  r.truncation = std::abs(lhs_full - lhs_half) / std::abs(lhs_full);
  r.converged = r.truncation <= 1e-3;
  return r;
}

} // namespace

CkResult ck_check(const BandLimitedPotential& p, double za, double ta, double tc, double zb, double tb,
                  CkSource source, const CkOptions& opt) {
  if (!(ta < tc && tc < tb)) throw UsageError("ck_check: need ta < tc < tb");
  const double t1 = tc - ta, t2 = tb - tc;
  const double mid = 0.5 * (za + zb);

  if (source == CkSource::amplitude) {
    const OracleSettings& s = opt.oracle;
    check_domain(s, std::max(std::abs(za), std::abs(zb)), opt.sigma0, tb - ta);
    WavefunctionGrid ga = gaussian_state(s.X, s.L, za, opt.sigma0);
    WavefunctionGrid gb = gaussian_state(s.X, s.L, zb, opt.sigma0);
    double dt = s.dt > 0 ? s.dt : max_stable_dt(ga, p);
    WavefunctionGrid psi1 = propagate(ga, p, t1, dt);
    WavefunctionGrid psi2 = propagate(gb, p, t2, dt);
    WavefunctionGrid psiT = propagate(ga, p, tb - ta, dt);
    const double W = opt.amplitude_window_half_width;
    auto lhs_within = [&](double w) {
      cplx acc = 0;
      for (std::size_t i = 0; i < s.L; ++i)
        if (std::abs(psi1.x[i] - mid) <= w) acc += psi1.psi[i] * psi2.psi[i];
      return acc * psi1.dx;
    };
    cplx rhs = 0;
    for (std::size_t i = 0; i < s.L; ++i) rhs += gb.psi[i] * psiT.psi[i];
    rhs *= psiT.dx;
    cplx full = lhs_within(W), half = lhs_within(0.5 * W);
    CkResult r;
    r.lhs = std::abs(full);
    r.rhs = std::abs(rhs);
    r.residual = std::abs(full - rhs) / std::abs(rhs);
    r.truncation = std::abs(full - half) / std::abs(full);
    r.converged = r.truncation <= 1e-3;
    if (!r.converged)
      throw NumericError("ck_check: amplitude window truncation " + std::to_string(r.truncation) +
                         " > 1e-3; widen the window");
    return r;
  }

  const double W = opt.window_half_width;
  if (source == CkSource::oracle) {
    const OracleSettings& s = opt.oracle;
    double smin = *std::min_element(opt.sigmas.begin(), opt.sigmas.end());
    check_domain(s, std::max(std::abs(mid) + W, std::max(std::abs(za), std::abs(zb))), smin, std::max(t1, t2));
    std::vector<double> sig(opt.sigmas);
    std::sort(sig.begin(), sig.end(), std::greater<>());
    auto k1 = corrected_kernels(p, za, t1, sig, s);
    auto k2 = corrected_kernels(p, zb, t2, sig, s);   // K(c, zb; t2) = K(zb, c; t2) for real V
    WavefunctionGrid grid = WavefunctionGrid::make(s.X, s.L);
    std::vector<std::size_t> nodes;
    for (std::size_t i = 0; i < s.L; ++i)
      if (std::abs(grid.x[i] - mid) <= W) nodes.push_back(i);
    std::vector<double> f(nodes.size());
    std::vector<cplx> v1(sig.size()), v2(sig.size());
    for (std::size_t m = 0; m < nodes.size(); ++m) {
      for (std::size_t i = 0; i < sig.size(); ++i) {
        v1[i] = k1[i][nodes[m]];
        v2[i] = k2[i][nodes[m]];
      }
      f[m] = std::norm(extrapolate_sigma2(sig, v1)) * std::norm(extrapolate_sigma2(sig, v2));
    }
    std::size_t lo_half = 0, hi_half = nodes.size() - 1;
    while (lo_half < nodes.size() && std::abs(grid.x[nodes[lo_half]] - mid) > 0.5 * W) ++lo_half;
    while (hi_half > 0 && std::abs(grid.x[nodes[hi_half]] - mid) > 0.5 * W) --hi_half;
    double full = trapezoid(f, grid.dx, 0, nodes.size() - 1);
    double half = trapezoid(f, grid.dx, lo_half, hi_half);
    double rhs = kernel_estimate(p, za, zb, tb - ta, sig, s).kernel.modulus_squared;
    return finish(full, half, rhs);
  }

  // path-weight probabilities from quadrature on a coarse node grid
  const int M = std::max(5, opt.window_nodes | 1);
  const double h = 2 * W / (M - 1);
  std::vector<double> f(M);
  auto leg = [&](double t0, double t1_, double z0, double z1) {
    LatticeConfig c{t0, t1_, opt.n_per_leg, opt.gamma, z0, z1};
    return transition_probability_quadrature(p, c, default_window(c), opt.points_per_dim).value;
  };
  for (int m = 0; m < M; ++m) {
    double c = mid - W + m * h;
    f[m] = leg(ta, tc, za, c) * leg(tc, tb, c, zb);
  }
  double full = trapezoid(f, h, 0, M - 1);
  double half = trapezoid(f, h, (M - 1) / 4, 3 * (M - 1) / 4);
  LatticeConfig whole{ta, tb, 2 * opt.n_per_leg, opt.gamma, za, zb};
  double rhs = transition_probability_quadrature(p, whole, default_window(whole), opt.points_per_dim).value;
  return finish(full, half, rhs);
}

void write_wavefunction_csv(std::ostream& os, const WavefunctionGrid& g) {
  os << "x,re,im\n";
  os.precision(17);
  for (std::size_t i = 0; i < g.x.size(); ++i) os << g.x[i] << ',' << g.psi[i].real() << ',' << g.psi[i].imag() << '\n';
}

void write_wavefunction_binary(std::ostream& os, const WavefunctionGrid& g) {
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    double row[3] = {g.x[i], g.psi[i].real(), g.psi[i].imag()};
    os.write(reinterpret_cast<const char*>(row), sizeof row);
  }
}

} // namespace pathprob
