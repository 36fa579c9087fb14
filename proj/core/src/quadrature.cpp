#include "pathprob/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "pathprob/errors.hpp"
#include "pathprob/numerics.hpp"

namespace pathprob {

namespace {

using cplx = std::complex<double>;

int levels_for(int ppd, int requested) {
  int levels = 0;
  int m = ppd - 1;
  while (levels < requested && m % 2 == 0 && m / 2 >= 2) {
    m /= 2;
    ++levels;
  }
  return levels;
}

// Trapezoid variable tau with dtau/dt = 1 + A sum_b exp(-(t - t_b)^2 / 2w^2): extra nodes around
// the M peaks at s = +-q_k/2, whose width in s is gamma.
class NodeMap {
public:
  NodeMap(const std::vector<SpectralLine>& lines, double gamma, double t_max) {
    for (const auto& l : lines) {
      double c = 0.5 * l.q;
      double w = std::max(0.05, 3.0 * gamma / std::hypot(c, gamma));
      for (double sgn : {-1.0, 1.0}) {
        double tb = std::asinh(sgn * c / gamma);
        if (std::abs(tb) < t_max) bumps_.push_back({tb, w});
      }
    }
  }

  double density(double t) const {
    double r = 1.0;
    for (auto [tb, w] : bumps_) r += amp * std::exp(-0.5 * (t - tb) * (t - tb) / (w * w));
    return r;
  }

  double tau_of(double t) const {
    double r = t;
    for (auto [tb, w] : bumps_) r += amp * w * std::sqrt(pi / 2) * std::erf((t - tb) / (std::sqrt(2.0) * w));
    return r;
  }

  // Newton on the monotone map, safeguarded by bisection
  double t_of(double tau) const {
    double lo = -1e3, hi = 1e3, t = tau;
    for (int it = 0; it < 200; ++it) {
      double f = tau_of(t) - tau;
      if (std::abs(f) < 1e-15 * (1 + std::abs(tau))) break;
      if (f > 0) hi = t; else lo = t;
      double next = t - f / density(t);
      t = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
    }
    return t;
  }

private:
  static constexpr double amp = 3.0;
  std::vector<std::pair<double, double>> bumps_;
};

} // namespace

Window default_window(const LatticeConfig& cfg) {
  double margin = 15.0 / cfg.gamma;
  return {std::min(cfg.za, cfg.zb) - margin, std::max(cfg.za, cfg.zb) + margin};
}

TransitionEstimate transition_probability_quadrature(const BandLimitedPotential& p,
                                                     const LatticeConfig& cfg, const Window& window,
                                                     int points_per_dim,
                                                     const QuadratureOptions& opt) {
  cfg.validate();
  const int n = cfg.n;
  if (n > max_quadrature_n)
    throw UsageError("quadrature: n = " + std::to_string(n) + " exceeds the tensor-grid limit " +
                     std::to_string(max_quadrature_n) + "; use Monte Carlo");
  if (points_per_dim < 3 || points_per_dim % 2 == 0)
    throw UsageError("quadrature: points_per_dim must be odd and >= 3");
  if (!(window.hi > window.lo)) throw UsageError("quadrature: empty window");

  const int dims = n - 1;
  const int ppd = points_per_dim;
  const double eps = cfg.eps();
  const double gamma = cfg.gamma;
  const double beta_min = gamma * gamma * eps / n;
  const double t_max = opt.t_max > 0 ? opt.t_max : std::min(24.0, std::log(40.0 / beta_min) + 2.0);
  const auto& line_list = p.lines();
  const NodeMap map(line_list, gamma, t_max);
  const double h = (map.tau_of(t_max) - map.tau_of(-t_max)) / (ppd - 1);

  std::vector<double> s_node(ppd), sech_node(ppd), lor_node(ppd), jac_node(ppd);
  for (int i = 0; i < ppd; ++i) {
    double t = i == 0 ? -t_max : (i == ppd - 1 ? t_max : map.t_of(map.tau_of(-t_max) + i * h));
    s_node[i] = gamma * std::sinh(t);
    sech_node[i] = 1.0 / std::cosh(t);
    lor_node[i] = lorentzian(s_node[i], gamma);
    jac_node[i] = 1.0 / map.density(t);
  }
  const auto& lines = p.lines();
  const std::size_t nl = lines.size();
  std::vector<double> d_node(ppd * nl);
  for (int i = 0; i < ppd; ++i)
    for (std::size_t k = 0; k < nl; ++k)
      d_node[i * nl + k] = lorentzian_difference(s_node[i], 0.5 * lines[k].q, gamma);

  const int levels = levels_for(ppd, opt.refinements);
  auto level_weight = [&](int i, int level) -> double {
    int stride = 1 << level;
    if (i % stride) return 0.0;
    double w = h * stride * jac_node[i];
    return (i == 0 || i == ppd - 1) ? 0.5 * w : w;
  };

  const std::size_t inner = [&] {
    std::size_t c = 1;
    for (int d = 1; d < dims; ++d) c *= static_cast<std::size_t>(ppd);
    return c;
  }();

  // per outer index: sums at each level, plus boundary mass at the finest level
  std::vector<std::vector<double>> partial(levels + 1, std::vector<double>(ppd, 0.0));
  std::vector<double> outside(ppd, 0.0), absmass(ppd, 0.0);
  std::string failure;

#pragma omp parallel for schedule(dynamic)
  for (int i0 = 0; i0 < ppd; ++i0) {
    std::vector<int> idx(dims, 0);
    std::vector<double> s(dims), z(n + 1);
    std::vector<double> acc(levels + 1, 0.0);
    double out_acc = 0, abs_acc = 0;
    idx[0] = i0;
    try {
      for (std::size_t r = 0; r < inner; ++r) {
        std::size_t rem = r;
        for (int d = dims - 1; d >= 1; --d) {
          idx[d] = static_cast<int>(rem % ppd);
          rem /= ppd;
        }
        for (int d = 0; d < dims; ++d) s[d] = s_node[idx[d]];
        path_from_velocity_changes(cfg, s, z);

        double f = 1.0;
        bool out = false;
        for (int d = 0; d < dims && f != 0.0; ++d) {
          const double zj = z[d + 1];
          if (!window.contains(zj)) out = true;
          const int i = idx[d];
          double factor;
          if (opt.form == StepForm::linear) {
            double M = 0;
            for (std::size_t k = 0; k < nl; ++k)
              M -= lines[k].a * std::sin(lines[k].q * zj + lines[k].phi) * d_node[i * nl + k];
            factor = std::exp(-gamma * std::abs(zj)) * (1.0 - eps * M) * sech_node[i] / pi;
          } else {
            double q = step_q_exponential(p, zj, s[d], eps, gamma);
            factor = 2.0 * eps * q * sech_node[i] / lor_node[i];
          }
          f *= factor;
        }
        if (f == 0.0) continue;

        double w_fine = 1.0;
        for (int d = 0; d < dims; ++d) w_fine *= level_weight(idx[d], 0);
        acc[0] += w_fine * f;
        abs_acc += w_fine * std::abs(f);
        if (out) out_acc += w_fine * std::abs(f);
        for (int l = 1; l <= levels; ++l) {
          double w = 1.0;
          for (int d = 0; d < dims && w != 0.0; ++d) w *= level_weight(idx[d], l);
          if (w != 0.0) acc[l] += w * f;
        }
      }
    } catch (const Error& e) {
#pragma omp critical(pathprob_quadrature_failure)
      failure = e.what();
    }
    for (int l = 0; l <= levels; ++l) partial[l][i0] = acc[l];
    outside[i0] = out_acc;
    absmass[i0] = abs_acc;
  }
  if (!failure.empty()) throw NumericError("quadrature: " + failure);

  const double norm = 1.0 / (two_pi * cfg.duration());
  TransitionEstimate est;
  est.method = "quadrature";
  est.n = n;
  est.eps = eps;
  est.gamma = gamma;
  for (int l = levels; l >= 0; --l) {
    RefinementLevel r;
    r.points_per_dim = (ppd - 1) / (1 << l) + 1;
    r.value = norm * pairwise_sum(partial[l]);
    r.delta = est.refinement.empty() ? 0.0 : r.value - est.refinement.back().value;
    est.refinement.push_back(r);
  }
  est.value = est.refinement.back().value;
  double total = pairwise_sum(absmass);
  est.boundary_mass = total > 0 ? pairwise_sum(outside) / total : 0.0;
  if (est.boundary_mass > opt.max_boundary_mass)
    throw NumericError("quadrature: window [" + std::to_string(window.lo) + ", " +
                       std::to_string(window.hi) + "] leaves " + std::to_string(est.boundary_mass) +
                       " of the path mass outside; widen it");
  return est;
}

namespace {

struct AmplitudeGrid {
  GaussRule rule;
  double X = 0;
};

AmplitudeGrid amplitude_nodes(const BandLimitedPotential& p, const LatticeConfig& cfg, Regularizer reg,
                              int points) {
  const double gamma = cfg.gamma;
  const double eps = cfg.eps();
  AmplitudeGrid g;
  g.X = reg == Regularizer::laplace ? 30.0 / gamma : std::sqrt(30.0 / gamma);
  const double reach = g.X + std::max(std::abs(cfg.za), std::abs(cfg.zb));
  double rate = 2.0 * reach / eps + gamma + eps * p.sup_abs() * p.R();
  if (reg == Regularizer::gaussian) rate += 2.0 * gamma * g.X;
  const double width = 10.0 / rate;
  const int half_panels = std::max(2, static_cast<int>(std::ceil(g.X / width)));
  GaussRule left = composite_gauss(-g.X, 0.0, half_panels, points);
  GaussRule right = composite_gauss(0.0, g.X, half_panels, points);
  g.rule = std::move(left);
  g.rule.x.insert(g.rule.x.end(), right.x.begin(), right.x.end());
  g.rule.w.insert(g.rule.w.end(), right.w.begin(), right.w.end());
  return g;
}

cplx amplitude_on(const BandLimitedPotential& p, const LatticeConfig& cfg, Regularizer reg,
                  const GaussRule& r) {
  const double eps = cfg.eps();
  const double gamma = cfg.gamma;
  const std::size_t N = r.x.size();
  std::vector<cplx> local(N);   // reg * e^{-i eps V} at each node
  for (std::size_t i = 0; i < N; ++i) {
    double x = r.x[i];
    double damp = reg == Regularizer::laplace ? std::exp(-gamma * std::abs(x)) : std::exp(-gamma * x * x);
    local[i] = damp * std::polar(1.0, -eps * p(x));
  }
  auto chirp = [eps](double d) { return std::polar(1.0, d * d / (2.0 * eps)); };

  std::vector<cplx> phi(N), next(N);
  for (std::size_t i = 0; i < N; ++i) phi[i] = local[i] * chirp(r.x[i] - cfg.za);
  for (int step = 2; step < cfg.n; ++step) {
#pragma omp parallel for schedule(static)
    for (std::size_t iy = 0; iy < N; ++iy) {
      const double y = r.x[iy];
      cplx acc = 0;
      for (std::size_t ix = 0; ix < N; ++ix) acc += r.w[ix] * phi[ix] * chirp(y - r.x[ix]);
      next[iy] = local[iy] * acc;
    }
    std::swap(phi, next);
  }
  cplx acc = 0;
  for (std::size_t i = 0; i < N; ++i) acc += r.w[i] * phi[i] * chirp(cfg.zb - r.x[i]);
  // (2 pi i eps)^{-n/2}, principal branch
  cplx pref = std::pow(cplx(0.0, two_pi * eps), -0.5 * cfg.n);
  return pref * acc;
}

} // namespace

KernelEstimate amplitude_discrete(const BandLimitedPotential& p, const LatticeConfig& cfg,
                                  Regularizer reg) {
  cfg.validate();
  if (cfg.n > max_amplitude_n)
    throw UsageError("amplitude_discrete: n = " + std::to_string(cfg.n) + " exceeds " +
                     std::to_string(max_amplitude_n));
  AmplitudeGrid fine = amplitude_nodes(p, cfg, reg, 20);
  const double N = static_cast<double>(fine.rule.x.size());
  if (N > 2e5 || (cfg.n - 2) * N * N > 4e8)
    throw NumericError("amplitude_discrete: " + std::to_string(static_cast<long>(N)) +
                       " nodes needed; raise gamma or eps");
  AmplitudeGrid coarse = amplitude_nodes(p, cfg, reg, 14);
  cplx a = amplitude_on(p, cfg, reg, fine.rule);
  cplx b = amplitude_on(p, cfg, reg, coarse.rule);
  double err = std::abs(a - b);
  if (err > 1e-7 * std::abs(a) + 1e-300)
    throw NumericError("amplitude_discrete: 20- and 14-point panels differ by " + std::to_string(err / std::abs(a)) +
                       " relative over " + std::to_string(static_cast<long>(N)) + " nodes");
  return KernelEstimate::of(a, err);
}

TransitionEstimate probability_from_amplitude(const KernelEstimate& k) {
  TransitionEstimate e;
  e.value = std::norm(k.amplitude);
  e.std_error = 0;
  e.method = "amplitude";
  return e;
}

namespace {

// int du reg(z,u) e^{-iuk}, reg = e^{-gamma max(2|z|,|u|)}
double laplace_u_transform(double z, double k, double gamma) {
  const double c = 2.0 * std::abs(z);
  const double ck = c * k;
  double sinc = std::abs(ck) < 1e-4 ? 1.0 - ck * ck / 6.0 : std::sin(ck) / ck;
  cplx g(gamma, k);
  double tail = 2.0 * (std::exp(-c * g) / g).real();
  return std::exp(-gamma * c) * 2.0 * c * sinc + tail;
}

double bessel_j(int m, double x) {
  int am = std::abs(m);
  double v = std::cyl_bessel_j(static_cast<double>(am), std::abs(x));
  bool flip = ((m < 0) && (am % 2)) != ((x < 0) && (am % 2));
  return flip ? -v : v;
}

struct BesselTable {
  std::vector<double> coeff;   // prod_k J_{m_k}(beta_k)
  std::vector<double> shift;   // sum_k m_k q_k / 2
};

int bessel_order_cap(double beta) { return static_cast<int>(std::ceil(std::abs(beta))) + 14; }

BesselTable bessel_terms(const std::vector<SpectralLine>& lines, double z, double eps) {
  BesselTable t;
  const std::size_t L = lines.size();
  if (L == 0) {
    t.coeff = {1.0};
    t.shift = {0.0};
    return t;
  }
  std::vector<std::vector<double>> J(L);
  std::vector<int> mmax(L);
  for (std::size_t k = 0; k < L; ++k) {
    double beta = 2.0 * eps * lines[k].a * std::sin(lines[k].q * z + lines[k].phi);
    mmax[k] = bessel_order_cap(beta);
    for (int m = -mmax[k]; m <= mmax[k]; ++m) J[k].push_back(bessel_j(m, beta));
  }
  std::vector<int> m(L);
  for (std::size_t k = 0; k < L; ++k) m[k] = -mmax[k];
  while (true) {
    double c = 1.0, sh = 0.0;
    for (std::size_t k = 0; k < L; ++k) {
      c *= J[k][m[k] + mmax[k]];
      sh += 0.5 * m[k] * lines[k].q;
    }
    if (std::abs(c) > 1e-17) {
      t.coeff.push_back(c);
      t.shift.push_back(sh);
    }
    std::size_t k = 0;
    for (; k < L; ++k) {
      if (++m[k] <= mmax[k]) break;
      m[k] = -mmax[k];
    }
    if (k == L) break;
  }
  return t;
}

} // namespace

double product_form_probability(const BandLimitedPotential& p, const LatticeConfig& cfg,
                                Regularizer reg) {
  cfg.validate();
  if (cfg.n > 3) throw UsageError("product_form_probability: n <= 3");
  if (p.lines().size() > 3) throw UsageError("product_form_probability: at most 3 lines");
  const double eps = cfg.eps();
  const double gamma = cfg.gamma;
  const double Z = reg == Regularizer::laplace ? 9.0 / gamma : std::sqrt(9.0 / gamma);
  const double reach = Z + std::max(std::abs(cfg.za), std::abs(cfg.zb));
  double kappa = 0;
  for (const auto& l : p.lines()) kappa += 0.5 * l.q * bessel_order_cap(2 * eps * l.a);
  // z-derivative of the phase 2|z| k with k ~ s - kappa, s linear in z with slope <= 2/eps
  double rate = 12.0 * reach / eps + 4.0 * kappa + 1.0;
  if (reg == Regularizer::gaussian) rate += 4.0 / (std::sqrt(gamma) * eps) + 4.0 * gamma * Z;
  const int half_panels = std::max(4, static_cast<int>(std::ceil(Z * rate / 10.0)));
  GaussRule r = composite_gauss(-Z, 0.0, half_panels, 20);
  {
    GaussRule right = composite_gauss(0.0, Z, half_panels, 20);
    r.x.insert(r.x.end(), right.x.begin(), right.x.end());
    r.w.insert(r.w.end(), right.w.begin(), right.w.end());
  }
  const std::size_t N = r.x.size();
  std::vector<BesselTable> tables(N);
  for (std::size_t i = 0; i < N; ++i) tables[i] = bessel_terms(p.lines(), r.x[i], eps);

  auto F = [&](std::size_t i, double s) {
    const double z = r.x[i];
    const BesselTable& t = tables[i];
    double acc = 0;
    if (reg == Regularizer::laplace) {
      for (std::size_t m = 0; m < t.coeff.size(); ++m)
        acc += t.coeff[m] * laplace_u_transform(z, s - t.shift[m], gamma);
    } else {
      for (std::size_t m = 0; m < t.coeff.size(); ++m) {
        double k = s - t.shift[m];
        acc += t.coeff[m] * std::exp(-k * k / (2 * gamma));
      }
      acc *= std::exp(-2 * gamma * z * z) * std::sqrt(two_pi / gamma);
    }
    return acc;
  };

  double total = 0;
  if (cfg.n == 2) {
    std::vector<double> terms(N);
    for (std::size_t i = 0; i < N; ++i) terms[i] = r.w[i] * F(i, (cfg.zb - 2 * r.x[i] + cfg.za) / eps);
    total = pairwise_sum(terms);
  } else {
    std::vector<double> rows(N);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < N; ++i) {
      const double z1 = r.x[i];
      std::vector<double> terms(N);
      for (std::size_t j = 0; j < N; ++j) {
        const double z2 = r.x[j];
        terms[j] = r.w[j] * F(i, (z2 - 2 * z1 + cfg.za) / eps) * F(j, (cfg.zb - 2 * z2 + z1) / eps);
      }
      rows[i] = r.w[i] * pairwise_sum(terms);
    }
    total = pairwise_sum(rows);
  }
  return total / std::pow(two_pi * eps, cfg.n);
}

GammaExtrapolation extrapolate_gamma(std::span<const double> gammas, std::span<const double> values) {
  LinearFit f = fit_line(gammas, values);
  return {f.intercept, f.slope, f.residual_std, f.intercept_se};
}

} // namespace pathprob
