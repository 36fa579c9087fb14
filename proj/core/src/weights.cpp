#include "pathprob/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "pathprob/errors.hpp"
#include "pathprob/numerics.hpp"

namespace pathprob {

namespace {

void require_gamma(double gamma) {
  if (!(gamma > 0)) throw UsageError("gamma must be > 0");
}

constexpr double exp_tolerance = 1e-12;
constexpr int exp_points = 20;
constexpr long max_exp_panels = 2'000'000;

// 2 int_0^U e^{-g u} [cos(eps B - u s) - cos(u s)] du on `panels` Gauss panels
double exp_bracket_correction(const BandLimitedPotential& p, double z, double s, double eps,
                              double gamma, double U, long panels) {
  const GaussRule& g = gauss_legendre(exp_points);
  const double h = U / static_cast<double>(panels);
  const auto& lines = p.lines();
  double total = 0;
  for (long k = 0; k < panels; ++k) {
    double c = (static_cast<double>(k) + 0.5) * h;
    double acc = 0;
    for (int i = 0; i < exp_points; ++i) {
      double u = c + 0.5 * h * g.x[i];
      double B = 0;
      for (const auto& l : lines) B += 2 * l.a * std::sin(l.q * z + l.phi) * std::sin(0.5 * l.q * u);
      double half = 0.5 * eps * B;
      acc += g.w[i] * std::exp(-gamma * u) * (-2.0 * std::sin(half - u * s) * std::sin(half));
    }
    total += 0.5 * h * acc;
  }
  return 2.0 * total;
}

// int_{-U}^{U} e^{-g|u|} sin(eps[V(z-u/2) - V(z+u/2)] - u s) du with V evaluated directly and
// an asymmetric panel layout, so the cancellation is not built in.
double exp_imag(const BandLimitedPotential& p, double z, double s, double eps, double gamma,
                double U, long panels) {
  auto side = [&](double lo, double hi, long np) {
    GaussRule r = composite_gauss(lo, hi, static_cast<int>(np), exp_points);
    double acc = 0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      double u = r.x[i];
      double ph = eps * (p(z - 0.5 * u) - p(z + 0.5 * u)) - u * s;
      acc += r.w[i] * std::exp(-gamma * std::abs(u)) * std::sin(ph);
    }
    return acc;
  };
  return side(-U, 0.0, panels) + side(0.0, U, panels + 1);
}

} // namespace

double lorentzian_difference(double s, double c, double gamma) {
  const double g2 = gamma * gamma;
  const double num = s * s + g2;
  return num / ((s - c) * (s - c) + g2) - num / ((s + c) * (s + c) + g2);
}

double step_m(const BandLimitedPotential& p, double z, double s, double gamma) {
  require_gamma(gamma);
  double m = 0;
  for (const auto& l : p.lines())
    m -= l.a * std::sin(l.q * z + l.phi) * lorentzian_difference(s, 0.5 * l.q, gamma);
  return m;
}

double m_bound(const BandLimitedPotential& p, double gamma) {
  require_gamma(gamma);
  return p.R() * p.R() * p.K() / (two_pi * gamma * gamma);
}

double lorentzian_difference_sup(double c, double gamma, double* argmax) {
  require_gamma(gamma);
  if (!(c > 0)) {
    if (argmax) *argmax = 0;
    return 0.0;
  }
  const double hi = c + 10 * gamma;
  const long N = std::clamp<long>(static_cast<long>(40 * hi / gamma), 4000, 1'000'000);
  double best = 0, best_s = 0;
  for (long i = 1; i <= N; ++i) {
    double s = hi * static_cast<double>(i) / static_cast<double>(N);
    double d = lorentzian_difference(s, c, gamma);
    if (d > best) {
      best = d;
      best_s = s;
    }
  }
  const double step = hi / static_cast<double>(N);
  auto neg = [&](double s) { return -lorentzian_difference(s, c, gamma); };
  auto r = boost::math::tools::brent_find_minima(neg, std::max(0.0, best_s - step), best_s + step,
                                                 std::numeric_limits<double>::digits);
  if (-r.second > best) {
    best = -r.second;
    best_s = r.first;
  }
  if (argmax) *argmax = best_s;
  return best;
}

MSupremum m_sup_certified(const BandLimitedPotential& p, double gamma) {
  require_gamma(gamma);
  MSupremum out;
  double sum = 0;
  for (const auto& l : p.lines()) sum += std::abs(l.a) * lorentzian_difference_sup(0.5 * l.q, gamma);
  out.value = sum * (1 + 1e-9);
  return out;
}

double step_q_linear(const BandLimitedPotential& p, double z, double s, double eps, double gamma) {
  require_gamma(gamma);
  if (!(eps > 0)) throw UsageError("eps must be > 0");
  return std::exp(-gamma * std::abs(z)) * lorentzian(s, gamma) * (1.0 - eps * step_m(p, z, s, gamma)) /
         (two_pi * eps);
}

ExponentialStep step_q_exponential_detail(const BandLimitedPotential& p, double z, double s,
                                          double eps, double gamma) {
  require_gamma(gamma);
  if (!(eps > 0)) throw UsageError("eps must be > 0");
  const double pref = std::exp(-gamma * std::abs(z)) / (two_pi * eps);
  ExponentialStep out;
  if (p.is_zero()) {
    out.value = pref * lorentzian(s, gamma);
    return out;
  }

  const double U = -std::log(exp_tolerance) / gamma;
  double rate = std::abs(s) + gamma;
  for (const auto& l : p.lines()) rate += eps * std::abs(l.a) * l.q;
  long panels = std::max<long>(8, static_cast<long>(std::ceil(U * rate / 2.0)));
  if (2 * panels > max_exp_panels)
    throw NumericError("step_q_exponential: " + std::to_string(panels) +
                       " panels needed (|s| = " + std::to_string(s) + "); reduce |s| or raise gamma");

  double coarse = exp_bracket_correction(p, z, s, eps, gamma, U, panels);
  double fine = exp_bracket_correction(p, z, s, eps, gamma, U, 2 * panels);
  double bracket = lorentzian(s, gamma) + fine;
  out.error_estimate = pref * std::abs(fine - coarse);
  out.panels = static_cast<int>(2 * panels);
  if (std::abs(fine - coarse) > 1e-8 * std::abs(bracket) + 1e-13)
    throw NumericError("step_q_exponential: panel refinement changed the u-integral by " +
                       std::to_string(std::abs(fine - coarse)) + " at z = " + std::to_string(z) +
                       ", s = " + std::to_string(s));
  out.value = pref * bracket;
  out.imag = pref * exp_imag(p, z, s, eps, gamma, U, panels);
  return out;
}

double step_q_exponential(const BandLimitedPotential& p, double z, double s, double eps, double gamma) {
  return step_q_exponential_detail(p, z, s, eps, gamma).value;
}

PositivityThreshold positivity_threshold(const BandLimitedPotential& p, double gamma) {
  require_gamma(gamma);
  PositivityThreshold t;
  const double inf = std::numeric_limits<double>::infinity();
  if (p.is_zero()) {
    t.unconstrained = true;
    t.lambda_paper = inf;
    t.lambda_strict = inf;
    return t;
  }
  t.lambda_paper = two_pi * gamma * gamma / (p.R() * p.R() * p.K());
  MSupremum sup = m_sup_certified(p, gamma);
  t.certified = sup.certified;
  t.lambda_strict = 1.0 / sup.value;
  return t;
}

StepWitness find_negative_step(const BandLimitedPotential& p, double gamma, double eps) {
  require_gamma(gamma);
  StepWitness w;
  if (p.is_zero()) {
    w.Q = step_q_linear(p, 0, 0, eps, gamma);
    return w;
  }
  std::vector<double> zs, ss;
  double qmin = p.R();
  for (const auto& l : p.lines()) {
    qmin = std::min(qmin, l.q);
    double smax = 0;
    lorentzian_difference_sup(0.5 * l.q, gamma, &smax);
    ss.push_back(smax);
    double z0 = ((l.a > 0 ? -0.5 : 0.5) * pi - l.phi) / l.q;
    for (int m = -20; m <= 20; ++m) zs.push_back(z0 + two_pi * m / l.q);
  }
  const double Z = 20 * two_pi / qmin;
  for (int i = 0; i <= 4000; ++i) zs.push_back(-Z + 2 * Z * i / 4000.0);

  double best = -std::numeric_limits<double>::infinity();
  for (double z : zs)
    for (double s : ss) {
      double m = step_m(p, z, s, gamma);
      double tol = std::isfinite(best) ? 1e-12 * std::abs(best) : 0.0;
      if (m > best + tol || (m >= best - tol && std::abs(z) < std::abs(w.z))) {
        best = m;
        w.z = z;
        w.s = s;
      }
    }
  // coordinate refinement around the best scan point
  double dz = pi / (4 * p.R()), ds = 10 * gamma;
  for (int it = 0; it < 8; ++it) {
    auto rz = boost::math::tools::brent_find_minima([&](double z) { return -step_m(p, z, w.s, gamma); },
                                                    w.z - dz, w.z + dz, 40);
    if (-rz.second > best) {
      best = -rz.second;
      w.z = rz.first;
    }
    auto rs = boost::math::tools::brent_find_minima([&](double s) { return -step_m(p, w.z, s, gamma); },
                                                    std::max(0.0, w.s - ds), w.s + ds, 40);
    if (-rs.second > best) {
      best = -rs.second;
      w.s = rs.first;
    }
    dz *= 0.5;
    ds *= 0.5;
  }
  w.M = step_m(p, w.z, w.s, gamma);
  w.Q = step_q_linear(p, w.z, w.s, eps, gamma);
  w.negative = w.Q < 0;
  return w;
}

SignedLog path_log_weight(const BandLimitedPotential& p, std::span<const double> z,
                          const LatticeConfig& cfg, StepForm form) {
  const double eps = cfg.eps();
  SignedLog out{1, std::log(static_cast<double>(cfg.n))};
  for (int j = 1; j < cfg.n; ++j) {
    double s = (z[j + 1] - 2 * z[j] + z[j - 1]) / eps;
    double q = form == StepForm::linear ? step_q_linear(p, z[j], s, eps, cfg.gamma)
                                        : step_q_exponential(p, z[j], s, eps, cfg.gamma);
    if (q == 0) return {0, -std::numeric_limits<double>::infinity()};
    if (q < 0) out.sign = -out.sign;
    out.log_abs += std::log(std::abs(q));
  }
  return out;
}

WeightEvaluation path_weight(const BandLimitedPotential& p, const Path& path,
                             const LatticeConfig& cfg, StepForm form) {
  cfg.validate();
  WeightEvaluation w;
  w.steps.s = second_differences(path, cfg);
  const double eps = cfg.eps();
  const int m = cfg.n - 1;
  w.steps.M.resize(m);
  w.steps.Q.resize(m);
  double log_abs = std::log(static_cast<double>(cfg.n));
  int sign = 1;
  for (int j = 0; j < m; ++j) {
    double z = path.z[j + 1], s = w.steps.s[j];
    w.steps.M[j] = step_m(p, z, s, cfg.gamma);
    double q = form == StepForm::linear ? step_q_linear(p, z, s, eps, cfg.gamma)
                                        : step_q_exponential(p, z, s, eps, cfg.gamma);
    if (!std::isfinite(q)) throw NumericError("path_weight: non-finite Q at step " + std::to_string(j + 1));
    w.steps.Q[j] = q;
    if (q == 0) sign = 0;
    if (q < 0) sign = -sign;
    log_abs += std::log(std::abs(q));
  }
  w.sign = sign;
  w.log_abs_W = sign == 0 ? -std::numeric_limits<double>::infinity() : log_abs;
  w.W = sign == 0 ? 0.0 : sign * std::exp(log_abs);
  w.positive = w.W >= 0;
  w.lambda = positivity_threshold(p, cfg.gamma);
  return w;
}

} // namespace pathprob
