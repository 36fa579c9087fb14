#include "pathprob/numerics.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <boost/math/special_functions/legendre.hpp>

#include "pathprob/errors.hpp"

namespace pathprob {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace

SplitMix64 SplitMix64::stream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(mix(mix(seed) ^ (index * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL)));
}

std::uint64_t SplitMix64::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix(state_);
}

double SplitMix64::uniform() {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double SplitMix64::normal() {
  double u1 = uniform();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

double SplitMix64::cauchy(double scale) {
  return scale * std::tan(pi * (uniform() - 0.5));
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double acc = 0;
    for (double x : v) acc += x;
    return acc;
  }
  std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

const GaussRule& gauss_legendre(int points) {
  if (points < 1) throw UsageError("gauss_legendre: need at least one point");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(points);
  if (it != cache.end()) return it->second;

  GaussRule r;
  auto pos = boost::math::legendre_p_zeros<double>(points);   // nonnegative roots, ascending
  std::vector<double> roots;
  for (auto it2 = pos.rbegin(); it2 != pos.rend(); ++it2)
    if (*it2 != 0.0) roots.push_back(-*it2);
  for (double x : pos) roots.push_back(x);
  for (double x : roots) {
    double d = boost::math::legendre_p_prime(points, x);
    r.x.push_back(x);
    r.w.push_back(2.0 / ((1.0 - x * x) * d * d));
  }
  return cache.emplace(points, std::move(r)).first->second;
}

GaussRule composite_gauss(double lo, double hi, int panels, int points) {
  const GaussRule& g = gauss_legendre(points);
  GaussRule r;
  r.x.reserve(static_cast<std::size_t>(panels) * g.x.size());
  r.w.reserve(r.x.capacity());
  double h = (hi - lo) / panels;
  for (int k = 0; k < panels; ++k) {
    double c = lo + (k + 0.5) * h;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      r.x.push_back(c + 0.5 * h * g.x[i]);
      r.w.push_back(0.5 * h * g.w[i]);
    }
  }
  return r;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("fit_line: need >= 2 paired points");
  const double m = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw UsageError("fit_line: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double ssr = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double r = y[i] - (f.intercept + f.slope * x[i]);
      ssr += r * r;
    }
    f.residual_std = std::sqrt(ssr / (m - 2));
    f.slope_se = f.residual_std / std::sqrt(sxx);
    f.intercept_se = f.residual_std * std::sqrt(1.0 / m + mx * mx / sxx);
  }
  return f;
}

} // namespace pathprob
