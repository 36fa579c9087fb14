#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <pathprob/errors.hpp>
#include <pathprob/numerics.hpp>
#include <pathprob/weights.hpp>

#include "oracles.hpp"

using namespace pathprob;

namespace {

const BandLimitedPotential unit_cosine = BandLimitedPotential::cosine(1.0, 1.0);

std::vector<BandLimitedPotential> line_potentials() {
  return {
      unit_cosine,
      BandLimitedPotential::from_lines({{1.0, 1.0, 0.0}, {0.5, 1.0, 0.0}}),
      BandLimitedPotential::from_lines({{2.0, 0.3, 0.4}, {1.3, 0.5, -1.0}, {0.7, 0.2, 2.0}}),
      BandLimitedPotential::cosine(0.1, 1.0, 0.3),
  };
}

// interior points uniform in [-5, 5], every fifth one a Cauchy outlier
Path random_path(const LatticeConfig& c, SplitMix64& rng) {
  Path p;
  p.z.resize(c.n + 1);
  p.z.front() = c.za;
  p.z.back() = c.zb;
  for (int j = 1; j < c.n; ++j)
    p.z[j] = (rng.next() % 5 == 0) ? rng.cauchy(20.0) : -5.0 + 10.0 * rng.uniform();
  return p;
}

double frozen_unit_cosine_m = -3.4377127297481307;   // M(pi/2, 1), gamma = 0.1

} // namespace

TEST_SUITE("weights") {

TEST_CASE("step_m trivial cases") {
  BandLimitedPotential zero;
  for (double z : {-2.0, 0.0, 1.3})
    for (double s : {-4.0, 0.0, 0.5}) CHECK(step_m(zero, z, s, 0.1) == 0.0);
  for (const auto& p : line_potentials())
    for (double z : {-2.0, 0.0, 1.3}) CHECK(step_m(p, z, 0.0, 0.1) == 0.0);
  CHECK_THROWS_AS(step_m(unit_cosine, 0.0, 1.0, 0.0), UsageError);
  CHECK_THROWS_AS(step_m(unit_cosine, 0.0, 1.0, -0.1), UsageError);
}

TEST_CASE("step_m unit cosine value") {
  CHECK(step_m(unit_cosine, pi / 2, 1.0, 0.1) == doctest::Approx(frozen_unit_cosine_m).epsilon(1e-13));
}

TEST_CASE("step_m agrees with the direct u-integral") {
  for (const auto& p : line_potentials())
    for (double z : {-1.1, 0.3, 2.0})
      for (double s : {-0.8, 0.05, 0.52, 3.0}) {
        double ref = oracles::m_direct(p, z, s, 0.1);
        CHECK(step_m(p, z, s, 0.1) == doctest::Approx(ref).epsilon(1e-9).scale(1e-9));
      }
}

TEST_CASE("step_m of a grid potential") {
  SpectralGrid g;
  g.qmax = 1.5;
  g.values = {{0.1, 0.2}, {-0.3, 0.05}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {-0.3, -0.05}, {0.1, -0.2}};
  auto p = BandLimitedPotential::from_grid(g);
  for (double z : {-0.7, 0.2, 1.9})
    for (double s : {-1.0, 0.3, 0.8}) {
      double ref = oracles::m_direct(p, z, s, 0.1);
      CHECK(step_m(p, z, s, 0.1) == doctest::Approx(ref).epsilon(1e-9).scale(1e-9));
    }
}

TEST_CASE("step_m symmetry for even potentials") {
  auto p = BandLimitedPotential::from_lines({{1.0, 1.0, 0.0}, {0.5, -0.4, 0.0}});
  REQUIRE(p.is_even());
  SplitMix64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    double z = 20 * (rng.uniform() - 0.5), s = 10 * (rng.uniform() - 0.5);
    double m = step_m(p, z, s, 0.1);
    CHECK(std::abs(step_m(p, -z, s, 0.1) + m) <= 1e-12 * std::max(1.0, std::abs(m)));
    CHECK(std::abs(step_m(p, z, -s, 0.1) + m) <= 1e-12 * std::max(1.0, std::abs(m)));
  }
}

TEST_CASE("m_bound examples") {
  auto rk = BandLimitedPotential::from_lines({{1.0, 1.0 / two_pi, 0.0}});
  CHECK(m_bound(rk, 0.1) == doctest::Approx(1.0 / (two_pi * 0.01)).epsilon(1e-13));
  CHECK(m_bound(unit_cosine, 0.1) == doctest::Approx(100.0).epsilon(1e-13));
  CHECK(m_bound(BandLimitedPotential{}, 0.1) == 0.0);
}

TEST_CASE("certified supremum") {
  CHECK(m_sup_certified(BandLimitedPotential{}, 0.1).value == 0.0);

  double argmax = 0;
  double d = lorentzian_difference_sup(0.5, 0.1, &argmax);
  CHECK(d == doctest::Approx(26.69633831013799).epsilon(1e-10));
  CHECK(argmax == doctest::Approx(0.519).epsilon(1e-2));
  CHECK(lorentzian_difference_sup(0.25, 0.1) == doctest::Approx(7.8191895605827275).epsilon(1e-10));
  CHECK(lorentzian_difference_sup(0.5, 0.05) == doctest::Approx(101.73588140386155).epsilon(1e-10));

  auto one = m_sup_certified(unit_cosine, 0.1);
  CHECK(one.certified);
  CHECK(one.value >= 26.69633831013799);
  CHECK(one.value == doctest::Approx(26.69633831013799).epsilon(1e-8));
  CHECK(one.value >= oracles::dense_m_scan(unit_cosine, 0.1, two_pi, 3.0, 257, 30001));

  auto two_lines = BandLimitedPotential::from_lines({{1.0, 1.0, 0.0}, {0.5, 1.0, 0.0}});
  auto two = m_sup_certified(two_lines, 0.1);
  CHECK(two.value == doctest::Approx(34.51552787072072).epsilon(1e-8));
  double scanned = oracles::dense_m_scan(two_lines, 0.1, 4 * pi, 3.0, 1025, 6001);
  CHECK(two.value >= scanned);
  // the two maxima are not attained at a common (z, s); the sum is an upper bound only
  CHECK(scanned > 0.5 * two.value);
}

TEST_CASE("bound ordering") {
  SplitMix64 rng(5);
  for (const auto& p : line_potentials())
    for (double g : {0.05, 0.1, 0.2}) {
      double sup = m_sup_certified(p, g).value;
      CHECK(sup <= m_bound(p, g) * (1 + (g / p.R()) * (g / p.R()) + 0.05));
      for (int i = 0; i < 100000; ++i) {
        double z = 40 * (rng.uniform() - 0.5);
        double s = (i % 2) ? rng.cauchy(g) : 4 * (rng.uniform() - 0.5);
        CHECK_MESSAGE(std::abs(step_m(p, z, s, g)) <= sup, "z=" << z << " s=" << s);
      }
    }
}

TEST_CASE("step_q_linear examples") {
  BandLimitedPotential zero;
  CHECK(step_q_linear(zero, 0, 0, 0.01, 0.1) == doctest::Approx(318.30988618379067).epsilon(1e-13));
  CHECK(step_q_linear(unit_cosine, pi / 2, 1.0, 0.005, 0.1) > 0);
  // M(-pi/2, 1) = +3.4377: the sign flips once eps > 1/3.4377
  CHECK(step_q_linear(unit_cosine, -pi / 2, 1.0, 0.25, 0.1) > 0);
  CHECK(step_q_linear(unit_cosine, -pi / 2, 1.0, 0.5, 0.1) < 0);
  CHECK_THROWS_AS(step_q_linear(zero, 0, 0, 0.0, 0.1), UsageError);
}

TEST_CASE("step_q_exponential of the free particle is the Laplace pair") {
  BandLimitedPotential zero;
  for (double z : {0.0, -1.5})
    for (double s : {0.0, 0.4, -7.0}) {
      double exact = std::exp(-0.1 * std::abs(z)) * lorentzian(s, 0.1) / (two_pi * 0.01);
      CHECK(step_q_exponential(zero, z, s, 0.01, 0.1) == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("step_q_exponential against the Jacobi-Anger series") {
  const double frozen[] = {1.7211204747731164, 3.2654703861470997, 6.354411134919147, 12.532417054517996};
  const double eps[] = {0.04, 0.02, 0.01, 0.005};
  for (int i = 0; i < 4; ++i) {
    double q = step_q_exponential(unit_cosine, 0.3, 0.7, eps[i], 0.1);
    CHECK(q == doctest::Approx(frozen[i]).epsilon(1e-11));
    CHECK(q == doctest::Approx(oracles::q_exponential_bessel(unit_cosine, 0.3, 0.7, eps[i], 0.1)).epsilon(1e-11));
  }
  auto two = BandLimitedPotential::from_lines({{1.0, 0.4, 0.3}, {0.6, 0.5, -0.2}});
  for (double z : {-0.9, 0.3})
    for (double s : {0.1, 1.2})
      CHECK(step_q_exponential(two, z, s, 0.05, 0.2) ==
            doctest::Approx(oracles::q_exponential_bessel(two, z, s, 0.05, 0.2)).epsilon(1e-10));
}

TEST_CASE("linearization order of the step factor") {
  const std::vector<double> eps{0.04, 0.02, 0.01, 0.005};
  std::vector<double> lx, ly, ratio;
  for (double e : eps) {
    double qe = step_q_exponential(unit_cosine, 0.3, 0.7, e, 0.1);
    double ql = step_q_linear(unit_cosine, 0.3, 0.7, e, 0.1);
    lx.push_back(std::log(e));
    ly.push_back(std::log(two_pi * e * std::exp(0.1 * 0.3) * std::abs(qe - ql)));
    ratio.push_back(qe / ql);
  }
  CHECK(fit_line(lx, ly).slope == doctest::Approx(2.0).epsilon(0.1));
  for (std::size_t i = 1; i < ratio.size(); ++i) CHECK(std::abs(ratio[i] - 1) < std::abs(ratio[i - 1] - 1));
  CHECK(std::abs(ratio.back() - 1) < 1e-5);
}

TEST_CASE("exponential step factor is real") {
  auto p = BandLimitedPotential::from_lines({{1.0, 0.4, 0.3}, {0.6, 0.5, -0.2}});
  for (double z : {-2.0, 0.3, 1.0})
    for (double s : {-0.5, 0.2, 3.0}) {
      auto d = step_q_exponential_detail(p, z, s, 0.02, 0.1);
      CHECK(std::abs(d.imag) <= 1e-9 * std::abs(d.value));
    }
}

TEST_CASE("positivity_threshold examples") {
  auto rk = BandLimitedPotential::from_lines({{1.0, 1.0 / two_pi, 0.0}});
  CHECK(positivity_threshold(rk, 0.1).lambda_paper == doctest::Approx(two_pi * 0.01).epsilon(1e-13));
  auto t = positivity_threshold(unit_cosine, 0.1);
  CHECK(t.lambda_paper == doctest::Approx(0.01).epsilon(1e-13));
  CHECK(t.lambda_strict == doctest::Approx(1.0 / 26.69633831013799).epsilon(1e-8));
  CHECK(t.lambda_strict < 1.0 / 26.69633831013799);
  auto z = positivity_threshold(BandLimitedPotential{}, 0.1);
  CHECK(z.unconstrained);
  CHECK(z.lambda_paper == std::numeric_limits<double>::infinity());
  CHECK(z.lambda_strict == std::numeric_limits<double>::infinity());
}

TEST_CASE("negative step witness at twice the strict threshold") {
  for (const auto& p : line_potentials())
    for (double g : {0.05, 0.1, 0.2}) {
      double lam = positivity_threshold(p, g).lambda_strict;
      auto w = find_negative_step(p, g, 2 * lam);
      CHECK(w.negative);
      CHECK(w.Q == doctest::Approx(step_q_linear(p, w.z, w.s, 2 * lam, g)).epsilon(1e-14));
      CHECK_FALSE(find_negative_step(p, g, lam).negative);
    }
  auto w = find_negative_step(unit_cosine, 0.1, 0.1);
  CHECK(w.M == doctest::Approx(26.69633831013799).epsilon(1e-9));
  CHECK_FALSE(find_negative_step(BandLimitedPotential{}, 0.1, 10.0).negative);
}

TEST_CASE("path_weight of the free straight path") {
  LatticeConfig c{0, 1, 4, 0.1, -0.5, 0.7};
  auto w = path_weight(BandLimitedPotential{}, straight_path(c), c);
  double expected = c.n;
  auto line = straight_path(c);
  for (int j = 1; j < c.n; ++j) expected *= std::exp(-0.1 * std::abs(line.z[j])) * (2 / 0.1) / (two_pi * c.eps());
  CHECK(w.W == doctest::Approx(expected).epsilon(1e-12));
  CHECK(w.positive);
  CHECK(w.sign == 1);
  CHECK(w.steps.s.size() == 3);
  CHECK(w.lambda.unconstrained);
}

TEST_CASE("path_weight equals n times the product of step factors") {
  SplitMix64 rng(3);
  for (const auto& p : line_potentials()) {
    LatticeConfig c{0, 0.4, 6, 0.1, 0.2, -0.3};
    for (int i = 0; i < 50; ++i) {
      Path path = random_path(c, rng);
      auto w = path_weight(p, path, c);
      double prod = c.n;
      for (double q : w.steps.Q) prod *= q;
      CHECK(w.W == doctest::Approx(prod).epsilon(1e-10));
      CHECK(w.positive == (w.W >= 0));
      auto lw = path_log_weight(p, path.z, c);
      CHECK(lw.sign == w.sign);
      CHECK(lw.log_abs == doctest::Approx(w.log_abs_W).epsilon(1e-14));
    }
  }
}

TEST_CASE("negative step embedded in a path") {
  // n = 2, eps = 0.5: z_1 = -pi/2 with s_1 = 1
  LatticeConfig c{0, 1, 2, 0.1, -pi / 2 + 0.25, -pi / 2 + 0.25};
  Path path{{c.za, -pi / 2, c.zb}};
  auto w = path_weight(unit_cosine, path, c);
  CHECK(w.steps.s[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w.W < 0);
  CHECK_FALSE(w.positive);
  CHECK(w.sign == -1);
}

TEST_CASE("log-domain accumulation for long paths") {
  LatticeConfig c{0, 1, 2000, 0.1, 0, 0};
  auto w = path_weight(BandLimitedPotential{}, straight_path(c), c);
  double per_step = std::log(20.0 / (two_pi * c.eps()));
  CHECK(w.sign == 1);
  CHECK(std::isfinite(w.log_abs_W));
  CHECK(w.log_abs_W == doctest::Approx(std::log(2000.0) + 1999 * per_step).epsilon(1e-12));
}

TEST_CASE("positivity theorem on random paths") {
  SplitMix64 rng(2024);
  for (const auto& p : line_potentials())
    for (double g : {0.05, 0.1, 0.2}) {
      auto t = positivity_threshold(p, g);
      const int n = 8;
      LatticeConfig c{0, n * t.lambda_strict, n, g, 0.3, -1.0};
      int negatives = 0;
      for (int i = 0; i < 10000; ++i) {
        auto w = path_weight(p, random_path(c, rng), c);
        for (double q : w.steps.Q) negatives += q < 0;
        negatives += w.W < 0;
      }
      CHECK(negatives == 0);
    }
}

} // TEST_SUITE
