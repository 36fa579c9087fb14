#include "oracles.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracles {

using boost::math::quadrature::gauss_kronrod;
constexpr double pi = std::numbers::pi;

namespace {

template <class F>
double panels(F f, double lo, double hi, double width) {
  int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
  double h = (hi - lo) / n, acc = 0;
  for (int k = 0; k < n; ++k) acc += gauss_kronrod<double, 61>::integrate(f, lo + k * h, lo + (k + 1) * h, 8, 1e-13);
  return acc;
}

double lor(double k, double g) { return 2 * g / (k * k + g * g); }

} // namespace

double m_direct(const pathprob::BandLimitedPotential& p, double z, double s, double gamma) {
  auto B = [&](double u) {
    double b = 0;
    for (const auto& l : p.lines()) b += 2 * l.a * std::sin(l.q * z + l.phi) * std::sin(0.5 * l.q * u);
    return b;
  };
  double U = 40.0 / gamma;
  double val = panels([&](double u) { return std::exp(-gamma * u) * std::sin(u * s) * B(u); }, 0, U, 1.0);
  return -2 * val / lor(s, gamma);
}

double q_exponential_bessel(const pathprob::BandLimitedPotential& p, double z, double s, double eps,
                            double gamma) {
  const auto& L = p.lines();
  auto J = [](int m, double x) {
    double v = std::cyl_bessel_j(std::abs(m), std::abs(x));
    int sgn = ((m < 0 && (std::abs(m) % 2)) ? -1 : 1) * ((x < 0 && (std::abs(m) % 2)) ? -1 : 1);
    return sgn * v;
  };
  double total = 0;
  if (L.empty()) {
    total = lor(s, gamma);
  } else if (L.size() == 1) {
    double b = 2 * eps * L[0].a * std::sin(L[0].q * z + L[0].phi);
    for (int m = -40; m <= 40; ++m) total += J(m, b) * lor(s - 0.5 * m * L[0].q, gamma);
  } else {
    double b0 = 2 * eps * L[0].a * std::sin(L[0].q * z + L[0].phi);
    double b1 = 2 * eps * L[1].a * std::sin(L[1].q * z + L[1].phi);
    for (int m = -30; m <= 30; ++m)
      for (int k = -30; k <= 30; ++k)
        total += J(m, b0) * J(k, b1) * lor(s - 0.5 * m * L[0].q - 0.5 * k * L[1].q, gamma);
  }
  return std::exp(-gamma * std::abs(z)) * total / (2 * pi * eps);
}

std::complex<double> free_gaussian_amplitude(int n, double T, double gamma, double za, double zb) {
  using cd = std::complex<double>;
  const double eps = T / n;
  const int m = n - 1;
  const cd I(0, 1);
  // exponent = -1/2 x^T A x + b^T x + c
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(m, m);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(m);
  for (int j = 0; j < m; ++j) {
    A(j, j) = 2.0 * gamma - 2.0 * I / eps;
    if (j + 1 < m) A(j, j + 1) = A(j + 1, j) = I / eps;
  }
  b(0) += -I * za / eps;
  b(m - 1) += -I * zb / eps;
  cd c = I * (za * za + zb * zb) / (2 * eps);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A);
  cd sqrt_det = 1.0;
  for (int j = 0; j < m; ++j) sqrt_det *= std::sqrt(es.eigenvalues()(j));
  Eigen::VectorXcd y = A.fullPivLu().solve(b);
  cd quad = 0.5 * (b.transpose() * y)(0);
  cd integral = std::pow(2 * pi, 0.5 * m) / sqrt_det * std::exp(quad + c);
  return std::pow(cd(0, 2 * pi * eps), -0.5 * n) * integral;
}

double born_relative_shift(double a, double q, double phi, double za, double zb, double T) {
  auto f = [&](double t) {
    double cbar = za + (zb - za) * t / T;
    return std::cos(q * cbar + phi) * std::sin(q * q * t * (T - t) / (2 * T));
  };
  return -2 * a * gauss_kronrod<double, 61>::integrate(f, 0, T, 10, 1e-14);
}

double dense_m_scan(const pathprob::BandLimitedPotential& p, double gamma, double zspan, double smax,
                    int nz, int ns) {
  double best = 0;
  for (int i = 0; i < nz; ++i) {
    double z = -zspan + 2 * zspan * i / (nz - 1);
    for (int k = 0; k < ns; ++k) {
      double s = -smax + 2 * smax * k / (ns - 1);
      double m = 0;
      for (const auto& l : p.lines()) {
        double c = 0.5 * l.q, g2 = gamma * gamma, num = s * s + g2;
        double d = num / ((s - c) * (s - c) + g2) - num / ((s + c) * (s + c) + g2);
        m -= l.a * std::sin(l.q * z + l.phi) * d;
      }
      best = std::max(best, std::abs(m));
    }
  }
  return best;
}

double free_two_step(double gamma, double za, double zb, double T) {
  const double eps = T / 2;
  auto f = [&](double z) {
    double s = (zb - 2 * z + za) / eps;
    return std::exp(-gamma * std::abs(z)) * lor(s, gamma) / (2 * pi * eps);
  };
  double mid = 0.5 * (za + zb);
  double lo = std::min(0.0, mid), hi = std::max(0.0, mid);
  double reach = 60.0 / gamma;
  double v = panels(f, lo - reach, lo, 0.05) + panels(f, hi, hi + reach, 0.05);
  if (hi > lo) v += panels(f, lo, hi, 0.05);
  return 2 * v / (2 * pi * T);
}

} // namespace oracles
