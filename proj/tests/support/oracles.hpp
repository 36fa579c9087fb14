#pragma once

// Test-only reference computations. None of these call into the library's numerics.

#include <complex>
#include <vector>

#include <pathprob/potentials.hpp>

namespace oracles {

// M from the linearized u-integral, by adaptive Gauss-Kronrod panels:
// M = -2 int_0^inf e^{-g u} sin(u s) B(u) du / L(s)
double m_direct(const pathprob::BandLimitedPotential& p, double z, double s, double gamma);

// Exponential step factor from the Jacobi-Anger expansion (up to two lines).
double q_exponential_bessel(const pathprob::BandLimitedPotential& p, double z, double s, double eps,
                            double gamma);

// Free discrete amplitude with Gaussian regularizer e^{-gamma x^2} at each interior node:
// a complex Gaussian integral, det^{-1/2} from the eigenvalues.
std::complex<double> free_gaussian_amplitude(int n, double T, double gamma, double za, double zb);

// First-order Born estimate of |A|^2/|A_0|^2 - 1 for a single cosine line.
double born_relative_shift(double a, double q, double phi, double za, double zb, double T);

// max over a dense (z, s) grid of |M|
double dense_m_scan(const pathprob::BandLimitedPotential& p, double gamma, double zspan, double smax,
                    int nz, int ns);

// free n=2 transition probability, 1-D adaptive integral over the interior point
double free_two_step(double gamma, double za, double zb, double T);

} // namespace oracles
