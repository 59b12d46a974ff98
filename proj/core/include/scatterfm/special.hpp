#pragma once

// Integer-order cylinder functions of real positive argument.

#include <complex>

namespace sfm {

double bessel_j(int n, double x);
double bessel_y(int n, double x);
std::complex<double> hankel1(int n, double x);

/// d/dx J_n(x), d/dx H_n^(1)(x).
double bessel_j_prime(int n, double x);
std::complex<double> hankel1_prime(int n, double x);

/// Sound-soft disk coefficient a_n = -J_n(kR) / H_n^(1)(kR).
std::complex<double> mie_dirichlet_coefficient(int n, double kr);

inline constexpr double kEulerGamma = 0.57721566490153286061;

}  // namespace sfm
