#include "scatterfm/special.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>

namespace sfm {

double bessel_j(int n, double x) { return boost::math::cyl_bessel_j(n, x); }

double bessel_y(int n, double x) { return boost::math::cyl_neumann(n, x); }

std::complex<double> hankel1(int n, double x) { return {bessel_j(n, x), bessel_y(n, x)}; }

double bessel_j_prime(int n, double x) { return boost::math::cyl_bessel_j_prime(n, x); }

std::complex<double> hankel1_prime(int n, double x) {
  return {boost::math::cyl_bessel_j_prime(n, x), boost::math::cyl_neumann_prime(n, x)};
}

std::complex<double> mie_dirichlet_coefficient(int n, double kr) { return -bessel_j(n, kr) / hankel1(n, kr); }

}  // namespace sfm
