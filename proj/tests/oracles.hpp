#pragma once
// Reference values computed without the library's own special functions or
// quadrature: Boost.Math Bessel/Gamma, adaptive Gauss-Kronrod, brute-force sums.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

inline double j(int n, double x) { return boost::math::cyl_bessel_j(n, x); }
inline double jp(int n, double x) { return boost::math::cyl_bessel_j_prime(n, x); }
inline cplx h(int n, double x) { return {j(n, x), boost::math::cyl_neumann(n, x)}; }
inline cplx hp(int n, double x) { return {jp(n, x), boost::math::cyl_neumann_prime(n, x)}; }

/// J_n by its power series, `terms` terms.
inline double j_series(int n, double x, int terms = 60) {
  double s = 0, t = std::pow(x / 2, n) / std::tgamma(n + 1.0);
  for (int m = 0; m < terms; ++m) {
    s += t;
    t *= -(x * x / 4) / ((m + 1.0) * (m + 1.0 + n));
  }
  return s;
}

/// Penetrable disk of radius r at the origin, plane wave at angle alpha.
/// Transmission: u continuous, gamma * d_r u(in) = d_r u(out).
/// Far field with u^s ~ e^{ik|x|} |x|^{-1/2} u_inf.
struct DiskSeries {
  double r, gamma, q, k, alpha;
  int nmax;
  std::vector<cplx> b;  // scattered coefficients, index n + nmax

  DiskSeries(double r_, double g_, double q_, double k_, double a_) : r(r_), gamma(g_), q(q_), k(k_), alpha(a_) {
    nmax = static_cast<int>(k * r * std::max(1.0, std::sqrt(q / gamma))) + 30;
    const double k1 = k * std::sqrt(q / gamma);
    for (int n = -nmax; n <= nmax; ++n) {
      const int m = std::abs(n);
      const double sgn = (n < 0 && (m % 2)) ? -1.0 : 1.0;  // Z_{-n} = (-1)^n Z_n
      const cplx in = std::pow(cplx(0, 1), n);
      const double J = sgn * j(m, k * r), Jp = sgn * jp(m, k * r);
      const double J1 = sgn * j(m, k1 * r), J1p = sgn * jp(m, k1 * r);
      const cplx H = sgn * h(m, k * r), Hp = sgn * hp(m, k * r);
      b.push_back(in * (k * Jp * J1 - gamma * k1 * J1p * J) / (gamma * k1 * J1p * H - k * Hp * J1));
    }
  }

  // incident coefficient i^n J_n(kr), interior a_n J_n(k1 r)
  cplx coeff_in(int n) const {
    const int m = std::abs(n);
    const double sgn = (n < 0 && (m % 2)) ? -1.0 : 1.0;
    const double k1 = k * std::sqrt(q / gamma);
    const cplx in = std::pow(cplx(0, 1), n);
    return (in * sgn * j(m, k * r) + b[n + nmax] * sgn * h(m, k * r)) / (sgn * j(m, k1 * r));
  }

  // Total field and its radial derivative at polar (rho, theta); interior uses the
  // interior radial derivative (no gamma factor). side: -1 interior, +1 exterior, 0 by rho.
  std::pair<cplx, cplx> total(double rho, double theta, int side = 0) const {
    const double k1 = k * std::sqrt(q / gamma);
    cplx u = 0, du = 0;
    for (int n = -nmax; n <= nmax; ++n) {
      const int m = std::abs(n);
      const double sgn = (n < 0 && (m % 2)) ? -1.0 : 1.0;
      const cplx e = std::exp(cplx(0, n * (theta - alpha)));
      if (side < 0 || (side == 0 && rho < r)) {
        const cplx a = coeff_in(n);
        u += a * sgn * j(m, k1 * rho) * e;
        du += a * sgn * k1 * jp(m, k1 * rho) * e;
      } else {
        const cplx in = std::pow(cplx(0, 1), n);
        u += (in * sgn * j(m, k * rho) + b[n + nmax] * sgn * h(m, k * rho)) * e;
        du += (in * sgn * k * jp(m, k * rho) + b[n + nmax] * sgn * k * hp(m, k * rho)) * e;
      }
    }
    return {u, du};
  }

  cplx far_field(double theta) const {
    cplx s = 0;
    const cplx c = std::sqrt(2 / (pi * k)) * std::exp(cplx(0, -pi / 4));
    for (int n = -nmax; n <= nmax; ++n)
      s += b[n + nmax] * std::pow(cplx(0, -1), n) * std::exp(cplx(0, n * (theta - alpha)));
    return c * s;
  }
};

/// Adaptive Gauss-Kronrod on [a, b] for a complex integrand.
template <class F>
cplx integrate(F&& f, double a, double b, double tol = 1e-13) {
  using boost::math::quadrature::gauss_kronrod;
  const double re = gauss_kronrod<double, 61>::integrate([&](double t) { return f(t).real(); }, a, b, 20, tol);
  const double im = gauss_kronrod<double, 61>::integrate([&](double t) { return f(t).imag(); }, a, b, 20, tol);
  return {re, im};
}

inline double gamma_quad(double x) {
  using boost::math::quadrature::gauss_kronrod;
  // t = s^{1/x} removes the endpoint singularity: int_0^inf e^{-s^{1/x}} ds / x
  const auto f = [x](double s) { return std::exp(-std::pow(s, 1 / x)) / x; };
  return gauss_kronrod<double, 61>::integrate(f, 0.0, std::pow(60.0, x), 25, 1e-14);
}

}  // namespace oracle
