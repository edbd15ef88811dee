#include "scatterlab/specfun.hpp"

#include <math.h>  // POSIX j0/j1/y0/y1

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <string>

namespace scatterlab::specfun {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

void require_finite(double v, const char* what, int n, double x) {
  if (!std::isfinite(v))
    throw RangeError(std::string(what) + ": result not representable for order " +
                     std::to_string(n) + ", x = " + std::to_string(x));
}

}  // namespace

double bessel_j(int order, double x) {
  if (order < 0) throw DomainError("bessel_j: negative order");
  if (!(x >= 0.0)) throw DomainError("bessel_j: x must be >= 0");
  double v;
  switch (order) {
    case 0: v = ::j0(x); break;
    case 1: v = ::j1(x); break;
    default: v = boost::math::cyl_bessel_j(order, x); break;
  }
  require_finite(v, "bessel_j", order, x);
  return v;
}

double bessel_y(int order, double x) {
  if (order < 0) throw DomainError("bessel_y: negative order");
  if (!(x > 0.0)) throw DomainError("bessel_y: x must be > 0 (log singularity at 0)");
  double v;
  switch (order) {
    case 0: v = ::y0(x); break;
    case 1: v = ::y1(x); break;
    default:
      try {
        v = boost::math::cyl_neumann(order, x);
      } catch (const std::overflow_error&) {
        v = -HUGE_VAL;
      }
      break;
  }
  require_finite(v, "bessel_y", order, x);
  return v;
}

cplx hankel1(int order, double x) { return {bessel_j(order, x), bessel_y(order, x)}; }

cplx hankel1_prime(int order, double x) {
  if (order == 0) return -hankel1(1, x);
  return 0.5 * (hankel1(order - 1, x) - hankel1(order + 1, x));
}

double bessel_j_prime(int order, double x) {
  if (order == 0) return -bessel_j(1, x);
  return 0.5 * (bessel_j(order - 1, x) - bessel_j(order + 1, x));
}

Hankel01 hankel01(double x) { return {{::j0(x), ::y0(x)}, {::j1(x), ::y1(x)}}; }

cplx hankel1_regular(double x) {
  if (!(x > 0.0)) throw DomainError("hankel1_regular: x must be > 0");
  const double j = ::j1(x);
  if (x >= 2.0) return {j, ::y1(x) + 2.0 / (kPi * x)};
  // Y1 + 2/(pi x) = (2/pi) ln(x/2) J1(x)
  //                 - (1/pi)(x/2) sum_k [psi(k+1) + psi(k+2)] (-x^2/4)^k / (k! (k+1)!)
  const double z = -0.25 * x * x;
  double term = 1.0;  // (-x^2/4)^k / (k! (k+1)!)
  double psi1 = -kEulerGamma;        // psi(k+1)
  double psi2 = 1.0 - kEulerGamma;   // psi(k+2)
  double sum = 0.0;
  for (int k = 0; k < 40; ++k) {
    const double t = (psi1 + psi2) * term;
    sum += t;
    if (std::abs(t) < 1e-18 * std::abs(sum)) break;
    term *= z / ((k + 1.0) * (k + 2.0));
    psi1 += 1.0 / (k + 1.0);
    psi2 += 1.0 / (k + 2.0);
  }
  const double yreg = (2.0 / kPi) * std::log(0.5 * x) * j - (0.5 * x / kPi) * sum;
  return {j, yreg};
}

double gamma_fn(double x) {
  if (!(x > 0.0)) throw DomainError("gamma_fn: x must be > 0");
  const double v = std::tgamma(x);
  if (!std::isfinite(v)) throw RangeError("gamma_fn: overflow at x = " + std::to_string(x));
  return v;
}

}  // namespace scatterlab::specfun
