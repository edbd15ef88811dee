#pragma once

#include "scatterlab/common.hpp"

// Special functions for the Helmholtz kernels, the disk series and the corner
// integral. Integer Bessel orders only; real arguments only.
namespace scatterlab::specfun {

// J_n(x), n >= 0, x >= 0. Throws DomainError for x < 0 or n < 0 and
// RangeError when the result is not representable.
double bessel_j(int order, double x);

// Y_n(x), n >= 0, x > 0. Throws DomainError for x <= 0 (log singularity).
double bessel_y(int order, double x);

// H^(1)_n(x) = J_n(x) + i Y_n(x), x > 0.
cplx hankel1(int order, double x);

// Derivative d/dx H^(1)_n(x) via the recurrence (H_{n-1} - H_{n+1}) / 2.
cplx hankel1_prime(int order, double x);
double bessel_j_prime(int order, double x);

// H0 and H1 together; the kernel hot path. x > 0, no range checks beyond that.
struct Hankel01 {
  cplx h0;
  cplx h1;
};
Hankel01 hankel01(double x);

// H^(1)_1(x) + 2i/(pi x): the first-order Hankel function with its pole
// removed. Accurate down to x -> 0 (behaves like x log x).
cplx hankel1_regular(double x);

// Gamma function on x > 0 (DomainError otherwise).
double gamma_fn(double x);

}  // namespace scatterlab::specfun
