#pragma once

#include <functional>

namespace udag {

// Gamma function by the Lanczos approximation (g = 7, nine terms) with the
// reflection formula below 1/2. Relative error around 1e-15 on (0, 50].
double gamma_function(double x);
double log_gamma(double x);  // x > 0

// Regularized incomplete gamma functions P(s, x) and Q(s, x) = 1 - P(s, x).
// Series for x < s + 1, continued fraction otherwise. Requires s > 0, x >= 0.
double gamma_p(double s, double x);
double gamma_q(double s, double x);

// Exponential integral E1(x) = int_x^inf e^{-t}/t dt for x > 0. Power series
// for x <= 1, modified Lentz continued fraction above.
double exp_integral_e1(double x);
// e^x E1(x), finite for large x where E1 alone underflows.
double scaled_exp_integral_e1(double x);

struct Quadrature {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  int intervals = 0;
};

// Adaptive Gauss-Kronrod (7/15 points) on [a, b], bisecting the interval
// with the largest error estimate until the total estimate is below
// max(abs_tol, rel_tol * |value|) or max_intervals is reached.
Quadrature integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-13, double rel_tol = 1e-12, int max_intervals = 2000);

// Integral over [a, inf) through the substitution x = a + t / (1 - t).
Quadrature integrate_to_infinity(const std::function<double(double)>& f, double a,
                                 double abs_tol = 1e-13, double rel_tol = 1e-12,
                                 int max_intervals = 2000);

}  // namespace udag
