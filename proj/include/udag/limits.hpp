#pragma once

namespace udag {

/// Limit law of X / n^{(d-1)/d}: the law of c_d * gamma^{1/d} with
/// gamma ~ Gamma(d/(d-1)). For d = 2 this is (pi/sqrt 8) * chi(4).
struct LimitLaw {
  int d = 2;
  double c = 0.0;      // c_d
  double shape = 0.0;  // d/(d-1)

  explicit LimitLaw(int d);

  double cdf(double x) const;
  double pdf(double x) const;    // throws ArgumentError for x < 0
  double moment(double r) const;  // E (c_d gamma^{1/d})^r
};

// c_d = pi (d-1)^{1/d} / (d sin(pi/d)). Throws ArgumentError for d < 2.
double limit_constant(int d);

// c_d^r Gamma(d/(d-1) + r/d) / Gamma(d/(d-1)) * n^{r(d-1)/d}.
double asymptotic_moment(int d, double r, double n);

double limit_cdf(int d, double x);
double limit_pdf(int d, double x);

// E gamma^r = a^r Gamma(s+r)/Gamma(s) for gamma ~ Gamma(shape s, scale a).
double gamma_moment(double s, double a, double r);
// CDF of Gamma(shape s, scale a).
double gamma_cdf(double s, double a, double x);

// Law of the limit of Xi for fan-out d: Gamma(d/(d-1), d-1).
double xi_limit_cdf(int d, double x);

// p(t) = E xi/(xi + t^2) for xi ~ Gamma(2), the limiting probability that
// vertex t sqrt(n) descends from n (d = 2). Closed form 1 - s + s^2 e^s E1(s)
// with s = t^2 up to t = 2; beyond, where that form cancels badly, the
// Stieltjes continued fraction 2/(s+3 - 1*3/(s+5 - 2*4/(s+7 - ...))).
double descendant_density(double t);

// psi_mu(x) = sqrt(x) atan(sqrt(x)/mu) + mu x / (x + mu^2).
double psi_mu(double mu, double x);
// E psi_mu(xi), xi ~ Gamma(2), by quadrature.
double expected_psi(double mu);

// t^d log(1 + xi/t^d); tends to xi as t grows and to 0 at t = 0.
double phase3_profile(int d, double t, double xi);
// xi - phase3_profile(d, t, xi).
double phase3_compensator(int d, double t, double xi);

// 27 pi^{3/2} / (64 sqrt 2), an upper bound for lim E Upsilon/sqrt n.
double upsilon_upper_bound();

}  // namespace udag
