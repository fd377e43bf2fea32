#include "udag/limits.hpp"

#include <cmath>
#include <numbers>

#include "udag/errors.hpp"
#include "udag/special.hpp"

namespace udag {

namespace {

void check_d(int d) {
  if (d < 2) throw ArgumentError("d must be at least 2");
}

}  // namespace

LimitLaw::LimitLaw(int d_) : d(d_), c(limit_constant(d_)), shape(d_ / (d_ - 1.0)) {}

double LimitLaw::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return gamma_p(shape, std::pow(x / c, d));
}

double LimitLaw::pdf(double x) const {
  if (x < 0.0) throw ArgumentError("limit density is defined for x >= 0");
  if (x == 0.0) return 0.0;
  const double y = std::pow(x / c, d);
  return d * std::exp(shape * std::log(y) - y - log_gamma(shape)) / x;
}

double LimitLaw::moment(double r) const {
  return std::pow(c, r) * gamma_moment(shape, 1.0, r / d);
}

double limit_constant(int d) {
  check_d(d);
  const double dd = d;
  return std::numbers::pi * std::pow(dd - 1.0, 1.0 / dd) / (dd * std::sin(std::numbers::pi / dd));
}

double asymptotic_moment(int d, double r, double n) {
  check_d(d);
  return LimitLaw(d).moment(r) * std::pow(n, r * (d - 1.0) / d);
}

double limit_cdf(int d, double x) { return LimitLaw(d).cdf(x); }
double limit_pdf(int d, double x) { return LimitLaw(d).pdf(x); }

double gamma_moment(double s, double a, double r) {
  if (!(s > 0.0) || !(a > 0.0)) throw ArgumentError("gamma_moment needs s > 0 and a > 0");
  if (!(s + r > 0.0)) throw ArgumentError("gamma_moment needs s + r > 0");
  if (r == 0.0) return 1.0;
  return std::pow(a, r) * std::exp(log_gamma(s + r) - log_gamma(s));
}

double gamma_cdf(double s, double a, double x) {
  if (x <= 0.0) return 0.0;
  return gamma_p(s, x / a);
}

double xi_limit_cdf(int d, double x) {
  check_d(d);
  return gamma_cdf(d / (d - 1.0), d - 1.0, x);
}

double descendant_density(double t) {
  if (t < 0.0) throw ArgumentError("descendant_density needs t >= 0");
  const double s = t * t;
  if (s == 0.0) return 1.0;
  if (t <= 2.0) return 1.0 - s + s * s * scaled_exp_integral_e1(s);
  // Tail terms j(j+2)/(s+2j+3) shrink fast enough for s > 4 that sixty
  // levels reach full double precision.
  double tail = 0.0;
  for (int j = 60; j >= 1; --j) tail = j * (j + 2.0) / (s + 2.0 * j + 3.0 - tail);
  return 2.0 / (s + 3.0 - tail);
}

double psi_mu(double mu, double x) {
  if (!(mu > 0.0) || x < 0.0) throw ArgumentError("psi_mu needs mu > 0 and x >= 0");
  const double root = std::sqrt(x);
  return root * std::atan(root / mu) + mu * x / (x + mu * mu);
}

double expected_psi(double mu) {
  auto integrand = [mu](double x) { return x == 0.0 ? 0.0 : psi_mu(mu, x) * x * std::exp(-x); };
  return integrate(integrand, 0.0, 1.0).value + integrate(integrand, 1.0, 60.0).value;
}

double phase3_profile(int d, double t, double xi) {
  check_d(d);
  if (t < 0.0 || xi < 0.0) throw ArgumentError("phase3_profile needs t >= 0 and xi >= 0");
  if (t == 0.0 || xi == 0.0) return 0.0;
  const double td = std::pow(t, d);
  return td * std::log1p(xi / td);
}

double phase3_compensator(int d, double t, double xi) { return xi - phase3_profile(d, t, xi); }

double upsilon_upper_bound() {
  return 27.0 * std::pow(std::numbers::pi, 1.5) / (64.0 * std::numbers::sqrt2);
}

}  // namespace udag
