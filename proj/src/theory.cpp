#include "forgetting/theory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace forgetting::theory {

namespace {
void require_domain(bool ok, const char* fn, double v) {
  if (!ok) {
    throw std::domain_error(std::string(fn) + ": argument " +
                            std::to_string(v) + " outside domain");
  }
}
}  // namespace

double drift(double z) {
  require_domain(z >= 0.0 && z < 1.0, "drift", z);
  return -std::log1p(-z) - 1.0;
}

double qvar_integrand_x(double m) {
  require_domain(m >= 0.0 && m <= kZ0, "qvar_integrand_x", m);
  const double u = 1.0 - m;
  return std::numbers::e - 1.0 - (2.0 * std::log(u) + 1.0) / u;
}

double qvar_integrand_n(double m) {
  require_domain(m >= 0.0 && m <= kZ0, "qvar_integrand_n", m);
  const double u = 1.0 - m;
  return (-2.0 * std::log(u) - 3.0) / u + 2.0 * std::numbers::e - 2.0;
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double half_normal_scaled_cdf(double x) {
  if (x < 0.0) return 0.0;
  return std::erf(x * std::numbers::e / 2.0);
}

double symdiff_limit_density(double x) {
  if (x <= 0.0) return 0.0;
  const double e = std::numbers::e;
  const double ex = e * x;
  return e * ex * ex / (2.0 * std::sqrt(std::numbers::pi)) *
         std::exp(-ex * ex / 4.0);
}

double symdiff_limit_cdf(double x) {
  if (x <= 0.0) return 0.0;
  const double a = x * std::numbers::e / 2.0;
  return std::erf(a) -
         2.0 * a / std::sqrt(std::numbers::pi) * std::exp(-a * a);
}

double drifted_max_cdf(double a, double mu) {
  if (a <= 0.0) return 0.0;
  // Phi(a-mu) - exp(2*mu*a)*Phi(-a-mu), with the second term evaluated in
  // log space so large positive drifts cannot overflow the exponential.
  const double first = normal_cdf(a - mu);
  const double tail = normal_cdf(-a - mu);
  double second;
  if (tail > 0.0) {
    second = std::exp(2.0 * mu * a + std::log(tail));
  } else {
    second = 0.0;
  }
  const double value = first - second;
  if (value < 0.0) return 0.0;
  if (value > 1.0) return 1.0;
  return value;
}

}  // namespace forgetting::theory
