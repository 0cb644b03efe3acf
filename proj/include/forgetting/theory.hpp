#pragma once

#include <cmath>
#include <numbers>

namespace forgetting::theory {

// Critical threshold: arrivals above z0 are asymptotically the retained set.
inline const double kZ0 = 1.0 - 1.0 / std::numbers::e;
// Limit of size/n.
inline const double kMeanRate = 1.0 / std::numbers::e;
// Brownian coefficient of the centered size path: sqrt(3-e)/e.
inline const double kCltCoeff =
    std::sqrt(3.0 - std::numbers::e) / std::numbers::e;
// Scale of the L/R limit laws: sqrt(2)/e.
inline const double kLrScale = std::numbers::sqrt2 / std::numbers::e;
// Quadratic-variation rate of the martingale X(z0,.).
inline constexpr double kXQvar = 2.0;
// Quadratic-variation rate of the size martingale N.
inline const double kNQvar = 3.0 - std::numbers::e;

// The closed-form constants bundled for table output.
struct TheoryModel {
  double z0 = kZ0;
  double mean_rate = kMeanRate;
  double clt_coeff = kCltCoeff;
  double lr_scale = kLrScale;
  double x_qvar = kXQvar;
  double n_qvar = kNQvar;
};

// Conditional one-step drift of the branching weight W(z,.) while nonempty:
// -log(1-z) - 1. Zero exactly at z0. Domain [0,1); throws std::domain_error.
double drift(double z);

// Conditional variance of a one-step X(z0,.) increment given pre-step
// minimum m: e-1 - (2*log(1-m)+1)/(1-m). Domain [0,z0] (the increment is
// zero when the minimum exceeds z0); throws std::domain_error outside.
double qvar_integrand_x(double m);

// Same for the size martingale N: (-2*log(1-m)-3)/(1-m) + 2e-2 on [0,z0].
double qvar_integrand_n(double m);

// Standard normal CDF, absolute error well below 1e-12.
double normal_cdf(double x);

// CDF of sqrt(2)/e * |N|, the limit law of both L_n/sqrt(n) and R_n/sqrt(n):
// erf(x*e/2) for x >= 0, else 0.
double half_normal_scaled_cdf(double x);

// Density of the symmetric-difference limit: e^3 x^2/(2 sqrt(pi)) *
// exp(-e^2 x^2/4) on x > 0.
double symdiff_limit_density(double x);

// Its CDF: erf(a) - 2a/sqrt(pi) * exp(-a^2) with a = x*e/2. The closed form
// is unit-tested against direct quadrature of the density.
double symdiff_limit_cdf(double x);

// P(sup_{s<=1}(B_s + mu*s) <= a) = Phi(a-mu) - exp(2*mu*a)*Phi(-a-mu) for
// a >= 0, else 0. At mu=0 this reduces to the scale-1 half-normal CDF.
double drifted_max_cdf(double a, double mu);

// Adaptive Simpson quadrature to absolute tolerance `tol`.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12);

namespace detail {
template <class F>
double simpson_step(const F& f, double a, double fa, double b, double fb,
                    double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

template <class F>
double integrate(F&& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

}  // namespace forgetting::theory
