#ifndef DPCMUX_SPECFN_HPP
#define DPCMUX_SPECFN_HPP

namespace dpcmux::specfn {

// Regularized lower incomplete gamma P(s, x) = gamma(s, x) / Gamma(s).
// Series for x < s + 1, Legendre continued fraction otherwise.
// Absolute error <= 1e-12 for s <= 500. Throws std::domain_error for
// s <= 0 or x < 0.
double reg_gamma_lower(double s, double x);

// Pr[chi^2_n <= x] = reg_gamma_lower(n/2, x/2).
double chi_square_cdf(int n, double x);

// CDF of the chi distribution with n degrees of freedom, i.e. of ||Z|| for
// Z ~ N(0, I_n). Zero for t < 0.
double chi_cdf(int n, double t);

// Gamma((n+1)/2) / Gamma(n/2) via log-gamma differences.
double gamma_ratio_half(int n);

// kappa_0(x) = x, kappa_n(x) = x(1-x^2)^n/(2n+1) + 2n/(2n+1) kappa_{n-1}(x).
// Equals the antiderivative int_0^x (1-t^2)^n dt. Requires |x| <= 1, n >= 0.
double kappa(int n, double x);

// Pr[a <= X_1 <= b] for X uniform on the (n-1)-sphere of squared radius
// radius_sq in R^n, n >= 3. Adaptive Gauss-Kronrod quadrature of the
// single-coordinate density
//   f(x) = Gamma(n/2) / (Gamma((n-1)/2) sqrt(pi r^2)) (1 - x^2/r^2)^((n-3)/2)
// on [a, b] clipped to [-r, r]. Absolute tolerance 1e-12, at most 1e4
// subdivisions; throws ConvergenceError instead of returning a silently
// inaccurate value.
double sphere_coord_prob(int n, double radius_sq, double a, double b);

// log C(n, k) for 0 <= k <= n, usable for n up to ~1e15.
double log_binomial(double n, double k);

} // namespace dpcmux::specfn

#endif
