#ifndef DPCMUX_TEST_ORACLES_HPP
#define DPCMUX_TEST_ORACLES_HPP

#include <cstdint>
#include <random>
#include <vector>

// Test-only reference implementations, kept independent of the library code
// paths they check.
namespace oracles {

// Regularized lower incomplete gamma in long double precision: Kummer series
// below the x = s + 1 split and the Legendre continued fraction above it,
// both run to (at most) 1e6 terms at long-double tolerance.
long double reg_gamma_lower_ld(long double s, long double x);

// int_0^x (1 - t^2)^n dt by adaptive Simpson in long double; the recursion-
// free definition of the kappa antiderivative.
long double kappa_integral(int n, long double x, long double tol = 1e-12L);

// Empirical CDF comparison helper: max |F_emp - F_ref| over the sorted
// sample, with F_ref evaluated by linear interpolation on a dense grid.
double ks_statistic(std::vector<double> samples, const std::vector<double>& grid_x,
                    const std::vector<double>& grid_cdf);

// Monte Carlo estimate of the DPC shell-hit probability: draws the two
// sphere vectors and tests the shell membership inequality directly.
struct ShellMC {
    double rate = 0.0;
    double std_err = 0.0;
};
ShellMC shell_membership_mc(int n_U, double P, double alpha, double beta_e, double delta_b,
                            std::uint64_t draws, std::uint64_t seed);

} // namespace oracles

#endif
