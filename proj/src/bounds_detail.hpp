#ifndef DPCMUX_BOUNDS_DETAIL_HPP
#define DPCMUX_BOUNDS_DETAIL_HPP

#include <algorithm>
#include <cmath>
#include <limits>

namespace dpcmux::detail {

inline double clamp01(double x) {
    if (std::isnan(x)) return 1.0;
    return std::min(1.0, std::max(0.0, x));
}

// e * ln(base) with the 0 * ln(0) = 0 convention used by binomial weights.
inline double xlogy(double e, double base) {
    if (e == 0.0) return 0.0;
    return e * std::log(base);
}

// ln of the per-block density-ratio constant sqrt(8(1+2 h^2 w P)) / (27 sqrt(pi) (1 + h^2 w P))
// where w scales the effective per-block SNR (w = 1 for a full-power block).
inline double log_clean_ratio(double h2wP) {
    return 0.5 * std::log(8.0 * (1.0 + 2.0 * h2wP)) - std::log(27.0) - 0.5 * std::log(M_PI) -
           std::log1p(h2wP);
}

// (count - 1) e^{-gamma} union term, in linear scale, safe for huge counts.
inline double union_term(double log_count_minus_one, double gamma) {
    if (log_count_minus_one == -std::numeric_limits<double>::infinity()) return 0.0;
    return std::exp(log_count_minus_one - gamma);
}

// 1 - (1 - p)^m without cancellation.
inline double one_minus_pow(double p, double m) {
    if (p >= 1.0) return 1.0;
    return -std::expm1(m * std::log1p(-p));
}

} // namespace dpcmux::detail

#endif
