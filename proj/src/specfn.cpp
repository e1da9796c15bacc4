#include "dpcmux/specfn.hpp"
#include "dpcmux/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpcmux::specfn {

namespace {

constexpr int kMaxIter = 1000000;

// Lower series: P(s,x) = x^s e^-x / Gamma(s+1) * sum_k x^k / ((s+1)...(s+k)).
double gamma_p_series(double s, double x) {
    double term = 1.0 / s;
    double sum = term;
    double ap = s;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-17) {
            return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
        }
    }
    throw ConvergenceError("reg_gamma_lower: series did not converge (s=" +
                           std::to_string(s) + ", x=" + std::to_string(x) + ")");
}

// Upper continued fraction (modified Lentz): Q(s,x); returns P = 1 - Q.
double gamma_p_contfrac(double s, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) {
            double q = std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
            return 1.0 - q;
        }
    }
    throw ConvergenceError("reg_gamma_lower: continued fraction did not converge (s=" +
                           std::to_string(s) + ", x=" + std::to_string(x) + ")");
}

// 15-point Kronrod nodes/weights on [-1,1] with the embedded 7-point Gauss rule.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename F>
void gauss_kronrod_15(const F& f, double a, double b, double* result, double* err) {
    const double c = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);
    const double fc = f(c);
    double res_g = fc * kWg[3];
    double res_k = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        double x = hl * kXgk[j];
        double fsum = f(c - x) + f(c + x);
        res_k += kWgk[j] * fsum;
        if (j % 2 == 1) res_g += kWg[j / 2] * fsum;
    }
    *result = res_k * hl;
    *err = std::fabs((res_k - res_g) * hl);
}

struct Interval {
    double a, b, result, err;
};

template <typename F>
double adaptive_quadrature(const F& f, double a, double b, double abs_tol, int max_subdiv) {
    if (a >= b) return 0.0;
    std::vector<Interval> stack;
    Interval whole{a, b, 0.0, 0.0};
    gauss_kronrod_15(f, a, b, &whole.result, &whole.err);
    stack.push_back(whole);
    double total = whole.result;
    double total_err = whole.err;
    int subdivisions = 0;
    while (total_err > abs_tol) {
        if (++subdivisions > max_subdiv) {
            throw ConvergenceError("sphere_coord_prob: quadrature exceeded subdivision cap");
        }
        // Split the interval with the largest error estimate.
        auto worst = std::max_element(stack.begin(), stack.end(),
                                      [](const Interval& l, const Interval& r) { return l.err < r.err; });
        Interval cur = *worst;
        stack.erase(worst);
        double mid = 0.5 * (cur.a + cur.b);
        Interval left{cur.a, mid, 0.0, 0.0}, right{mid, cur.b, 0.0, 0.0};
        gauss_kronrod_15(f, left.a, left.b, &left.result, &left.err);
        gauss_kronrod_15(f, right.a, right.b, &right.result, &right.err);
        total += left.result + right.result - cur.result;
        total_err += left.err + right.err - cur.err;
        stack.push_back(left);
        stack.push_back(right);
    }
    // Re-sum for a deterministic, cancellation-free total.
    double sum = 0.0, comp = 0.0;
    std::sort(stack.begin(), stack.end(), [](const Interval& l, const Interval& r) { return l.a < r.a; });
    for (const Interval& iv : stack) {
        double y = iv.result - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

} // namespace

double reg_gamma_lower(double s, double x) {
    if (!(s > 0.0)) throw std::domain_error("reg_gamma_lower: s must be positive");
    if (!(x >= 0.0)) throw std::domain_error("reg_gamma_lower: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    double p = (x < s + 1.0) ? gamma_p_series(s, x) : gamma_p_contfrac(s, x);
    return std::min(1.0, std::max(0.0, p));
}

double chi_square_cdf(int n, double x) {
    if (n < 1) throw std::domain_error("chi_square_cdf: n must be >= 1");
    if (!(x >= 0.0)) throw std::domain_error("chi_square_cdf: x must be nonnegative");
    return reg_gamma_lower(0.5 * n, 0.5 * x);
}

double chi_cdf(int n, double t) {
    if (t <= 0.0) return 0.0;
    return chi_square_cdf(n, t * t);
}

double gamma_ratio_half(int n) {
    if (n < 1) throw std::domain_error("gamma_ratio_half: n must be >= 1");
    return std::exp(std::lgamma(0.5 * (n + 1)) - std::lgamma(0.5 * n));
}

double kappa(int n, double x) {
    if (n < 0) throw std::domain_error("kappa: index must be a nonnegative integer");
    if (std::fabs(x) > 1.0) throw std::domain_error("kappa: |x| must be <= 1");
    double k = x;
    double one_minus_x2 = (1.0 - x) * (1.0 + x);
    double p = 1.0; // (1 - x^2)^i
    for (int i = 1; i <= n; ++i) {
        p *= one_minus_x2;
        k = x * p / (2.0 * i + 1.0) + (2.0 * i) / (2.0 * i + 1.0) * k;
    }
    return k;
}

double sphere_coord_prob(int n, double radius_sq, double a, double b) {
    if (n < 3) throw std::domain_error("sphere_coord_prob: n must be >= 3");
    if (!(radius_sq > 0.0)) throw std::domain_error("sphere_coord_prob: radius^2 must be positive");
    if (a > b) throw std::domain_error("sphere_coord_prob: need a <= b");
    const double r = std::sqrt(radius_sq);
    const double lo = std::max(a, -r);
    const double hi = std::min(b, r);
    if (lo >= hi) return 0.0;
    const double norm = std::exp(std::lgamma(0.5 * n) - std::lgamma(0.5 * (n - 1))) /
                        std::sqrt(M_PI * radius_sq);
    const double expo = 0.5 * (n - 3);
    auto density = [&](double x) {
        double t = (x / r) * (x / r);
        if (t >= 1.0) return 0.0;
        if (expo == 0.0) return norm;
        return norm * std::exp(expo * std::log1p(-t));
    };
    return adaptive_quadrature(density, lo, hi, 1e-12, 10000);
}

double log_binomial(double n, double k) {
    if (k < 0 || k > n) throw std::domain_error("log_binomial: need 0 <= k <= n");
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

} // namespace dpcmux::specfn
