#include "dpcmux/model.hpp"
#include "dpcmux/errors.hpp"

#include <cmath>
#include <string>

namespace dpcmux {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
}

} // namespace

void SystemConfig::validate() const {
    require(std::isfinite(P) && P > 0.0, "SystemConfig: P must be positive");
    require(std::isfinite(h) && h > 0.0, "SystemConfig: h must be positive");
    require(n_U >= 1, "SystemConfig: n_U must be >= 1");
    require(n_e >= n_U, "SystemConfig: n_e must be >= n_U");
    require(std::isfinite(rho) && rho >= 0.0 && rho <= 1.0, "SystemConfig: rho must lie in [0, 1]");
    require(L_e >= 1, "SystemConfig: L_e must be >= 1");
    require(L_U >= 1, "SystemConfig: L_U must be >= 1");
    require(L_v >= 1, "SystemConfig: L_v must be >= 1");
}

void PowerSplit::validate(const SystemConfig& cfg) const {
    require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 1.0,
            "PowerSplit: alpha must lie in [0, 1]");
    require(std::isfinite(beta_e) && beta_e >= 0.0 && beta_e <= 1.0,
            "PowerSplit: beta_e must lie in [0, 1]");
    require(std::fabs(beta_U + beta_e - 1.0) <= 1e-12,
            "PowerSplit: beta_U + beta_e must equal 1");
    require(std::isfinite(delta_b) && delta_b > 0.0, "PowerSplit: delta_b must be positive");
    require(delta_b < cfg.n_U * beta_U * cfg.P,
            "PowerSplit: delta_b must be smaller than n_U * beta_U * P (shell would be empty)");
}

void Thresholds::validate() const {
    require(std::isfinite(gamma_U) && gamma_U > 0.0, "Thresholds: gamma_U must be positive");
    require(std::isfinite(gamma_e) && gamma_e > 0.0, "Thresholds: gamma_e must be positive");
    require(std::isfinite(gamma_e_tilde) && gamma_e_tilde > 0.0,
            "Thresholds: gamma_e_tilde must be positive");
}

Derived derive(const SystemConfig& cfg, const PowerSplit& split) {
    Derived d;
    const double h2 = cfg.h * cfg.h;
    const double one_minus_a = 1.0 - split.alpha;
    const double beta_v = split.beta_v();
    d.sigma2 = h2 * cfg.P + 1.0;
    d.sigma2_2 = h2 * beta_v * cfg.P + 1.0;
    d.sigma3_2 = h2 * one_minus_a * one_minus_a * split.beta_e * cfg.P + 1.0;
    if (!(d.sigma2 > d.sigma3_2)) {
        throw DegenerateSplit("derive: sigma^2 == sigma3^2 (alpha=" + std::to_string(split.alpha) +
                              ", beta_e=" + std::to_string(split.beta_e) +
                              "); the miss-event exponent divides by zero");
    }
    const double nP = cfg.n_U * cfg.P;
    const double sb_U = std::sqrt(split.beta_U);
    const double sb_e = std::sqrt(split.beta_e);
    d.u = 2.0 * std::sqrt(nP) *
          (d.sigma3_2 * (sb_U + sb_e) + d.sigma2 * sb_e * one_minus_a) /
          (cfg.h * (d.sigma2 - d.sigma3_2));
    d.tau = std::sqrt(nP) *
            (std::sqrt(beta_v) * (d.sigma2 + d.sigma2_2) + one_minus_a * sb_e * d.sigma2_2) /
            (d.sigma2 * d.sigma2_2);
    d.eta = cfg.n_e / cfg.n_U;
    d.tail_len = cfg.n_e - d.eta * cfg.n_U;
    return d;
}

LambdaPair lambda_pair(double x, double u) {
    LambdaPair p;
    const double disc = x + 0.25 * u * u;
    if (disc < 0.0) {
        p.valid = false;
        return p;
    }
    const double root = std::sqrt(disc);
    p.lambda = 0.5 * x + 0.25 * u * u - 0.5 * u * root;
    p.lambda_tilde = 0.5 * x + 0.25 * u * u + 0.5 * u * root;
    p.valid = true;
    return p;
}

} // namespace dpcmux
