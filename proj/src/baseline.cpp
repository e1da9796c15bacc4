#include "dpcmux/baseline.hpp"

#include "dpcmux/errors.hpp"
#include "dpcmux/specfn.hpp"
#include "bounds_detail.hpp"

#include <cmath>
#include <limits>

namespace dpcmux::baseline {

using detail::clamp01;
using detail::log_clean_ratio;
using detail::one_minus_pow;
using detail::union_term;
using detail::xlogy;

TimeSharingReport time_sharing_bound(const SystemConfig& cfg, const Thresholds& thr,
                                     const bounds::BoundOptions& opts) {
    cfg.validate();
    if (!(thr.gamma_U > 0.0) || !(thr.gamma_e > 0.0)) {
        throw ValidationError("time_sharing_bound: gamma_U and gamma_e must be positive");
    }

    TimeSharingReport rep;
    const double h2 = cfg.h * cfg.h;
    const double s2 = h2 * cfg.P + 1.0;
    const double nUP = cfg.n_U * cfg.P;
    const int eta = cfg.n_e / cfg.n_U;
    const double g = std::sqrt(2.0) * specfn::gamma_ratio_half(cfg.n_U);
    const double log_clean = log_clean_ratio(h2 * cfg.P);
    const double ln_s2 = std::log(s2);

    // URLLC: the arrived message is alone in its mini-slot at full power, so
    // the surrogate conditional density is exact (sigma3^2 = 1) and only the
    // output-density correction survives in the metric offset. This is the
    // degenerate split (alpha = 0, beta_e = 0, beta_U = 1, delta_b = 0) run
    // through the same miss machinery as the joint scheme, with ln J_U
    // replaced by the interference-free per-block ratio.
    {
        PowerSplit ts_split;
        ts_split.alpha = 0.0;
        ts_split.beta_e = 0.0;
        ts_split.beta_U = 1.0;
        ts_split.delta_b = 0.0;
        Derived d = derive(cfg, ts_split); // sigma3^2 = 1, u = 2 sqrt(nUP)/(h^3 P)
        const double pre = 2.0 * d.sigma2 * d.sigma3_2 / (h2 * (d.sigma2 - d.sigma3_2));
        const double base = 0.5 * cfg.n_U * std::log(d.sigma2 / d.sigma3_2) + log_clean;
        const double shift = (d.sigma3_2 / (d.sigma2 - d.sigma3_2)) * nUP;
        const double mu_U = pre * (base - thr.gamma_U) + shift;
        rep.miss = bounds::miss_upper_chi(cfg.n_U, mu_U, d.u);
        const double L_U = static_cast<double>(cfg.L_U);
        const double log_union =
            cfg.L_U > 1 ? std::log(L_U - 1.0) : -std::numeric_limits<double>::infinity();
        const double q1_ts = one_minus_pow(std::exp(-thr.gamma_U), L_U);
        rep.eps_U_ts_raw = cfg.rho * (rep.miss + union_term(log_union, thr.gamma_U)) +
                           (1.0 - cfg.rho) * q1_ts;
        rep.eps_U_ts = clamp01(rep.eps_U_ts_raw);
    }

    // eMBB: per puncturing count k the codeword sees an interference-free
    // channel over the residual uses; same threshold-miss machinery as the
    // joint scheme's all-clean term.
    const double log_union_e = cfg.L_e > 1
                                   ? std::log(static_cast<double>(cfg.L_e) - 1.0)
                                   : -std::numeric_limits<double>::infinity();
    const double ue = union_term(log_union_e, thr.gamma_e);
    double sum = 0.0, comp = 0.0;
    for (int k = 0; k <= eta; ++k) {
        TimeSharingPerK pk;
        pk.k = k;
        pk.residual_len = cfg.n_e - k * cfg.n_U;
        pk.weight = std::exp(specfn::log_binomial(eta, k) + xlogy(k, cfg.rho) +
                             xlogy(eta - k, 1.0 - cfg.rho));
        if (pk.residual_len == 0) {
            pk.bound = 1.0;
            pk.t_raw = 1.0;
            pk.vacuous = true;
        } else {
            const double cnt = (eta - k) + (opts.appendix_mu ? 1.0 : 0.0);
            pk.mu = 0.5 * pk.residual_len * ln_s2 - cnt * (0.5 * nUP / s2) +
                    (eta - k) * log_clean - thr.gamma_e;
            const double num = pk.residual_len * (s2 - 1.0) / (2.0 * s2) +
                               (eta + 1.0 - k) * std::sqrt(nUP) * g / s2;
            pk.vacuous = !(pk.mu > 0.0);
            pk.t_raw = pk.vacuous ? std::numeric_limits<double>::infinity() : num / pk.mu + ue;
            pk.bound = pk.vacuous ? 1.0 : clamp01(pk.t_raw);
        }
        double v = pk.weight * pk.bound;
        double t = sum + v;
        comp += (std::fabs(sum) >= std::fabs(v)) ? (sum - t) + v : (v - t) + sum;
        sum = t;
        rep.per_k.push_back(pk);
    }
    rep.eps_e_ts_raw = sum + comp;
    rep.eps_e_ts = clamp01(rep.eps_e_ts_raw);
    return rep;
}

} // namespace dpcmux::baseline
