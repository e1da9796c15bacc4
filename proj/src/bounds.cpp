#include "dpcmux/bounds.hpp"

#include "dpcmux/errors.hpp"
#include "dpcmux/specfn.hpp"
#include "bounds_detail.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace dpcmux::bounds {

using detail::clamp01;
using detail::one_minus_pow;
using detail::union_term;
using detail::xlogy;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Neumaier-compensated accumulator; the bound mixtures are summed in fixed
// ascending-k order so results do not depend on evaluation scheduling.
struct Accum {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

} // namespace

double miss_upper_chi(int n_U, double x, double u) {
    const double disc = x + 0.25 * u * u;
    if (!(disc >= 0.0)) return 1.0; // quadratic event certain (lambda_pair sentinel)
    const double root = std::sqrt(disc);
    return 1.0 - specfn::chi_cdf(n_U, root - 0.5 * u) + specfn::chi_cdf(n_U, -root - 0.5 * u);
}

double miss_lower_chi(int n_U, double x, double u) {
    const double disc = x + 0.25 * u * u;
    if (!(disc >= 0.0)) return 1.0;
    const double root = std::sqrt(disc);
    return 1.0 - specfn::chi_cdf(n_U, root + 0.5 * u) + specfn::chi_cdf(n_U, 0.5 * u - root);
}

double miss_upper_gamma(int n_U, double x, double u) {
    LambdaPair lp = lambda_pair(x, u);
    if (!lp.valid) return 1.0;
    const double root = std::sqrt(x + 0.25 * u * u);
    // 2 lambda = (root - u/2)^2; the G term survives only on the positive branch.
    double low = (root - 0.5 * u) > 0.0 ? specfn::reg_gamma_lower(0.5 * n_U, lp.lambda) : 0.0;
    double high = (-root - 0.5 * u) > 0.0 ? specfn::reg_gamma_lower(0.5 * n_U, lp.lambda_tilde) : 0.0;
    return 1.0 - low + high;
}

double miss_lower_gamma(int n_U, double x, double u) {
    LambdaPair lp = lambda_pair(x, u);
    if (!lp.valid) return 1.0;
    const double root = std::sqrt(x + 0.25 * u * u);
    double high = (root + 0.5 * u) > 0.0 ? specfn::reg_gamma_lower(0.5 * n_U, lp.lambda_tilde) : 0.0;
    double low = (0.5 * u - root) > 0.0 ? specfn::reg_gamma_lower(0.5 * n_U, lp.lambda) : 0.0;
    return 1.0 - high + low;
}

double zeta(const SystemConfig& cfg, const PowerSplit& split) {
    // alpha = 0 (or beta_e = 0): the DPC output is the bin codeword itself,
    // whose norm sits exactly on the shell boundary, so every bin qualifies.
    if (split.alpha == 0.0 || split.beta_e == 0.0) return 1.0;
    const double beta_v = split.beta_v();
    const double nP = cfg.n_U * cfg.P;
    const double scale = std::sqrt(beta_v * nP);
    const double lo = split.alpha * split.beta_e * nP / scale;
    const double width = split.delta_b / (2.0 * split.alpha * scale);
    return specfn::sphere_coord_prob(cfg.n_U, split.beta_e * nP, lo, lo + width);
}

BoundEvaluator::BoundEvaluator(const SystemConfig& cfg, const PowerSplit& split,
                               const BoundOptions& opts)
    : cfg_(cfg), split_(split), opts_(opts) {
    if (split.alpha == 1.0) {
        throw DegenerateSplit("bounds: alpha = 1 puts a zero in the J_U denominator");
    }
    derived_ = derive(cfg, split); // throws DegenerateSplit when sigma^2 == sigma3^2
    zeta_ = bounds::zeta(cfg, split);
    g_ = std::sqrt(2.0) * specfn::gamma_ratio_half(cfg.n_U);
    LL_ = static_cast<double>(cfg.L_v) * static_cast<double>(cfg.L_U);
    log_union_U_ = LL_ > 1.0 ? std::log(LL_ - 1.0) : -kInf;
    log_union_e_ = cfg.L_e > 1 ? std::log(static_cast<double>(cfg.L_e) - 1.0) : -kInf;

    const double h2 = cfg.h * cfg.h;
    const double a = split.alpha, be = split.beta_e, bU = split.beta_U;
    const double bv = split.beta_v();
    const double oma = 1.0 - a;
    const double nU = cfg.n_U, nUP = cfg.n_U * cfg.P;
    const double s2 = derived_.sigma2, s22 = derived_.sigma2_2, s32 = derived_.sigma3_2;
    const double w3 = h2 * oma * oma * be * cfg.P; // sigma3^2 - 1

    // Per-block log factors of J_e / J_e_tilde.
    log_clean_ = detail::log_clean_ratio(h2 * cfg.P);
    log_sic3_ = detail::log_clean_ratio(w3);
    if (be == 0.0) {
        log_dpc_ = -kInf;
    } else {
        log_dpc_ = std::log(M_PI) + 0.5 * (nU + 1.0) * std::log(2.0) - 0.5 * h2 * bv * cfg.P * nU +
                   0.5 * (std::log(bv) + std::log(be)) - std::log(9.0) - std::log(h2) -
                   (nU - 1.0) * std::log(oma) - std::log(bv + oma * oma * be);
    }

    // J_U and J_U_tilde (log scale).
    if (be == 0.0) {
        log_J_U_value_ = -kInf;
    } else {
        log_J_U_value_ = std::log(M_PI) + 0.5 * (std::log(bv) + std::log(be)) +
                         0.5 * (nU + 1.0) * std::log(2.0) - 0.5 * w3 * nU - std::log(9.0) -
                         std::log(h2) - std::log(oma) - std::log(bv + oma * oma * be);
    }
    log_J_Ut_value_ = std::log(27.0) + 0.5 * std::log(M_PI) + std::log1p(w3) +
                      nU * h2 * cfg.P * (bv + oma * oma * be) - std::log(2.0) -
                      (nU - 2.0) * std::log(h2 * oma) - 0.5 * std::log(8.0 * (1.0 + 2.0 * w3));

    // mu_U(gamma) = pre (base - gamma) + shift; same for the tilde variant.
    pre_U_ = 2.0 * s2 * s32 / (h2 * (s2 - s32));
    const double half_log_ratio = 0.5 * nU * std::log(s2 / s32);
    base_U_ = half_log_ratio + log_J_U_value_;
    base_Ut_ = half_log_ratio + log_J_Ut_value_;
    const double sbU = std::sqrt(bU), sbe = std::sqrt(be);
    shift_U_ = (s32 / (s2 - s32)) * (nUP * (sbU - sbe) * (sbU - sbe) - split.delta_b) -
               s2 * nU * be * cfg.P * oma * oma / (s2 - s32);
    shift_Ut_ = (s32 / (s2 - s32)) * (nUP * (sbU + sbe) * (sbU + sbe)) -
                s2 * nU * be * cfg.P * oma * oma / (s2 - s32);

    // Per-k / per-(k, kt) tables for the eMBB bounds.
    const int eta = derived_.eta;
    const double ln_s2 = std::log(s2), ln_s22 = std::log(s22);
    const double mixed = std::sqrt(bv) + oma * sbe; // sqrt(beta_v) + (1-alpha) sqrt(beta_e)
    A_.resize(eta + 1);
    N_.resize(eta + 1);
    logJe_.resize(eta + 1);
    B_.resize((eta + 1) * (eta + 1), -kInf);
    C_.resize((eta + 1) * (eta + 1), 0.0);
    logJet_.resize((eta + 1) * (eta + 1), -kInf);
    for (int k = 0; k <= eta; ++k) {
        const double cnt = (eta - k) + (opts_.appendix_mu ? 1.0 : 0.0);
        logJe_[k] = (eta - k) * log_clean_ + (k == 0 ? 0.0 : k * log_dpc_);
        A_[k] = 0.5 * cfg.n_e * ln_s2 - cnt * (0.5 * nUP / s2) + logJe_[k] -
                k * (0.5 * nU * ln_s22) + k * (0.5 * bv * nUP / s22) -
                k * (0.5 * mixed * mixed * nUP / s2);
        N_[k] = (cfg.n_e - k * nU) * (s2 - 1.0) / (2.0 * s2) +
                (eta + 1.0 - k) * std::sqrt(nUP) * g_ / s2 + k * derived_.tau * g_ +
                k * nU * (s2 - s22) / (2.0 * s2 * s22);
        for (int kt = 0; kt <= k; ++kt) {
            logJet_[idx(k, kt)] = (eta - k) * log_clean_ + (kt == 0 ? 0.0 : kt * log_sic3_) +
                                  (k == kt ? 0.0 : (k - kt) * log_dpc_);
            B_[idx(k, kt)] = 0.5 * cfg.n_e * ln_s2 +
                             nUP * (0.5 * (k - kt) * (bv / s22 - mixed * mixed / s2 - ln_s22 / cfg.P) +
                                    0.5 * kt * std::log(s32 / s2) / cfg.P -
                                    (eta - k) / (2.0 * s2) - 0.5 * kt * oma * oma * be / s32) +
                             logJet_[idx(k, kt)];
            C_[idx(k, kt)] = kt * (g_ * (derived_.tau - oma * std::sqrt(nU * be * cfg.P) / s32) +
                                   nU * ((s2 - s22) / (2.0 * s2 * s22) - (s32 - 1.0) / (2.0 * s32)));
        }
    }
}

QBlock BoundEvaluator::q_block(double gamma_U) const {
    QBlock qb;
    qb.zeta = zeta_;
    qb.rho_U = cfg_.rho * one_minus_pow(zeta_, static_cast<double>(cfg_.L_v));
    qb.log_J_U = LogValue::from_log(log_J_U_value_);
    qb.log_J_U_tilde = LogValue::from_log(log_J_Ut_value_);
    qb.mu_U = pre_U_ * (base_U_ - gamma_U) + shift_U_;
    qb.mu_U_tilde = pre_U_ * (base_Ut_ - gamma_U) + shift_Ut_;
    const double u = derived_.u;
    qb.miss_upper = miss_upper_chi(cfg_.n_U, qb.mu_U, u);
    qb.miss_lower = miss_lower_chi(cfg_.n_U, qb.mu_U_tilde, u);
    qb.q1 = one_minus_pow(std::exp(-gamma_U), LL_);
    // The inner expression of q2/q4 is itself the per-codeword miss bound, so
    // the L_v L_U power acts on `miss`, not on its complement.
    qb.all_miss = qb.miss_upper > 0.0 ? std::exp(LL_ * std::log(qb.miss_upper)) : 0.0;
    qb.q2 = qb.miss_upper > 0.0 ? -std::expm1(LL_ * std::log(qb.miss_upper)) : 1.0;
    qb.q4 = qb.miss_lower > 0.0 ? -std::expm1(LL_ * std::log(qb.miss_lower)) : 1.0;
    qb.q_raw = qb.miss_upper + union_term(log_union_U_, gamma_U);
    qb.q = clamp01(qb.q_raw);
    qb.q3 = qb.rho_U * qb.q4 + (1.0 - qb.rho_U) * qb.q1;
    return qb;
}

BoundEvaluator::MixWeights BoundEvaluator::mix_weights(const QBlock& qb) const {
    const int eta = derived_.eta;
    MixWeights w;
    w.outer_tin.resize(eta + 1);
    w.outer_sic.resize(eta + 1);
    w.delta_raw.resize(eta + 1);
    w.delta.resize(eta + 1);
    w.inner.assign((eta + 1) * (eta + 1), 0.0);
    assert(qb.q3 >= 0.0 && "binomial weight base q3 must be nonnegative");
    assert(qb.rho_U * qb.q2 <= 1.0 && "binomial weight base 1 - rho_U q2 must be nonnegative");
    const double no_det = 1.0 - qb.rho_U * qb.q2;
    // Delta's denominator is the per-block detection probability bound
    // rho_U q4 + (1 - rho_U) q1 = q3, applied once per detected block; this
    // keeps Delta <= 1 (the detection-pattern ratio it upper-bounds).
    const double den1 = qb.q3;
    for (int k = 0; k <= eta; ++k) {
        const double lb = specfn::log_binomial(eta, k);
        w.outer_tin[k] = std::exp(lb + xlogy(k, qb.q3) + xlogy(eta - k, no_det));
        w.outer_sic[k] = std::exp(lb + xlogy(k, qb.q4) + xlogy(eta - k, no_det));
        // Delta(k): detection-pattern probability ratio; log scale, with
        // 0^0 = 1 and saturation (not NaN) when the denominator vanishes.
        const double log_num = xlogy(k, qb.rho_U) + xlogy(k, qb.q2) +
                               xlogy(eta - k, 1.0 - qb.rho_U) + xlogy(eta - k, 1.0 - qb.q1);
        const double log_den = xlogy(k, den1) + xlogy(eta - k, no_det);
        double d;
        if (log_num == -kInf) {
            d = 0.0;
        } else if (log_den == -kInf) {
            d = kInf;
        } else {
            d = std::exp(log_num - log_den);
        }
        w.delta_raw[k] = std::min(d, std::numeric_limits<double>::max());
        w.delta[k] = clamp01(d);
        for (int kt = 0; kt <= k; ++kt) {
            w.inner[idx(k, kt)] =
                std::exp(specfn::log_binomial(k, kt) + xlogy(kt, qb.q) + xlogy(k - kt, 1.0 - qb.q));
        }
    }
    return w;
}

double BoundEvaluator::eps_urllc(const QBlock& qb, double* raw) const {
    const double no_bin = std::exp(static_cast<double>(cfg_.L_v) * std::log1p(-qb.zeta));
    const double r = cfg_.rho * (no_bin + qb.q_raw + qb.all_miss) + (1.0 - cfg_.rho) * qb.q1;
    if (raw) *raw = r;
    return clamp01(r);
}

struct BoundEvaluator::TinDetail {
    double mu, T, bracket_raw;
    bool vacuous;
};

double BoundEvaluator::tin_bracket(const MixWeights& w, int k, double gamma_e,
                                   TinDetail* detail) const {
    const double mu = A_[k] - gamma_e;
    const double ue = union_term(log_union_e_, gamma_e);
    const bool vac = !(mu > 0.0);
    const double T = vac ? kInf : N_[k] / mu + ue;
    const double raw = 1.0 - w.delta[k] + T;
    const double clamped = vac ? 1.0 : clamp01(raw);
    if (detail) {
        detail->mu = mu;
        detail->T = T;
        detail->bracket_raw = raw;
        detail->vacuous = vac;
    }
    return clamped;
}

double BoundEvaluator::eps_tin(const QBlock&, const MixWeights& w, double gamma_e,
                               double* raw) const {
    Accum acc;
    for (int k = 0; k <= derived_.eta; ++k) {
        if (w.outer_tin[k] == 0.0) continue;
        acc.add(w.outer_tin[k] * tin_bracket(w, k, gamma_e, nullptr));
    }
    const double r = acc.value();
    if (raw) *raw = r;
    return clamp01(r);
}

struct BoundEvaluator::SicDetail {
    double bracket_raw;
    std::vector<PerKTilde>* terms;
};

double BoundEvaluator::sic_bracket(const MixWeights& w, int k, double gamma_e,
                                   double gamma_e_tilde, SicDetail* detail) const {
    const double mu = A_[k] - gamma_e;
    const double ue = union_term(log_union_e_, gamma_e);
    const double ue2 = union_term(log_union_e_, gamma_e_tilde);
    Accum mix;
    for (int kt = 0; kt <= k; ++kt) {
        const double wt = w.inner[idx(k, kt)];
        const double mu_t = B_[idx(k, kt)] - gamma_e_tilde;
        // The SIC miss-plus-union term, written as mu T / mu_tilde - nu with
        //   nu = C/mu_tilde + (L_e-1)(mu/mu_tilde) e^{-gamma_e} - (L_e-1) e^{-gamma_e_tilde}
        // so that it evaluates to (N - C)/mu_tilde + (L_e-1) e^{-gamma_e_tilde}:
        // the Markov term of the SIC metric plus the decode-stage union bound.
        const double markov = N_[k] - C_[idx(k, kt)];
        const bool vac = !(mu > 0.0) || !(mu_t > 0.0) || markov < 0.0;
        double inner_raw;
        if (vac) {
            inner_raw = kInf;
        } else {
            inner_raw = markov / mu_t + ue2;
        }
        const double inner = vac ? 1.0 : clamp01(inner_raw);
        if (wt != 0.0) mix.add(wt * inner);
        if (detail && detail->terms) {
            PerKTilde t;
            t.k_tilde = kt;
            t.log_J_e_tilde = LogValue::from_log(logJet_[idx(k, kt)]);
            t.mu_tilde = mu_t;
            t.nu = vac ? kInf : (C_[idx(k, kt)] + mu * ue) / mu_t - ue2;
            t.inner_raw = inner_raw;
            t.inner = inner;
            t.vacuous = vac;
            detail->terms->push_back(t);
        }
    }
    const double raw = 1.0 - w.delta[k] + mix.value();
    if (detail) detail->bracket_raw = raw;
    return clamp01(raw);
}

double BoundEvaluator::eps_sic(const QBlock&, const MixWeights& w, double gamma_e,
                               double gamma_e_tilde, double* raw) const {
    Accum acc;
    for (int k = 0; k <= derived_.eta; ++k) {
        if (w.outer_sic[k] == 0.0) continue;
        acc.add(w.outer_sic[k] * sic_bracket(w, k, gamma_e, gamma_e_tilde, nullptr));
    }
    const double r = acc.value();
    if (raw) *raw = r;
    return clamp01(r);
}

BoundReport BoundEvaluator::report(const Thresholds& thr) const {
    BoundReport rep;
    rep.cfg = cfg_;
    rep.split = split_;
    rep.thr = thr;
    rep.derived = derived_;
    rep.appendix_mu = opts_.appendix_mu;
    rep.qb = q_block(thr.gamma_U);
    MixWeights w = mix_weights(rep.qb);
    rep.eps_U = eps_urllc(rep.qb, &rep.eps_U_raw);

    Accum tin_acc, sic_acc;
    for (int k = 0; k <= derived_.eta; ++k) {
        PerKTerms pk;
        pk.k = k;
        pk.log_J_e = LogValue::from_log(logJe_[k]);
        pk.delta_raw = w.delta_raw[k];
        pk.delta = w.delta[k];
        pk.weight_tin = w.outer_tin[k];
        pk.weight_sic = w.outer_sic[k];
        TinDetail td{};
        pk.tin_bracket = tin_bracket(w, k, thr.gamma_e, &td);
        pk.mu = td.mu;
        pk.T = td.T;
        pk.tin_bracket_raw = td.bracket_raw;
        pk.vacuous = td.vacuous;
        SicDetail sd{};
        sd.terms = &pk.sic;
        pk.sic_bracket = sic_bracket(w, k, thr.gamma_e, thr.gamma_e_tilde, &sd);
        pk.sic_bracket_raw = sd.bracket_raw;
        tin_acc.add(pk.weight_tin * pk.tin_bracket);
        sic_acc.add(pk.weight_sic * pk.sic_bracket);
        rep.per_k.push_back(std::move(pk));
    }
    rep.eps_TIN_raw = tin_acc.value();
    rep.eps_TIN = clamp01(rep.eps_TIN_raw);
    rep.eps_SIC_raw = sic_acc.value();
    rep.eps_SIC = clamp01(rep.eps_SIC_raw);
    return rep;
}

namespace {

BoundEvaluator validated_evaluator(const SystemConfig& cfg, const PowerSplit& split,
                                   const Thresholds& thr, const BoundOptions& opts) {
    cfg.validate();
    split.validate(cfg);
    thr.validate();
    return BoundEvaluator(cfg, split, opts);
}

} // namespace

QBlock q_quantities(const SystemConfig& cfg, const PowerSplit& split, const Thresholds& thr,
                    const BoundOptions& opts) {
    return validated_evaluator(cfg, split, thr, opts).q_block(thr.gamma_U);
}

double urllc_bound(const SystemConfig& cfg, const PowerSplit& split, const Thresholds& thr,
                   double* raw, const BoundOptions& opts) {
    BoundEvaluator ev = validated_evaluator(cfg, split, thr, opts);
    return ev.eps_urllc(ev.q_block(thr.gamma_U), raw);
}

double tin_bound(const SystemConfig& cfg, const PowerSplit& split, const Thresholds& thr,
                 double* raw, const BoundOptions& opts) {
    BoundEvaluator ev = validated_evaluator(cfg, split, thr, opts);
    QBlock qb = ev.q_block(thr.gamma_U);
    return ev.eps_tin(qb, ev.mix_weights(qb), thr.gamma_e, raw);
}

double sic_bound(const SystemConfig& cfg, const PowerSplit& split, const Thresholds& thr,
                 double* raw, const BoundOptions& opts) {
    BoundEvaluator ev = validated_evaluator(cfg, split, thr, opts);
    QBlock qb = ev.q_block(thr.gamma_U);
    return ev.eps_sic(qb, ev.mix_weights(qb), thr.gamma_e, thr.gamma_e_tilde, raw);
}

BoundReport evaluate(const SystemConfig& cfg, const PowerSplit& split, const Thresholds& thr,
                     const BoundOptions& opts) {
    return validated_evaluator(cfg, split, thr, opts).report(thr);
}

} // namespace dpcmux::bounds
