#include "dpcmux/sim.hpp"

#include "dpcmux/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <thread>

namespace dpcmux::sim {

namespace {

double sq_norm(const double* x, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

double sq_dist_scaled(const double* y, const double* x, double scale, int n) {
    // || y - scale * x ||^2
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = y[i] - scale * x[i];
        s += d * d;
    }
    return s;
}

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    return splitmix64(master_seed ^ splitmix64(trial_index));
}

RateEstimate wilson_interval(std::uint64_t count, std::uint64_t total) {
    RateEstimate r;
    r.count = count;
    r.total = total;
    if (total == 0) return r;
    const double z = 1.959963984540054; // 95%
    const double n = static_cast<double>(total);
    const double p = static_cast<double>(count) / n;
    const double z2n = z * z / n;
    const double center = (p + 0.5 * z2n) / (1.0 + z2n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + 0.25 * z2n / n) / (1.0 + z2n);
    r.estimate = p;
    r.ci_lo = std::max(0.0, center - half);
    r.ci_hi = std::min(1.0, center + half);
    return r;
}

std::vector<double> sample_sphere(int n, double radius, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> x(n);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (int i = 0; i < n; ++i) {
            x[i] = normal(rng);
            norm += x[i] * x[i];
        }
    } while (norm == 0.0);
    const double scale = radius / std::sqrt(norm);
    for (int i = 0; i < n; ++i) x[i] *= scale;
    return x;
}

std::size_t codebook_footprint_bytes(const SystemConfig& cfg) {
    const std::size_t eta = static_cast<std::size_t>(cfg.n_e / cfg.n_U);
    const std::size_t tail = static_cast<std::size_t>(cfg.n_e) - eta * cfg.n_U;
    const std::size_t words = eta * cfg.L_U * cfg.L_v * cfg.n_U // v
                              + eta * cfg.L_e * cfg.n_U         // xe1
                              + cfg.L_e * tail                  // xe1 tail segment
                              + eta * cfg.L_e * cfg.n_U;        // xe2
    return words * sizeof(double);
}

Codebooks make_codebooks(const SystemConfig& cfg, const PowerSplit& split, std::mt19937_64& rng) {
    Codebooks cb;
    cb.n_U = cfg.n_U;
    cb.eta = cfg.n_e / cfg.n_U;
    cb.tail_len = cfg.n_e - cb.eta * cfg.n_U;
    cb.L_e = cfg.L_e;
    cb.L_U = cfg.L_U;
    cb.L_v = cfg.L_v;
    const double r_v = std::sqrt(cfg.n_U * split.beta_v() * cfg.P);
    const double r_e1 = std::sqrt(cfg.n_U * cfg.P);
    const double r_e2 = std::sqrt(cfg.n_U * split.beta_e * cfg.P);
    cb.v.resize(static_cast<std::size_t>(cb.eta) * cb.L_U * cb.L_v * cb.n_U);
    cb.xe1.resize(static_cast<std::size_t>(cb.eta) * cb.L_e * cb.n_U);
    cb.xe2.resize(static_cast<std::size_t>(cb.eta) * cb.L_e * cb.n_U);
    cb.xe1_tail.resize(static_cast<std::size_t>(cb.L_e) * cb.tail_len);
    std::size_t p1 = 0, p2 = 0, pv = 0;
    for (int b = 0; b < cb.eta; ++b) {
        for (std::int64_t l = 0; l < cb.L_e; ++l) {
            auto x = sample_sphere(cb.n_U, r_e1, rng);
            std::copy(x.begin(), x.end(), cb.xe1.begin() + p1);
            p1 += cb.n_U;
        }
        for (std::int64_t l = 0; l < cb.L_e; ++l) {
            if (split.beta_e == 0.0) {
                std::fill_n(cb.xe2.begin() + p2, cb.n_U, 0.0);
            } else {
                auto x = sample_sphere(cb.n_U, r_e2, rng);
                std::copy(x.begin(), x.end(), cb.xe2.begin() + p2);
            }
            p2 += cb.n_U;
        }
        for (std::int64_t m = 0; m < cb.L_U; ++m) {
            for (std::int64_t j = 0; j < cb.L_v; ++j) {
                auto x = sample_sphere(cb.n_U, r_v, rng);
                std::copy(x.begin(), x.end(), cb.v.begin() + pv);
                pv += cb.n_U;
            }
        }
    }
    if (cb.tail_len > 0) {
        const double r_tail = std::sqrt(cb.tail_len * cfg.P);
        std::size_t pt = 0;
        for (std::int64_t l = 0; l < cb.L_e; ++l) {
            auto x = sample_sphere(cb.tail_len, r_tail, rng);
            std::copy(x.begin(), x.end(), cb.xe1_tail.begin() + pt);
            pt += cb.tail_len;
        }
    }
    return cb;
}

std::optional<DpcResult> dpc_encode(const Codebooks& cb, int b, std::int64_t m, const double* xe2,
                                    const SystemConfig& cfg, const PowerSplit& split,
                                    std::mt19937_64& rng) {
    const double target = cfg.n_U * split.beta_U * cfg.P;
    // Sphere radii are exact only up to rounding; widen the shell by a few
    // ulps so the alpha = 0 boundary case always qualifies.
    const double tol = 64.0 * std::numeric_limits<double>::epsilon() * std::max(target, 1.0);
    std::vector<std::int64_t> candidates;
    std::vector<double> x_U(cb.n_U);
    for (std::int64_t j = 0; j < cb.L_v; ++j) {
        const double* v = cb.v_at(b, m, j);
        double norm = 0.0;
        for (int i = 0; i < cb.n_U; ++i) {
            double d = v[i] - split.alpha * xe2[i];
            norm += d * d;
        }
        if (norm >= target - split.delta_b - tol && norm <= target + tol) {
            candidates.push_back(j);
        }
    }
    if (candidates.empty()) return std::nullopt;
    std::int64_t pick = candidates.front();
    if (candidates.size() > 1) {
        std::uniform_int_distribution<std::size_t> d(0, candidates.size() - 1);
        pick = candidates[d(rng)];
    }
    const double* v = cb.v_at(b, m, pick);
    for (int i = 0; i < cb.n_U; ++i) x_U[i] = v[i] - split.alpha * xe2[i];
    DpcResult res;
    res.j_star = pick;
    res.x_U = std::move(x_U);
    return res;
}

Metrics::Metrics(const SystemConfig& cfg, const PowerSplit& split, const Derived& d)
    : n_U_(cfg.n_U),
      h_(cfg.h),
      one_minus_a_(1.0 - split.alpha),
      s2_(d.sigma2),
      s22_(d.sigma2_2),
      s32_(d.sigma3_2) {
    c_urllc_ = 0.5 * n_U_ * std::log(s2_ / s32_);
    c_clean_ = 0.5 * std::log(s2_); // per channel use
    c_tin_ = 0.5 * n_U_ * std::log(s2_ / s22_);
    c_sic_ = 0.5 * n_U_ * std::log(s32_);
}

double Metrics::urllc(const double* y, const double* v) const {
    return c_urllc_ + sq_norm(y, n_U_) / (2.0 * s2_) - sq_dist_scaled(y, v, h_, n_U_) / (2.0 * s32_);
}

double Metrics::clean(const double* y, const double* x, int len) const {
    return c_clean_ * len + sq_norm(y, len) / (2.0 * s2_) - sq_dist_scaled(y, x, h_, len) / 2.0;
}

double Metrics::tin(const double* y, const double* xe2) const {
    return c_tin_ + sq_norm(y, n_U_) / (2.0 * s2_) -
           sq_dist_scaled(y, xe2, h_ * one_minus_a_, n_U_) / (2.0 * s22_);
}

double Metrics::sic(const double* y, const double* xe2, const double* v_hat) const {
    // residual after subtracting the decoded URLLC codeword
    double r2 = 0.0, rx2 = 0.0;
    for (int i = 0; i < n_U_; ++i) {
        double r = y[i] - h_ * v_hat[i];
        r2 += r * r;
        double rx = r - h_ * one_minus_a_ * xe2[i];
        rx2 += rx * rx;
    }
    return c_sic_ + r2 / (2.0 * s32_) - rx2 / 2.0;
}

UrllcDecision urllc_decode(const double* y_b, const Codebooks& cb, int b, const Thresholds& thr,
                           const Metrics& metrics) {
    UrllcDecision dec;
    double best = -std::numeric_limits<double>::infinity();
    std::int64_t best_m = 0, best_j = 0;
    for (std::int64_t m = 0; m < cb.L_U; ++m) {
        for (std::int64_t j = 0; j < cb.L_v; ++j) {
            double val = metrics.urllc(y_b, cb.v_at(b, m, j));
            if (val > best) { // strict: ties keep the lowest (m, j)
                best = val;
                best_m = m;
                best_j = j;
            }
        }
    }
    if (best > thr.gamma_U) {
        dec.detected = true;
        dec.m_hat = best_m + 1;
        dec.j_hat = best_j;
    }
    return dec;
}

namespace {

// Shared eMBB argmax loop; `detected_term` supplies the per-detected-block
// metric for the candidate message.
template <typename DetectedTerm>
std::int64_t embb_argmax(const std::vector<double>& y, const Codebooks& cb,
                         const std::vector<std::uint8_t>& detected, const Metrics& metrics,
                         const DetectedTerm& detected_term) {
    std::int64_t best_l = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::int64_t l = 0; l < cb.L_e; ++l) {
        double acc = 0.0;
        for (int b = 0; b < cb.eta; ++b) {
            const double* yb = y.data() + static_cast<std::size_t>(b) * cb.n_U;
            if (detected[b]) {
                acc += detected_term(yb, b, l);
            } else {
                acc += metrics.clean(yb, cb.xe1_at(b, l), cb.n_U);
            }
        }
        if (cb.tail_len > 0) {
            const double* yt = y.data() + static_cast<std::size_t>(cb.eta) * cb.n_U;
            acc += metrics.clean(yt, cb.xe1_tail_at(l), cb.tail_len);
        }
        if (acc > best) {
            best = acc;
            best_l = l;
        }
    }
    return best_l;
}

} // namespace

std::int64_t embb_decode_tin(const std::vector<double>& y, const Codebooks& cb,
                             const std::vector<std::uint8_t>& detected, const Metrics& metrics) {
    return embb_argmax(y, cb, detected, metrics, [&](const double* yb, int b, std::int64_t l) {
        return metrics.tin(yb, cb.xe2_at(b, l));
    });
}

std::int64_t embb_decode_sic(const std::vector<double>& y, const Codebooks& cb,
                             const std::vector<std::uint8_t>& detected,
                             const std::vector<UrllcDecision>& estimates, const Metrics& metrics) {
    // The receiver subtracts its own estimate v(m_hat, j_hat) in every
    // detected block; it cannot know which estimates are correct.
    return embb_argmax(y, cb, detected, metrics, [&](const double* yb, int b, std::int64_t l) {
        const double* v_hat = cb.v_at(b, estimates[b].m_hat - 1, estimates[b].j_hat);
        return metrics.sic(yb, cb.xe2_at(b, l), v_hat);
    });
}

TrialOutcome run_single_trial(const SystemConfig& cfg, const PowerSplit& split,
                              const Thresholds& thr, std::uint64_t seed, bool noiseless) {
    std::mt19937_64 rng(seed);
    const Derived d = derive(cfg, split);
    const Metrics metrics(cfg, split, d);
    const int eta = d.eta;

    Codebooks cb = make_codebooks(cfg, split, rng);

    TrialOutcome out;
    out.arrivals.assign(eta, 0);
    out.sent.assign(eta, 0);
    out.detected.assign(eta, 0);
    out.urllc_error.assign(eta, 0);
    out.pair_correct.assign(eta, 0);

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<std::int64_t> pick_e(0, cfg.L_e - 1);
    std::uniform_int_distribution<std::int64_t> pick_U(0, cfg.L_U - 1);
    const std::int64_t msg_e = pick_e(rng);

    std::vector<std::int64_t> msg_U(eta, -1), j_star(eta, -1);
    std::vector<double> x(static_cast<std::size_t>(cfg.n_e), 0.0);
    for (int b = 0; b < eta; ++b) {
        double* xb = x.data() + static_cast<std::size_t>(b) * cfg.n_U;
        out.arrivals[b] = unif(rng) < cfg.rho ? 1 : 0;
        bool sent = false;
        if (out.arrivals[b]) {
            msg_U[b] = pick_U(rng);
            const double* xe2 = cb.xe2_at(b, msg_e);
            if (auto res = dpc_encode(cb, b, msg_U[b], xe2, cfg, split, rng)) {
                j_star[b] = res->j_star;
                for (int i = 0; i < cfg.n_U; ++i) xb[i] = res->x_U[i] + xe2[i];
                sent = true;
            }
        }
        if (!sent) {
            const double* xe1 = cb.xe1_at(b, msg_e);
            std::copy(xe1, xe1 + cfg.n_U, xb);
        }
        out.sent[b] = sent ? 1 : 0;
    }
    if (cb.tail_len > 0) {
        const double* xt = cb.xe1_tail_at(msg_e);
        std::copy(xt, xt + cb.tail_len, x.data() + static_cast<std::size_t>(eta) * cfg.n_U);
    }

    // Power accounting. The DPC shell guarantees per sent block
    //   ||x_U + xe2||^2 = n_U P + 2 (1 - alpha) s_b
    // with s_b in [0, delta_b / (2 alpha)] for alpha > 0; the slack is
    // intrinsic to the shell construction, so the check allows exactly that
    // much. At alpha = 0 the inner product is unconstrained and only
    // Cauchy-Schwarz bounds the excess.
    double total_power = 0.0;
    for (double xi : x) total_power += xi * xi;
    int sent_count = 0;
    for (int b = 0; b < eta; ++b) sent_count += out.sent[b];
    const double nUP = cfg.n_U * cfg.P;
    double slack_per_block;
    if (split.alpha > 0.0) {
        slack_per_block = (1.0 - split.alpha) * split.delta_b / split.alpha;
    } else {
        slack_per_block = 2.0 * std::sqrt(split.beta_v() * split.beta_e) * nUP;
    }
    const double budget = cfg.n_e * cfg.P + sent_count * slack_per_block;
    out.power_ratio = total_power / (cfg.n_e * cfg.P);
    out.power_ok = total_power <= budget * (1.0 + 1e-9);

    std::vector<double> y(x.size());
    if (noiseless) {
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = cfg.h * x[i];
    } else {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = cfg.h * x[i] + normal(rng);
    }

    std::vector<UrllcDecision> decisions(eta);
    for (int b = 0; b < eta; ++b) {
        const double* yb = y.data() + static_cast<std::size_t>(b) * cfg.n_U;
        decisions[b] = urllc_decode(yb, cb, b, thr, metrics);
        out.detected[b] = decisions[b].detected ? 1 : 0;
        const std::int64_t m_hat = decisions[b].detected ? decisions[b].m_hat : 0;
        if (out.arrivals[b]) {
            out.urllc_error[b] = (m_hat != msg_U[b] + 1) ? 1 : 0;
        } else {
            out.urllc_error[b] = (m_hat != 0) ? 1 : 0;
        }
        out.pair_correct[b] = (out.sent[b] && decisions[b].detected &&
                               decisions[b].m_hat == msg_U[b] + 1 && decisions[b].j_hat == j_star[b])
                                  ? 1
                                  : 0;
    }

    out.embb_correct_tin = embb_decode_tin(y, cb, out.detected, metrics) == msg_e;
    out.embb_correct_sic = embb_decode_sic(y, cb, out.detected, decisions, metrics) == msg_e;
    return out;
}

SimReport run_trials(const SystemConfig& cfg, const PowerSplit& split, const Thresholds& thr,
                     const SimOptions& options) {
    cfg.validate();
    split.validate(cfg);
    thr.validate();
    if (options.n_trials < 1) throw ValidationError("run_trials: n_trials must be >= 1");
    const std::size_t footprint = codebook_footprint_bytes(cfg);
    if (footprint > options.memory_budget_bytes) {
        throw ConfigTooLarge("run_trials: codebooks need " + std::to_string(footprint) +
                             " bytes, budget is " + std::to_string(options.memory_budget_bytes));
    }

    const int eta = cfg.n_e / cfg.n_U;
    struct Counts {
        std::uint64_t block_errors = 0, block_slots = 0;
        std::vector<std::uint64_t> per_block_errors;
        std::uint64_t tin_errors = 0, sic_errors = 0;
        std::uint64_t arrived = 0, sent = 0;
        std::uint64_t power_violations = 0;
        double max_power_ratio = 0.0;
    };

    auto run_range = [&](std::uint64_t lo, std::uint64_t hi, Counts& c) {
        c.per_block_errors.assign(eta, 0);
        for (std::uint64_t t = lo; t < hi; ++t) {
            TrialOutcome out =
                run_single_trial(cfg, split, thr, trial_seed(options.seed, t), options.noiseless);
            for (int b = 0; b < eta; ++b) {
                c.block_errors += out.urllc_error[b];
                c.per_block_errors[b] += out.urllc_error[b];
                c.arrived += out.arrivals[b];
                c.sent += out.sent[b];
            }
            c.block_slots += eta;
            c.tin_errors += out.embb_correct_tin ? 0 : 1;
            c.sic_errors += out.embb_correct_sic ? 0 : 1;
            c.power_violations += out.power_ok ? 0 : 1;
            c.max_power_ratio = std::max(c.max_power_ratio, out.power_ratio);
        }
    };

    const int threads = std::max(1, options.threads);
    std::vector<Counts> parts(threads);
    if (threads == 1) {
        run_range(0, options.n_trials, parts[0]);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (options.n_trials + threads - 1) / threads;
        for (int i = 0; i < threads; ++i) {
            const std::uint64_t lo = std::min<std::uint64_t>(i * chunk, options.n_trials);
            const std::uint64_t hi = std::min<std::uint64_t>(lo + chunk, options.n_trials);
            pool.emplace_back([&, lo, hi, i] { run_range(lo, hi, parts[i]); });
        }
        for (auto& th : pool) th.join();
    }

    Counts total;
    total.per_block_errors.assign(eta, 0);
    for (const Counts& c : parts) {
        total.block_errors += c.block_errors;
        total.block_slots += c.block_slots;
        for (int b = 0; b < eta; ++b) total.per_block_errors[b] += c.per_block_errors[b];
        total.tin_errors += c.tin_errors;
        total.sic_errors += c.sic_errors;
        total.arrived += c.arrived;
        total.sent += c.sent;
        total.power_violations += c.power_violations;
        total.max_power_ratio = std::max(total.max_power_ratio, c.max_power_ratio);
    }

    SimReport rep;
    rep.trials = options.n_trials;
    rep.rng_seed = options.seed;
    rep.eps_U_hat = wilson_interval(total.block_errors, total.block_slots);
    for (int b = 0; b < eta; ++b) {
        rep.eps_U_per_block.push_back(wilson_interval(total.per_block_errors[b], options.n_trials));
    }
    rep.eps_TIN_hat = wilson_interval(total.tin_errors, options.n_trials);
    rep.eps_SIC_hat = wilson_interval(total.sic_errors, options.n_trials);
    rep.dpc_acceptance_rate = wilson_interval(total.sent, total.arrived);
    rep.power_violations = total.power_violations;
    rep.max_power_ratio = total.max_power_ratio;
    return rep;
}

} // namespace dpcmux::sim
