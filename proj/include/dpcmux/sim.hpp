#ifndef DPCMUX_SIM_HPP
#define DPCMUX_SIM_HPP

#include "dpcmux/model.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace dpcmux::sim {

struct SimOptions {
    std::uint64_t n_trials = 0;
    std::uint64_t seed = 0;
    int threads = 1;
    std::size_t memory_budget_bytes = 256ull << 20;
    bool noiseless = false; // test hook: zero noise vector
};

struct RateEstimate {
    double estimate = 0.0;
    double ci_lo = 0.0; // Wilson 95%
    double ci_hi = 0.0;
    std::uint64_t count = 0;
    std::uint64_t total = 0;
};

RateEstimate wilson_interval(std::uint64_t count, std::uint64_t total);

// Fresh random codebooks for one trial; shared by Tx and Rx.
struct Codebooks {
    int n_U = 0, eta = 0, tail_len = 0;
    std::int64_t L_e = 0, L_U = 0, L_v = 0;
    std::vector<double> v;        // [eta][L_U][L_v][n_U], radius sqrt(n_U beta_v P)
    std::vector<double> xe1;      // [eta][L_e][n_U], radius sqrt(n_U P)
    std::vector<double> xe1_tail; // [L_e][tail_len], radius sqrt(tail_len P)
    std::vector<double> xe2;      // [eta][L_e][n_U], radius sqrt(n_U beta_e P)

    const double* v_at(int b, std::int64_t m, std::int64_t j) const {
        return v.data() + ((static_cast<std::size_t>(b) * L_U + m) * L_v + j) * n_U;
    }
    const double* xe1_at(int b, std::int64_t l) const {
        return xe1.data() + (static_cast<std::size_t>(b) * L_e + l) * n_U;
    }
    const double* xe1_tail_at(std::int64_t l) const {
        return xe1_tail.data() + static_cast<std::size_t>(l) * tail_len;
    }
    const double* xe2_at(int b, std::int64_t l) const {
        return xe2.data() + (static_cast<std::size_t>(b) * L_e + l) * n_U;
    }
};

// Per-trial record, one bit per mini-slot where applicable.
struct TrialOutcome {
    std::vector<std::uint8_t> arrivals;      // A_b
    std::vector<std::uint8_t> sent;          // A_b,sent (subset of arrivals)
    std::vector<std::uint8_t> detected;      // A_b,detection
    std::vector<std::uint8_t> urllc_error;   // per-block message error indicator
    std::vector<std::uint8_t> pair_correct;  // detected and (m,j) estimate exact
    bool embb_correct_tin = false;
    bool embb_correct_sic = false;
    bool power_ok = false;
    double power_ratio = 0.0; // (1/n_e) sum X_t^2 / P
};

struct SimReport {
    std::uint64_t trials = 0;
    std::uint64_t rng_seed = 0;
    RateEstimate eps_U_hat; // pooled over all mini-slots
    std::vector<RateEstimate> eps_U_per_block;
    RateEstimate eps_TIN_hat;
    RateEstimate eps_SIC_hat;
    RateEstimate dpc_acceptance_rate; // sent / arrived
    std::uint64_t power_violations = 0;
    double max_power_ratio = 0.0;
};

// Uniform draw on the sphere of the given radius in R^n (normalized normal
// vector; the zero draw is resampled).
std::vector<double> sample_sphere(int n, double radius, std::mt19937_64& rng);

// DPC bin selection: indexes j whose x_U = v(m, j) - alpha xe2 lands in the
// shell [n_U beta_U P - delta_b, n_U beta_U P]; one qualifying j is chosen
// uniformly at random. nullopt = no bin qualifies and the message is dropped.
struct DpcResult {
    std::int64_t j_star = 0;
    std::vector<double> x_U;
};
std::optional<DpcResult> dpc_encode(const Codebooks& cb, int b, std::int64_t m,
                                    const double* xe2, const SystemConfig& cfg,
                                    const PowerSplit& split, std::mt19937_64& rng);

// Codebook draw order is fixed: per block xe1, then xe2, then v(m, j) in
// (m, j) order; tail xe1 last.
Codebooks make_codebooks(const SystemConfig& cfg, const PowerSplit& split, std::mt19937_64& rng);

// Surrogate-density decoding metrics. The true sphere-codebook output
// densities have no closed form; both the analysis and the implementable
// decoder use the Gaussian stand-ins, so the simulator decodes with them.
struct Metrics {
    Metrics(const SystemConfig& cfg, const PowerSplit& split, const Derived& d);
    // ln Q(y | v) / Q(y) over one mini-slot
    double urllc(const double* y, const double* v) const;
    // ln f(y | xe1) / Q(y) over a clean segment of the given length
    double clean(const double* y, const double* x, int len) const;
    // ln Q(y | xe2) / Q(y) over one detected mini-slot
    double tin(const double* y, const double* xe2) const;
    // ln f(y | xe2, v) / Q(y | v) over one subtracted mini-slot
    double sic(const double* y, const double* xe2, const double* v_hat) const;

  private:
    int n_U_;
    double h_, one_minus_a_;
    double s2_, s22_, s32_;
    double c_urllc_, c_clean_, c_tin_, c_sic_;
};

struct UrllcDecision {
    bool detected = false;
    std::int64_t m_hat = 0; // 0 = "nothing sent"; messages are 1-based here
    std::int64_t j_hat = 0;
};

// Max-metric decoding over all (m, j) with the threshold test; ties broken
// toward the lowest (m, j) in lexicographic order.
UrllcDecision urllc_decode(const double* y_b, const Codebooks& cb, int b, const Thresholds& thr,
                           const Metrics& metrics);

std::int64_t embb_decode_tin(const std::vector<double>& y, const Codebooks& cb,
                             const std::vector<std::uint8_t>& detected, const Metrics& metrics);

std::int64_t embb_decode_sic(const std::vector<double>& y, const Codebooks& cb,
                             const std::vector<std::uint8_t>& detected,
                             const std::vector<UrllcDecision>& estimates, const Metrics& metrics);

TrialOutcome run_single_trial(const SystemConfig& cfg, const PowerSplit& split,
                              const Thresholds& thr, std::uint64_t trial_seed,
                              bool noiseless = false);

// Deterministic in (cfg, split, thr, options.seed) regardless of thread
// count. Throws ConfigTooLarge when the per-trial codebooks exceed the
// memory budget.
SimReport run_trials(const SystemConfig& cfg, const PowerSplit& split, const Thresholds& thr,
                     const SimOptions& options);

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index);

std::size_t codebook_footprint_bytes(const SystemConfig& cfg);

} // namespace dpcmux::sim

#endif
