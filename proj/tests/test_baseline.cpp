#include "dpcmux/baseline.hpp"

#include "dpcmux/bounds.hpp"

#include <doctest.h>

#include <cmath>

using namespace dpcmux;

namespace {

SystemConfig make_config(double rho, int n_U = 200, int n_e = 600) {
    SystemConfig cfg;
    cfg.P = 5.0;
    cfg.h = 1.0;
    cfg.n_e = n_e;
    cfg.n_U = n_U;
    cfg.rho = rho;
    cfg.L_e = 64;
    cfg.L_U = 64;
    cfg.L_v = 64;
    return cfg;
}

} // namespace

TEST_CASE("time sharing saturates at rho = 1 with no residual uses") {
    SystemConfig cfg = make_config(1.0);
    baseline::TimeSharingReport rep = baseline::time_sharing_bound(cfg, Thresholds{20.0, 30.0, 30.0});
    CHECK(rep.eps_e_ts == 1.0);
    CHECK(rep.eps_e_ts_raw == doctest::Approx(1.0)); // the k = eta term carries all the weight
    CHECK(rep.per_k.back().residual_len == 0);
    CHECK(rep.per_k.back().bound == 1.0);
}

TEST_CASE("time sharing at rho = 0 equals the joint scheme's pure-eMBB bound") {
    SystemConfig cfg = make_config(0.0);
    Thresholds thr{700.0, 30.0, 30.0};
    baseline::TimeSharingReport ts = baseline::time_sharing_bound(cfg, thr);

    PowerSplit s;
    s.alpha = 0.5;
    s.beta_e = 0.5;
    s.beta_U = 0.5;
    s.delta_b = 0.05 * cfg.n_U * s.beta_U * cfg.P;
    bounds::BoundReport joint = bounds::evaluate(cfg, s, thr);

    CHECK(std::fabs(ts.eps_e_ts - joint.eps_TIN) <= 1e-12);
    // The unclamped k = 0 Markov values agree too (the clamped ones saturate).
    CHECK(std::fabs(ts.per_k[0].t_raw - joint.per_k[0].T) <= 1e-12 * joint.per_k[0].T);
    CHECK(std::fabs(ts.per_k[0].mu - joint.per_k[0].mu) <= 1e-12 * std::fabs(joint.per_k[0].mu));

    // Same equality under the appendix power-count variant.
    baseline::TimeSharingReport ts2 = baseline::time_sharing_bound(cfg, thr, {true});
    bounds::BoundReport joint2 = bounds::evaluate(cfg, s, thr, {true});
    CHECK(std::fabs(ts2.per_k[0].t_raw - joint2.per_k[0].T) <= 1e-12 * joint2.per_k[0].T);
}

TEST_CASE("time-sharing eMBB bound is nondecreasing in rho") {
    Thresholds thr{20.0, 30.0, 30.0};
    // Short blocks keep the per-k bounds away from the clamp so the
    // monotonicity is visible in the raw mixture as well.
    double prev_raw = -1.0;
    for (int i = 0; i <= 10; ++i) {
        SystemConfig cfg = make_config(i / 10.0, 20, 60);
        baseline::TimeSharingReport rep = baseline::time_sharing_bound(cfg, thr);
        CHECK(rep.eps_e_ts_raw >= prev_raw - 1e-12);
        prev_raw = rep.eps_e_ts_raw;
    }
}

TEST_CASE("time-sharing URLLC side does not depend on rho through the eMBB mixture") {
    Thresholds thr{14.0, 30.0, 30.0};
    baseline::TimeSharingReport a = baseline::time_sharing_bound(make_config(0.2), thr);
    baseline::TimeSharingReport b = baseline::time_sharing_bound(make_config(0.9), thr);
    CHECK(a.miss == b.miss); // per-message quantities identical
    // eps_U_ts itself mixes miss and false alarm with rho.
    const double q1 = a.eps_U_ts_raw - 0.2 * (a.eps_U_ts_raw * 0.0); // silence unused warnings
    (void)q1;
    CHECK(a.eps_U_ts_raw == doctest::Approx(0.2 * (a.miss + 63.0 * std::exp(-14.0)) +
                                            0.8 * (1.0 - std::pow(1.0 - std::exp(-14.0), 64.0)))
                                .epsilon(1e-12));
}

TEST_CASE("time-sharing URLLC bound is small at figure-scale settings") {
    SystemConfig cfg = make_config(0.6);
    baseline::TimeSharingReport rep = baseline::time_sharing_bound(cfg, Thresholds{21.0, 30.0, 30.0});
    CHECK(rep.eps_U_ts < 1e-5);
    CHECK(rep.miss < 1e-6);
}
