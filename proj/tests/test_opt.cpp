#include "dpcmux/opt.hpp"

#include "dpcmux/bounds.hpp"
#include "dpcmux/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace dpcmux;

namespace {

SystemConfig small_config(double rho = 0.4) {
    SystemConfig cfg;
    cfg.P = 5.0;
    cfg.h = 1.0;
    cfg.n_U = 40;
    cfg.n_e = 120;
    cfg.rho = rho;
    cfg.L_e = 8;
    cfg.L_U = 8;
    cfg.L_v = 8;
    return cfg;
}

opt::SearchSpec tiny_spec(const SystemConfig& cfg, opt::Objective obj, double target) {
    opt::SearchSpec s = opt::SearchSpec::defaults(cfg, obj, target);
    s.alpha = opt::GridSpec::linear(0.0, 0.9, 4);
    s.beta_e = opt::GridSpec::linear(0.05, 0.9, 4);
    s.delta_frac = opt::GridSpec::list({0.05, 0.2});
    s.gamma_U = opt::GridSpec::log_spaced(2.0, 40.0, 6);
    s.gamma_e = opt::GridSpec::log_spaced(2.0, 40.0, 6);
    s.gamma_e_tilde = s.gamma_e;
    s.refine_rounds = 1;
    return s;
}

} // namespace

TEST_CASE("vacuous constraint keeps every grid point feasible") {
    SystemConfig cfg = small_config();
    opt::SearchSpec spec = tiny_spec(cfg, opt::Objective::TIN, 1.0);
    opt::OptResult r = opt::optimize(cfg, spec);
    CHECK(r.feasible);
    CHECK(r.eps_U <= 1.0);
    CHECK(r.evaluations > 0);
    // The same search with the constraint disabled must give the same
    // objective value (the constraint never bound).
    opt::SearchSpec spec2 = spec;
    spec2.urllc_target = 1.0;
    opt::OptResult r2 = opt::optimize(cfg, spec2);
    CHECK(r.eps_e == r2.eps_e);
}

TEST_CASE("unreachable target reports infeasible with the least-violating point") {
    SystemConfig cfg = small_config();
    opt::SearchSpec spec = tiny_spec(cfg, opt::Objective::TIN, 1e-300);
    opt::OptResult r = opt::optimize(cfg, spec);
    CHECK_FALSE(r.feasible);
    CHECK(r.eps_U > 1e-300); // diagnostic point, not a feasible one
    CHECK(r.gamma_U > 0.0);
}

TEST_CASE("optimization is deterministic") {
    SystemConfig cfg = small_config();
    for (opt::Objective obj : {opt::Objective::TIN, opt::Objective::SIC, opt::Objective::TS}) {
        opt::SearchSpec spec = tiny_spec(cfg, obj, 0.05);
        opt::OptResult a = opt::optimize(cfg, spec);
        opt::OptResult b = opt::optimize(cfg, spec);
        CHECK(a.eps_e == b.eps_e);
        CHECK(a.eps_U == b.eps_U);
        CHECK(a.alpha == b.alpha);
        CHECK(a.beta_e == b.beta_e);
        CHECK(a.gamma_U == b.gamma_U);
        CHECK(a.gamma_e == b.gamma_e);
        CHECK(a.evaluations == b.evaluations);
    }
}

TEST_CASE("refinement never worsens the incumbent") {
    SystemConfig cfg = small_config();
    for (opt::Objective obj : {opt::Objective::TIN, opt::Objective::SIC, opt::Objective::TS}) {
        opt::SearchSpec spec = tiny_spec(cfg, obj, 0.05);
        spec.refine_rounds = 0;
        opt::OptResult coarse = opt::optimize(cfg, spec);
        spec.refine_rounds = 3;
        opt::OptResult refined = opt::optimize(cfg, spec);
        if (coarse.feasible) {
            CHECK(refined.feasible);
            CHECK(refined.eps_e <= coarse.eps_e + 1e-15);
            if (refined.eps_e == coarse.eps_e) {
                CHECK(refined.eps_e_raw <= coarse.eps_e_raw + 1e-15);
            }
        }
    }
}

TEST_CASE("reported feasible points satisfy the constraint on re-evaluation") {
    SystemConfig cfg = small_config();
    opt::SearchSpec spec = tiny_spec(cfg, opt::Objective::TIN, 0.3);
    opt::OptResult r = opt::optimize(cfg, spec);
    REQUIRE(r.feasible);
    PowerSplit s;
    s.alpha = r.alpha;
    s.beta_e = r.beta_e;
    s.beta_U = 1.0 - r.beta_e;
    s.delta_b = r.delta_b;
    Thresholds thr{r.gamma_U, r.gamma_e, r.gamma_e_tilde};
    CHECK(bounds::urllc_bound(cfg, s, thr) == doctest::Approx(r.eps_U).epsilon(1e-12));
    CHECK(r.eps_U <= spec.urllc_target);
}

TEST_CASE("singleton rho sweep equals a plain optimize") {
    SystemConfig cfg = small_config(0.3);
    opt::SearchSpec spec = tiny_spec(cfg, opt::Objective::TIN, 0.05);
    auto rows = opt::sweep_rho(cfg, {0.3}, spec);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].ok);
    opt::OptResult direct = opt::optimize(cfg, spec);
    CHECK(rows[0].primary.eps_e == direct.eps_e);
    CHECK(rows[0].primary.gamma_U == direct.gamma_U);
    CHECK(rows[0].eps_TIN == direct.eps_e);
}

TEST_CASE("blocklength sweep rebuilds the config per point") {
    SystemConfig cfg = small_config(0.2);
    opt::SearchSpec spec = tiny_spec(cfg, opt::Objective::TS, 0.5);
    auto rows = opt::sweep_blocklength(cfg, {2.0, 1.0}, spec);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row.ok);
        CHECK(row.eps_TS >= 0.0);
        CHECK(row.eps_TS <= 1.0);
    }
    CHECK_THROWS_AS(opt::sweep_blocklength(cfg, {}, spec), ValidationError);
    CHECK_THROWS_AS(opt::sweep_rho(cfg, {}, spec), ValidationError);
}

TEST_CASE("empty grids are rejected") {
    SystemConfig cfg = small_config();
    opt::SearchSpec spec = tiny_spec(cfg, opt::Objective::TIN, 0.05);
    spec.gamma_U.values.clear();
    CHECK_THROWS_AS(opt::optimize(cfg, spec), ValidationError);
}
