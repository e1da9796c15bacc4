#include "dpcmux/opt.hpp"

#include "dpcmux/baseline.hpp"
#include "dpcmux/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace dpcmux::opt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> linspace(double lo, double hi, int points) {
    std::vector<double> v(points);
    if (points == 1) {
        v[0] = lo;
        return v;
    }
    for (int i = 0; i < points; ++i) v[i] = lo + (hi - lo) * i / (points - 1);
    return v;
}

} // namespace

GridSpec GridSpec::linear(double lo, double hi, int points) {
    GridSpec g;
    g.values = linspace(lo, hi, points);
    return g;
}

GridSpec GridSpec::log_spaced(double lo, double hi, int points) {
    GridSpec g;
    g.log_scale = true;
    auto ex = linspace(std::log(lo), std::log(hi), points);
    g.values.reserve(points);
    for (double e : ex) g.values.push_back(std::exp(e));
    return g;
}

GridSpec GridSpec::list(std::vector<double> v, bool log_scale) {
    GridSpec g;
    g.values = std::move(v);
    g.log_scale = log_scale;
    return g;
}

const char* objective_name(Objective o) {
    switch (o) {
        case Objective::TIN: return "TIN";
        case Objective::SIC: return "SIC";
        case Objective::TS: return "TS";
    }
    return "?";
}

Objective objective_from_name(const std::string& name) {
    if (name == "TIN") return Objective::TIN;
    if (name == "SIC") return Objective::SIC;
    if (name == "TS") return Objective::TS;
    throw ValidationError("objective must be one of TIN, SIC, TS (got '" + name + "')");
}

SearchSpec SearchSpec::defaults(const SystemConfig& cfg, Objective obj, double urllc_target) {
    SearchSpec s;
    s.objective = obj;
    s.urllc_target = urllc_target;
    s.refine_rounds = 2;
    s.alpha = GridSpec::linear(0.0, 0.99, 21);
    s.beta_e = GridSpec::linear(0.01, 0.99, 21);
    s.delta_frac = GridSpec::list({0.01, 0.05, 0.1, 0.2});
    const double LL = static_cast<double>(cfg.L_v) * static_cast<double>(cfg.L_U);
    const double cU = std::log(std::max(2.0, LL) / urllc_target);
    s.gamma_U = GridSpec::log_spaced(std::max(0.5, 0.25 * cU), 4.0 * cU, 31);
    const double ce = std::log(std::max(2.0, static_cast<double>(cfg.L_e)) / urllc_target);
    s.gamma_e = GridSpec::log_spaced(std::max(0.5, 0.25 * ce), 4.0 * ce, 31);
    s.gamma_e_tilde = s.gamma_e;
    return s;
}

void SearchSpec::validate() const {
    if (!(urllc_target > 0.0) || urllc_target > 1.0) {
        throw ValidationError("SearchSpec: urllc_target must lie in (0, 1]");
    }
    if (refine_rounds < 0) throw ValidationError("SearchSpec: refine_rounds must be >= 0");
    auto check = [](const GridSpec& g, const char* name) {
        if (g.values.empty()) throw ValidationError(std::string("SearchSpec: empty grid for ") + name);
    };
    check(alpha, "alpha");
    check(beta_e, "beta_e");
    check(delta_frac, "delta_frac");
    check(gamma_U, "gamma_U");
    check(gamma_e, "gamma_e");
    check(gamma_e_tilde, "gamma_e_tilde");
}

namespace {

// Shrink a grid to half its current span, centered on the incumbent, clipped
// to the original domain; the nearest point is snapped onto the incumbent so
// the refined incumbent value can never regress.
GridSpec shrink_grid(const GridSpec& original, const GridSpec& current, double center) {
    const int n = static_cast<int>(current.values.size());
    GridSpec out;
    out.log_scale = original.log_scale;
    if (n == 1) {
        out.values = {center};
        return out;
    }
    auto tf = [&](double x) { return original.log_scale ? std::log(x) : x; };
    auto inv = [&](double x) { return original.log_scale ? std::exp(x) : x; };
    const double lo0 = tf(*std::min_element(original.values.begin(), original.values.end()));
    const double hi0 = tf(*std::max_element(original.values.begin(), original.values.end()));
    const double span = (tf(*std::max_element(current.values.begin(), current.values.end())) -
                         tf(*std::min_element(current.values.begin(), current.values.end()))) /
                        2.0;
    double lo = tf(center) - 0.5 * span;
    double hi = tf(center) + 0.5 * span;
    if (lo < lo0) {
        hi = std::min(hi0, hi + (lo0 - lo));
        lo = lo0;
    }
    if (hi > hi0) {
        lo = std::max(lo0, lo - (hi - hi0));
        hi = hi0;
    }
    auto pts = linspace(lo, hi, n);
    int best = 0;
    for (int i = 1; i < n; ++i) {
        if (std::fabs(pts[i] - tf(center)) < std::fabs(pts[best] - tf(center))) best = i;
    }
    pts[best] = tf(center);
    out.values.reserve(n);
    for (double p : pts) out.values.push_back(inv(p));
    return out;
}

struct Candidate {
    double eps_e = kInf;
    double eps_e_raw = kInf;
    std::uint64_t order = std::numeric_limits<std::uint64_t>::max();
    double alpha = 0, beta_e = 0, delta_b = 0;
    double gamma_U = 0, gamma_e = 0, gamma_e_tilde = 0;
    double eps_U = 1.0;
    bool valid = false;

    bool better_than(const Candidate& o) const {
        if (!o.valid) return valid;
        if (!valid) return false;
        if (eps_e != o.eps_e) return eps_e < o.eps_e;
        if (eps_e_raw != o.eps_e_raw) return eps_e_raw < o.eps_e_raw;
        return order < o.order;
    }
};

struct Grids {
    GridSpec alpha, beta_e, delta_frac, gamma_U, gamma_e, gamma_e_tilde;
};

// One full pass over the joint-scheme grid. Updates the incumbent and the
// minimum-eps_U diagnostic; returns the number of bound evaluations.
std::uint64_t scan_joint(const SystemConfig& cfg, const SearchSpec& spec, const Grids& g,
                         const bounds::BoundOptions& opts, Candidate& best, Candidate& diag) {
    std::uint64_t evals = 0;
    std::uint64_t order = 0;
    const bool sic = spec.objective == Objective::SIC;
    const std::size_t n_te = sic ? g.gamma_e_tilde.values.size() : 1;
    for (double a : g.alpha.values) {
        for (double be : g.beta_e.values) {
            PowerSplit split;
            split.alpha = a;
            split.beta_e = be;
            split.beta_U = 1.0 - be;
            for (double frac : g.delta_frac.values) {
                split.delta_b = frac * cfg.n_U * split.beta_U * cfg.P;
                std::unique_ptr<bounds::BoundEvaluator> ev;
                try {
                    split.validate(cfg);
                    ev = std::make_unique<bounds::BoundEvaluator>(cfg, split, opts);
                } catch (const DegenerateSplit&) {
                    order += g.gamma_U.values.size() * g.gamma_e.values.size() * n_te;
                    continue;
                } catch (const ValidationError&) {
                    order += g.gamma_U.values.size() * g.gamma_e.values.size() * n_te;
                    continue;
                }
                for (double gU : g.gamma_U.values) {
                    bounds::QBlock qb = ev->q_block(gU);
                    const double eps_U = ev->eps_urllc(qb);
                    ++evals;
                    if (!(eps_U <= spec.urllc_target)) {
                        // Infeasible: remember the least-infeasible point.
                        Candidate c;
                        c.valid = true;
                        c.eps_e = eps_U; // diagnostic ranks by eps_U
                        c.eps_e_raw = eps_U;
                        c.order = order;
                        c.alpha = a;
                        c.beta_e = be;
                        c.delta_b = split.delta_b;
                        c.gamma_U = gU;
                        c.gamma_e = g.gamma_e.values.front();
                        c.gamma_e_tilde = sic ? g.gamma_e_tilde.values.front() : g.gamma_e.values.front();
                        c.eps_U = eps_U;
                        if (c.better_than(diag)) diag = c;
                        order += g.gamma_e.values.size() * n_te;
                        continue;
                    }
                    const bounds::BoundEvaluator::MixWeights w = ev->mix_weights(qb);
                    for (double ge : g.gamma_e.values) {
                        for (std::size_t it = 0; it < n_te; ++it) {
                            double raw = 0.0;
                            double eps;
                            if (sic) {
                                eps = ev->eps_sic(qb, w, ge, g.gamma_e_tilde.values[it], &raw);
                            } else {
                                eps = ev->eps_tin(qb, w, ge, &raw);
                            }
                            ++evals;
                            Candidate c;
                            c.valid = true;
                            c.eps_e = eps;
                            c.eps_e_raw = raw;
                            c.order = order++;
                            c.alpha = a;
                            c.beta_e = be;
                            c.delta_b = split.delta_b;
                            c.gamma_U = gU;
                            c.gamma_e = ge;
                            c.gamma_e_tilde = sic ? g.gamma_e_tilde.values[it] : ge;
                            c.eps_U = eps_U;
                            if (c.better_than(best)) best = c;
                        }
                    }
                }
            }
        }
    }
    return evals;
}

std::uint64_t scan_ts(const SystemConfig& cfg, const SearchSpec& spec, const Grids& g,
                      const bounds::BoundOptions& opts, Candidate& best, Candidate& diag) {
    std::uint64_t evals = 0;
    std::uint64_t order = 0;
    for (double gU : g.gamma_U.values) {
        for (double ge : g.gamma_e.values) {
            Thresholds thr{gU, ge, ge};
            baseline::TimeSharingReport rep = baseline::time_sharing_bound(cfg, thr, opts);
            ++evals;
            Candidate c;
            c.valid = true;
            c.order = order++;
            c.gamma_U = gU;
            c.gamma_e = ge;
            c.gamma_e_tilde = ge;
            c.eps_U = rep.eps_U_ts;
            if (!(rep.eps_U_ts <= spec.urllc_target)) {
                c.eps_e = rep.eps_U_ts;
                c.eps_e_raw = rep.eps_U_ts;
                if (c.better_than(diag)) diag = c;
                continue;
            }
            c.eps_e = rep.eps_e_ts;
            c.eps_e_raw = rep.eps_e_ts_raw;
            if (c.better_than(best)) best = c;
        }
    }
    return evals;
}

} // namespace

OptResult optimize(const SystemConfig& cfg, const SearchSpec& spec,
                   const bounds::BoundOptions& opts) {
    cfg.validate();
    spec.validate();
    const bool ts = spec.objective == Objective::TS;

    Grids grids{spec.alpha, spec.beta_e, spec.delta_frac, spec.gamma_U, spec.gamma_e,
                spec.gamma_e_tilde};
    Candidate best, diag;
    std::uint64_t evals = 0;
    for (int round = 0; round <= spec.refine_rounds; ++round) {
        if (round > 0) {
            const Candidate& center = best.valid ? best : diag;
            if (!center.valid) break;
            if (!ts) {
                grids.alpha = shrink_grid(spec.alpha, grids.alpha, center.alpha);
                grids.beta_e = shrink_grid(spec.beta_e, grids.beta_e, center.beta_e);
                const double frac =
                    center.delta_b / (cfg.n_U * (1.0 - center.beta_e) * cfg.P);
                grids.delta_frac = shrink_grid(spec.delta_frac, grids.delta_frac, frac);
            }
            grids.gamma_U = shrink_grid(spec.gamma_U, grids.gamma_U, center.gamma_U);
            grids.gamma_e = shrink_grid(spec.gamma_e, grids.gamma_e, center.gamma_e);
            grids.gamma_e_tilde =
                shrink_grid(spec.gamma_e_tilde, grids.gamma_e_tilde, center.gamma_e_tilde);
        }
        evals += ts ? scan_ts(cfg, spec, grids, opts, best, diag)
                    : scan_joint(cfg, spec, grids, opts, best, diag);
    }

    OptResult res;
    res.objective = spec.objective;
    res.evaluations = evals;
    const Candidate& chosen = best.valid ? best : diag;
    res.feasible = best.valid;
    if (!chosen.valid) return res; // nothing evaluated at all (fully degenerate grid)
    res.alpha = ts ? 0.0 : chosen.alpha;
    res.beta_e = ts ? 0.0 : chosen.beta_e;
    res.delta_b = ts ? 0.0 : chosen.delta_b;
    res.gamma_U = chosen.gamma_U;
    res.gamma_e = chosen.gamma_e;
    res.gamma_e_tilde = chosen.gamma_e_tilde;

    // Re-evaluate the winner with the full (non-lazy) bounds before reporting.
    Thresholds thr{res.gamma_U, res.gamma_e, res.gamma_e_tilde};
    if (ts) {
        baseline::TimeSharingReport rep = baseline::time_sharing_bound(cfg, thr, opts);
        res.eps_U = rep.eps_U_ts;
        res.eps_e = rep.eps_e_ts;
        res.eps_e_raw = rep.eps_e_ts_raw;
    } else {
        PowerSplit split;
        split.alpha = res.alpha;
        split.beta_e = res.beta_e;
        split.beta_U = 1.0 - res.beta_e;
        split.delta_b = res.delta_b;
        bounds::BoundEvaluator ev(cfg, split, opts);
        bounds::QBlock qb = ev.q_block(res.gamma_U);
        res.eps_U = ev.eps_urllc(qb);
        const bounds::BoundEvaluator::MixWeights w = ev.mix_weights(qb);
        if (spec.objective == Objective::SIC) {
            res.eps_e = ev.eps_sic(qb, w, res.gamma_e, res.gamma_e_tilde, &res.eps_e_raw);
        } else {
            res.eps_e = ev.eps_tin(qb, w, res.gamma_e, &res.eps_e_raw);
        }
    }
    res.feasible = best.valid && res.eps_U <= spec.urllc_target;
    return res;
}

namespace {

SweepRow sweep_point(const SystemConfig& cfg, double value, const SearchSpec& spec,
                     const bounds::BoundOptions& opts) {
    SweepRow row;
    row.sweep_value = value;
    try {
        SearchSpec s = spec;
        for (Objective obj : {Objective::TIN, Objective::SIC, Objective::TS}) {
            s.objective = obj;
            OptResult r = optimize(cfg, s, opts);
            switch (obj) {
                case Objective::TIN:
                    row.eps_TIN = r.eps_e;
                    row.tin_feasible = r.feasible;
                    break;
                case Objective::SIC:
                    row.eps_SIC = r.eps_e;
                    row.sic_feasible = r.feasible;
                    break;
                case Objective::TS:
                    row.eps_TS = r.eps_e;
                    row.ts_feasible = r.feasible;
                    break;
            }
            if (obj == spec.objective) row.primary = r;
        }
    } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
    }
    return row;
}

} // namespace

std::vector<SweepRow> sweep_rho(const SystemConfig& cfg_template, const std::vector<double>& rhos,
                                const SearchSpec& spec, const bounds::BoundOptions& opts) {
    if (rhos.empty()) throw ValidationError("sweep_rho: empty sweep value list");
    std::vector<SweepRow> rows;
    for (double r : rhos) {
        SystemConfig cfg = cfg_template;
        cfg.rho = r;
        rows.push_back(sweep_point(cfg, r, spec, opts));
    }
    return rows;
}

std::vector<SweepRow> sweep_blocklength(const SystemConfig& cfg_template,
                                        const std::vector<double>& b_values,
                                        const SearchSpec& spec, const bounds::BoundOptions& opts) {
    if (b_values.empty()) throw ValidationError("sweep_blocklength: empty sweep value list");
    std::vector<SweepRow> rows;
    for (double b : b_values) {
        SystemConfig cfg = cfg_template;
        cfg.n_U = static_cast<int>(std::lround(20.0 * b));
        cfg.n_e = 3 * cfg.n_U;
        rows.push_back(sweep_point(cfg, b, spec, opts));
    }
    return rows;
}

} // namespace dpcmux::opt
