#include "dpcmux/report_io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <limits>

namespace dpcmux::report_io {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double x) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, ptr);
}

namespace {

// Intermediates can be +-inf (vacuous Markov terms); JSON has no literal for
// those, so saturate to the largest finite double before emission.
double sat(double x) {
    if (std::isnan(x)) return std::numeric_limits<double>::max();
    if (std::isinf(x)) {
        return x > 0 ? std::numeric_limits<double>::max() : -std::numeric_limits<double>::max();
    }
    return x;
}

ordered_json log_value_json(const LogValue& v) {
    return ordered_json{{"log_magnitude", sat(v.log_magnitude())}, {"sign", v.sign()}};
}

ordered_json rate_json(const sim::RateEstimate& r) {
    return ordered_json{{"estimate", r.estimate}, {"ci_lo", r.ci_lo},   {"ci_hi", r.ci_hi},
                        {"count", r.count},       {"total", r.total}};
}

ordered_json qblock_json(const bounds::QBlock& qb) {
    ordered_json j;
    j["zeta"] = qb.zeta;
    j["rho_U"] = qb.rho_U;
    j["miss_upper"] = qb.miss_upper;
    j["miss_lower"] = qb.miss_lower;
    j["q_raw"] = sat(qb.q_raw);
    j["q"] = qb.q;
    j["q1"] = qb.q1;
    j["q2"] = qb.q2;
    j["q3"] = qb.q3;
    j["q4"] = qb.q4;
    j["mu_U"] = sat(qb.mu_U);
    j["mu_U_tilde"] = sat(qb.mu_U_tilde);
    j["log_J_U"] = log_value_json(qb.log_J_U);
    j["log_J_U_tilde"] = log_value_json(qb.log_J_U_tilde);
    return j;
}

ordered_json config_json(const SystemConfig& cfg) {
    ordered_json j;
    j["P"] = cfg.P;
    j["h"] = cfg.h;
    j["n_e"] = cfg.n_e;
    j["n_U"] = cfg.n_U;
    j["rho"] = cfg.rho;
    j["L_e"] = cfg.L_e;
    j["L_U"] = cfg.L_U;
    j["L_v"] = cfg.L_v;
    return j;
}

} // namespace

std::string bound_report_json(const bounds::BoundReport& rep) {
    ordered_json j;
    j["config"] = config_json(rep.cfg);
    j["split"] = ordered_json{{"alpha", rep.split.alpha},
                              {"beta_e", rep.split.beta_e},
                              {"beta_U", rep.split.beta_U},
                              {"delta_b", rep.split.delta_b},
                              {"beta_v", rep.split.beta_v()}};
    j["thresholds"] = ordered_json{{"gamma_U", rep.thr.gamma_U},
                                   {"gamma_e", rep.thr.gamma_e},
                                   {"gamma_e_tilde", rep.thr.gamma_e_tilde}};
    j["derived"] = ordered_json{{"sigma2", rep.derived.sigma2},
                                {"sigma2_2", rep.derived.sigma2_2},
                                {"sigma3_2", rep.derived.sigma3_2},
                                {"u", rep.derived.u},
                                {"tau", rep.derived.tau},
                                {"eta", rep.derived.eta},
                                {"tail_len", rep.derived.tail_len}};
    j["appendix_mu"] = rep.appendix_mu;
    j["q_block"] = qblock_json(rep.qb);
    j["eps_U"] = ordered_json{{"raw", sat(rep.eps_U_raw)}, {"clamped", rep.eps_U}};
    j["eps_TIN"] = ordered_json{{"raw", sat(rep.eps_TIN_raw)}, {"clamped", rep.eps_TIN}};
    j["eps_SIC"] = ordered_json{{"raw", sat(rep.eps_SIC_raw)}, {"clamped", rep.eps_SIC}};
    ordered_json per_k = ordered_json::array();
    for (const auto& pk : rep.per_k) {
        ordered_json e;
        e["k"] = pk.k;
        e["log_J_e"] = log_value_json(pk.log_J_e);
        e["mu"] = sat(pk.mu);
        e["T"] = sat(pk.T);
        e["delta_raw"] = sat(pk.delta_raw);
        e["delta"] = pk.delta;
        e["tin_bracket_raw"] = sat(pk.tin_bracket_raw);
        e["tin_bracket"] = pk.tin_bracket;
        e["sic_bracket_raw"] = sat(pk.sic_bracket_raw);
        e["sic_bracket"] = pk.sic_bracket;
        e["weight_tin"] = pk.weight_tin;
        e["weight_sic"] = pk.weight_sic;
        e["vacuous"] = pk.vacuous;
        ordered_json tilde = ordered_json::array();
        for (const auto& kt : pk.sic) {
            tilde.push_back(ordered_json{{"k_tilde", kt.k_tilde},
                                         {"log_J_e_tilde", log_value_json(kt.log_J_e_tilde)},
                                         {"mu_tilde", sat(kt.mu_tilde)},
                                         {"nu", sat(kt.nu)},
                                         {"inner_raw", sat(kt.inner_raw)},
                                         {"inner", kt.inner},
                                         {"vacuous", kt.vacuous}});
        }
        e["per_k_tilde"] = std::move(tilde);
        per_k.push_back(std::move(e));
    }
    j["per_k"] = std::move(per_k);
    return j.dump(2) + "\n";
}

std::string time_sharing_json(const baseline::TimeSharingReport& rep) {
    ordered_json j;
    j["eps_U_ts"] = ordered_json{{"raw", sat(rep.eps_U_ts_raw)}, {"clamped", rep.eps_U_ts}};
    j["eps_e_ts"] = ordered_json{{"raw", sat(rep.eps_e_ts_raw)}, {"clamped", rep.eps_e_ts}};
    j["miss"] = rep.miss;
    ordered_json per_k = ordered_json::array();
    for (const auto& pk : rep.per_k) {
        per_k.push_back(ordered_json{{"k", pk.k},
                                     {"residual_len", pk.residual_len},
                                     {"weight", pk.weight},
                                     {"mu", sat(pk.mu)},
                                     {"t_raw", sat(pk.t_raw)},
                                     {"bound", pk.bound},
                                     {"vacuous", pk.vacuous}});
    }
    j["per_k"] = std::move(per_k);
    return j.dump(2) + "\n";
}

std::string sim_report_json(const sim::SimReport& rep, const bounds::BoundReport& analytic,
                            const baseline::TimeSharingReport* ts) {
    ordered_json j;
    j["trials"] = rep.trials;
    j["rng_seed"] = rep.rng_seed;
    auto quantity = [&](const sim::RateEstimate& r, double bound) {
        ordered_json q = rate_json(r);
        q["bound"] = bound;
        q["within_bound"] = r.ci_lo <= bound;
        return q;
    };
    j["eps_U_hat"] = quantity(rep.eps_U_hat, analytic.eps_U);
    ordered_json per_block = ordered_json::array();
    for (const auto& r : rep.eps_U_per_block) per_block.push_back(rate_json(r));
    j["eps_U_per_block"] = std::move(per_block);
    j["eps_TIN_hat"] = quantity(rep.eps_TIN_hat, analytic.eps_TIN);
    j["eps_SIC_hat"] = quantity(rep.eps_SIC_hat, analytic.eps_SIC);
    {
        const double pred =
            1.0 - std::pow(1.0 - analytic.qb.zeta, static_cast<double>(analytic.cfg.L_v));
        ordered_json q = rate_json(rep.dpc_acceptance_rate);
        q["predicted"] = pred;
        j["dpc_acceptance_rate"] = std::move(q);
    }
    j["power_violations"] = rep.power_violations;
    j["max_power_ratio"] = rep.max_power_ratio;
    if (ts) {
        j["time_sharing"] = ordered_json{{"eps_U_ts", ts->eps_U_ts}, {"eps_e_ts", ts->eps_e_ts}};
    }
    return j.dump(2) + "\n";
}

namespace {

ordered_json opt_json(const opt::OptResult& r) {
    ordered_json j;
    j["objective"] = opt::objective_name(r.objective);
    j["alpha"] = r.alpha;
    j["beta_e"] = r.beta_e;
    j["delta_b"] = r.delta_b;
    j["gamma_U"] = r.gamma_U;
    j["gamma_e"] = r.gamma_e;
    j["gamma_e_tilde"] = r.gamma_e_tilde;
    j["eps_e"] = r.eps_e;
    j["eps_e_raw"] = sat(r.eps_e_raw);
    j["eps_U"] = r.eps_U;
    j["feasible"] = r.feasible;
    j["evaluations"] = r.evaluations;
    return j;
}

} // namespace

std::string opt_result_json(const opt::OptResult& res) { return opt_json(res).dump(2) + "\n"; }

std::string sweep_json(const std::vector<opt::SweepRow>& rows) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json j;
        j["sweep_value"] = r.sweep_value;
        j["eps_U"] = r.primary.eps_U;
        j["eps_TIN"] = r.eps_TIN;
        j["eps_SIC"] = r.eps_SIC;
        j["eps_TS"] = r.eps_TS;
        j["primary"] = opt_json(r.primary);
        j["ok"] = r.ok;
        if (!r.ok) j["error"] = r.error;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::string sweep_csv(const std::vector<opt::SweepRow>& rows) {
    std::string out =
        "sweep_value,eps_U,eps_TIN,eps_SIC,eps_TS,alpha,beta_e,delta_b,gamma_U,gamma_e,"
        "gamma_e_tilde,feasible\n";
    for (const auto& r : rows) {
        out += format_double(r.sweep_value);
        out += ',';
        out += format_double(r.primary.eps_U);
        out += ',';
        out += format_double(r.eps_TIN);
        out += ',';
        out += format_double(r.eps_SIC);
        out += ',';
        out += format_double(r.eps_TS);
        out += ',';
        out += format_double(r.primary.alpha);
        out += ',';
        out += format_double(r.primary.beta_e);
        out += ',';
        out += format_double(r.primary.delta_b);
        out += ',';
        out += format_double(r.primary.gamma_U);
        out += ',';
        out += format_double(r.primary.gamma_e);
        out += ',';
        out += format_double(r.primary.gamma_e_tilde);
        out += ',';
        out += (r.ok && r.primary.feasible) ? '1' : '0';
        out += '\n';
    }
    return out;
}

} // namespace dpcmux::report_io
