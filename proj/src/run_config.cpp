#include "dpcmux/run_config.hpp"

#include "dpcmux/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dpcmux {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownKeys = {
    "P", "h", "n_e", "n_U", "rho", "L_e", "L_U", "L_v",
    "alpha", "beta_e", "beta_U", "delta_b",
    "gamma_U", "gamma_e", "gamma_e_tilde",
    "objective", "urllc_target", "refine_rounds",
    "alpha_grid", "beta_e_grid", "delta_frac_grid",
    "gamma_U_grid", "gamma_e_grid", "gamma_e_tilde_grid",
    "rho_values", "blocklength_b_values",
    "n_trials", "memory_budget_mb",
    "output_path", "seed", "format", "appendix_mu"};

double as_number(const json& j, const std::string& key) {
    if (!j.is_number()) throw ValidationError("config key '" + key + "' must be a number");
    return j.get<double>();
}

std::int64_t as_int(const json& j, const std::string& key) {
    if (!j.is_number_integer()) throw ValidationError("config key '" + key + "' must be an integer");
    return j.get<std::int64_t>();
}

opt::GridSpec parse_grid(const json& j, const std::string& key) {
    if (j.is_array()) {
        std::vector<double> v;
        for (const auto& e : j) v.push_back(as_number(e, key));
        if (v.empty()) throw ValidationError("config key '" + key + "' is an empty grid");
        return opt::GridSpec::list(std::move(v));
    }
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it.key() != "min" && it.key() != "max" && it.key() != "points" &&
                it.key() != "scale") {
                throw ValidationError("grid '" + key + "': unknown key '" + it.key() + "'");
            }
        }
        if (!j.contains("min") || !j.contains("max") || !j.contains("points")) {
            throw ValidationError("grid '" + key + "' needs min, max and points");
        }
        const double lo = as_number(j.at("min"), key);
        const double hi = as_number(j.at("max"), key);
        const int points = static_cast<int>(as_int(j.at("points"), key));
        if (points < 1) throw ValidationError("grid '" + key + "': points must be >= 1");
        if (!(lo <= hi)) throw ValidationError("grid '" + key + "': need min <= max");
        std::string scale = j.value("scale", "linear");
        if (scale == "log") {
            if (!(lo > 0.0)) throw ValidationError("grid '" + key + "': log scale needs min > 0");
            return opt::GridSpec::log_spaced(lo, hi, points);
        }
        if (scale != "linear") {
            throw ValidationError("grid '" + key + "': scale must be 'linear' or 'log'");
        }
        return opt::GridSpec::linear(lo, hi, points);
    }
    throw ValidationError("config key '" + key + "' must be an array or {min,max,points[,scale]}");
}

} // namespace

RunConfig parse_run_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config must be a single flat JSON object");

    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!kKnownKeys.count(it.key())) {
            throw ValidationError("unknown config key '" + it.key() + "'");
        }
    }

    RunConfig rc;
    auto need = [&](const char* key) -> const json& {
        if (!j.contains(key)) throw ValidationError(std::string("missing config key '") + key + "'");
        return j.at(key);
    };
    rc.system.P = as_number(need("P"), "P");
    rc.system.h = as_number(need("h"), "h");
    rc.system.n_e = static_cast<int>(as_int(need("n_e"), "n_e"));
    rc.system.n_U = static_cast<int>(as_int(need("n_U"), "n_U"));
    rc.system.rho = as_number(need("rho"), "rho");
    rc.system.L_e = as_int(need("L_e"), "L_e");
    rc.system.L_U = as_int(need("L_U"), "L_U");
    rc.system.L_v = as_int(need("L_v"), "L_v");
    rc.system.validate();

    auto opt_num = [&](const char* key) -> std::optional<double> {
        if (!j.contains(key)) return std::nullopt;
        return as_number(j.at(key), key);
    };
    rc.alpha = opt_num("alpha");
    rc.beta_e = opt_num("beta_e");
    rc.beta_U = opt_num("beta_U");
    rc.delta_b = opt_num("delta_b");
    rc.gamma_U = opt_num("gamma_U");
    rc.gamma_e = opt_num("gamma_e");
    rc.gamma_e_tilde = opt_num("gamma_e_tilde");

    if (rc.beta_e && rc.beta_U && std::fabs(*rc.beta_e + *rc.beta_U - 1.0) > 1e-12) {
        throw ValidationError("beta_U + beta_e must equal 1 (power split constraint)");
    }

    if (j.contains("objective")) {
        rc.objective = j.at("objective").get<std::string>();
        opt::objective_from_name(rc.objective); // validates
    }
    if (j.contains("urllc_target")) rc.urllc_target = as_number(j.at("urllc_target"), "urllc_target");
    if (j.contains("refine_rounds")) {
        rc.refine_rounds = static_cast<int>(as_int(j.at("refine_rounds"), "refine_rounds"));
    }
    auto opt_grid = [&](const char* key) -> std::optional<opt::GridSpec> {
        if (!j.contains(key)) return std::nullopt;
        return parse_grid(j.at(key), key);
    };
    rc.alpha_grid = opt_grid("alpha_grid");
    rc.beta_e_grid = opt_grid("beta_e_grid");
    rc.delta_frac_grid = opt_grid("delta_frac_grid");
    rc.gamma_U_grid = opt_grid("gamma_U_grid");
    rc.gamma_e_grid = opt_grid("gamma_e_grid");
    rc.gamma_e_tilde_grid = opt_grid("gamma_e_tilde_grid");
    if (j.contains("rho_values")) {
        for (const auto& e : j.at("rho_values")) rc.rho_values.push_back(as_number(e, "rho_values"));
    }
    if (j.contains("blocklength_b_values")) {
        for (const auto& e : j.at("blocklength_b_values")) {
            rc.blocklength_b_values.push_back(as_number(e, "blocklength_b_values"));
        }
    }
    if (j.contains("n_trials")) rc.n_trials = static_cast<std::uint64_t>(as_int(j.at("n_trials"), "n_trials"));
    if (j.contains("memory_budget_mb")) {
        rc.memory_budget_mb = static_cast<std::uint64_t>(as_int(j.at("memory_budget_mb"), "memory_budget_mb"));
    }
    if (j.contains("output_path")) rc.output_path = j.at("output_path").get<std::string>();
    if (j.contains("seed")) rc.seed = static_cast<std::uint64_t>(as_int(j.at("seed"), "seed"));
    if (j.contains("format")) {
        rc.format = j.at("format").get<std::string>();
        if (rc.format != "csv" && rc.format != "json") {
            throw ValidationError("format must be 'csv' or 'json'");
        }
    }
    if (j.contains("appendix_mu")) {
        if (!j.at("appendix_mu").is_boolean()) throw ValidationError("appendix_mu must be a boolean");
        rc.appendix_mu = j.at("appendix_mu").get<bool>();
    }
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

PowerSplit RunConfig::split() const {
    if (!alpha || !beta_e || !delta_b) {
        throw ValidationError("this command needs alpha, beta_e and delta_b in the config");
    }
    PowerSplit s;
    s.alpha = *alpha;
    s.beta_e = *beta_e;
    s.beta_U = beta_U ? *beta_U : 1.0 - *beta_e;
    s.delta_b = *delta_b;
    s.validate(system);
    return s;
}

Thresholds RunConfig::thresholds() const {
    if (!gamma_U || !gamma_e) {
        throw ValidationError("this command needs gamma_U and gamma_e in the config");
    }
    Thresholds t;
    t.gamma_U = *gamma_U;
    t.gamma_e = *gamma_e;
    t.gamma_e_tilde = gamma_e_tilde ? *gamma_e_tilde : *gamma_e;
    t.validate();
    return t;
}

opt::SearchSpec RunConfig::search_spec() const {
    opt::SearchSpec s =
        opt::SearchSpec::defaults(system, opt::objective_from_name(objective), urllc_target);
    s.refine_rounds = refine_rounds;
    if (alpha_grid) s.alpha = *alpha_grid;
    if (beta_e_grid) s.beta_e = *beta_e_grid;
    if (delta_frac_grid) s.delta_frac = *delta_frac_grid;
    if (gamma_U_grid) s.gamma_U = *gamma_U_grid;
    if (gamma_e_grid) s.gamma_e = *gamma_e_grid;
    if (gamma_e_tilde_grid) s.gamma_e_tilde = *gamma_e_tilde_grid;
    s.validate();
    return s;
}

sim::SimOptions RunConfig::sim_options() const {
    sim::SimOptions o;
    o.n_trials = n_trials;
    o.seed = seed;
    o.memory_budget_bytes = static_cast<std::size_t>(memory_budget_mb) << 20;
    return o;
}

} // namespace dpcmux
