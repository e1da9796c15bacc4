#ifndef DPCMUX_RUN_CONFIG_HPP
#define DPCMUX_RUN_CONFIG_HPP

#include "dpcmux/model.hpp"
#include "dpcmux/opt.hpp"
#include "dpcmux/sim.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dpcmux {

// Flat single-document run configuration. Every key is top-level so sweep
// tooling can override one key per run; unknown keys are rejected.
struct RunConfig {
    SystemConfig system;

    // Scheme parameters (bound / simulate commands).
    std::optional<double> alpha, beta_e, beta_U, delta_b;
    std::optional<double> gamma_U, gamma_e, gamma_e_tilde;

    // Search (optimize / sweep commands).
    std::string objective = "TIN";
    double urllc_target = 1e-5;
    int refine_rounds = 2;
    std::optional<opt::GridSpec> alpha_grid, beta_e_grid, delta_frac_grid;
    std::optional<opt::GridSpec> gamma_U_grid, gamma_e_grid, gamma_e_tilde_grid;
    std::vector<double> rho_values;
    std::vector<double> blocklength_b_values;

    // Simulation.
    std::uint64_t n_trials = 0;
    std::uint64_t memory_budget_mb = 256;

    // Output.
    std::string output_path; // empty = stdout
    std::uint64_t seed = 0;
    std::string format = "csv"; // csv | json
    bool appendix_mu = false;

    PowerSplit split() const;     // throws ValidationError when fields missing
    Thresholds thresholds() const;
    opt::SearchSpec search_spec() const;
    sim::SimOptions sim_options() const;
};

// Parses and validates the flat JSON document; unknown keys and invariant
// violations raise ValidationError.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

} // namespace dpcmux

#endif
