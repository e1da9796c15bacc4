#ifndef DPCMUX_OPT_HPP
#define DPCMUX_OPT_HPP

#include "dpcmux/bounds.hpp"
#include "dpcmux/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dpcmux::opt {

struct GridSpec {
    std::vector<double> values;
    bool log_scale = false; // refinement shrinks in log space

    static GridSpec linear(double lo, double hi, int points);
    static GridSpec log_spaced(double lo, double hi, int points);
    static GridSpec list(std::vector<double> v, bool log_scale = false);
};

enum class Objective { TIN, SIC, TS };

const char* objective_name(Objective o);
Objective objective_from_name(const std::string& name); // throws ValidationError

// Grid search specification. delta_b is searched as a fraction of
// n_U beta_U P so the shell stays nonempty for every beta_e grid point.
struct SearchSpec {
    Objective objective = Objective::TIN;
    double urllc_target = 1e-5;
    int refine_rounds = 2;
    GridSpec alpha;
    GridSpec beta_e;
    GridSpec delta_frac;
    GridSpec gamma_U;
    GridSpec gamma_e;
    GridSpec gamma_e_tilde;

    // Documented defaults: alpha 21 linear points on [0, 0.99]; beta_e 21
    // linear points on [0.01, 0.99]; delta fractions {0.01, 0.05, 0.1, 0.2};
    // each threshold 31 log-spaced points around ln(count / target).
    static SearchSpec defaults(const SystemConfig& cfg, Objective obj, double urllc_target);

    void validate() const;
};

struct OptResult {
    Objective objective = Objective::TIN;
    double alpha = 0.0, beta_e = 0.0, delta_b = 0.0; // zeros for TS (not searched)
    double gamma_U = 0.0, gamma_e = 0.0, gamma_e_tilde = 0.0;
    double eps_e = 1.0;     // clamped objective bound at the reported point
    double eps_e_raw = 1.0; // pre-clamp mixture value (tie-break diagnostic)
    double eps_U = 1.0;     // clamped URLLC bound at the reported point
    bool feasible = false;  // eps_U <= urllc_target
    std::uint64_t evaluations = 0;
};

// Exhaustive coarse grid pass plus `refine_rounds` of factor-2 shrinking
// refinement around the incumbent. eMBB bounds are evaluated lazily (skipped
// when the URLLC constraint already fails). Deterministic: ties go to the
// first point in enumeration order, and every reported feasible point is
// re-checked against the full URLLC bound before being returned. With no
// feasible point, the minimum-eps_U point is reported as a diagnostic.
OptResult optimize(const SystemConfig& cfg, const SearchSpec& spec,
                   const bounds::BoundOptions& opts = {});

struct SweepRow {
    double sweep_value = 0.0;
    OptResult primary;
    double eps_TIN = 1.0, eps_SIC = 1.0, eps_TS = 1.0;
    bool tin_feasible = false, sic_feasible = false, ts_feasible = false;
    bool ok = true;
    std::string error; // set when this point failed; the sweep continues
};

std::vector<SweepRow> sweep_rho(const SystemConfig& cfg_template, const std::vector<double>& rhos,
                                const SearchSpec& spec, const bounds::BoundOptions& opts = {});

// Per value b: n_U = 20 b and n_e = 3 n_U.
std::vector<SweepRow> sweep_blocklength(const SystemConfig& cfg_template,
                                        const std::vector<double>& b_values, const SearchSpec& spec,
                                        const bounds::BoundOptions& opts = {});

} // namespace dpcmux::opt

#endif
