#ifndef DPCMUX_REPORT_IO_HPP
#define DPCMUX_REPORT_IO_HPP

#include "dpcmux/baseline.hpp"
#include "dpcmux/bounds.hpp"
#include "dpcmux/opt.hpp"
#include "dpcmux/sim.hpp"

#include <string>
#include <vector>

namespace dpcmux::report_io {

// Shortest decimal representation that parses back to the same double.
std::string format_double(double x);

// JSON documents (ordered keys, deterministic bytes for fixed inputs).
std::string bound_report_json(const bounds::BoundReport& rep);
std::string time_sharing_json(const baseline::TimeSharingReport& rep);
std::string sim_report_json(const sim::SimReport& rep, const bounds::BoundReport& analytic,
                            const baseline::TimeSharingReport* ts = nullptr);
std::string opt_result_json(const opt::OptResult& res);
std::string sweep_json(const std::vector<opt::SweepRow>& rows);

// Fixed-schema sweep CSV: header row then one row per sweep value, columns
// sweep_value, eps_U, eps_TIN, eps_SIC, eps_TS, alpha, beta_e, delta_b,
// gamma_U, gamma_e, gamma_e_tilde, feasible.
std::string sweep_csv(const std::vector<opt::SweepRow>& rows);

} // namespace dpcmux::report_io

#endif
