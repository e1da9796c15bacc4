#ifndef DPCMUX_BASELINE_HPP
#define DPCMUX_BASELINE_HPP

#include "dpcmux/bounds.hpp"
#include "dpcmux/model.hpp"

#include <vector>

namespace dpcmux::baseline {

// Time-sharing / puncturing comparison scheme. An arrived URLLC message takes
// over its whole mini-slot at full power P; the eMBB codeword occupies the
// remaining n_e - k n_U uses. The receiver is genie-aided about which slots
// were punctured (in 5G the puncturing pattern is control-signalled), so the
// eMBB mixture is weighted by the true arrival pattern and carries no
// detection-error term, while the URLLC side keeps its threshold decoder.
struct TimeSharingPerK {
    int k = 0;            // punctured mini-slots
    int residual_len = 0; // n_e - k n_U
    double weight = 0.0;  // C(eta,k) rho^k (1-rho)^(eta-k)
    double mu = 0.0;
    double t_raw = 0.0;
    double bound = 1.0; // clamped per-k eMBB bound
    bool vacuous = false;
};

struct TimeSharingReport {
    double eps_U_ts_raw = 1.0, eps_U_ts = 1.0;
    double eps_e_ts_raw = 1.0, eps_e_ts = 1.0;
    double miss = 1.0; // per-codeword URLLC threshold-miss bound
    std::vector<TimeSharingPerK> per_k;
};

// Uses only gamma_U and gamma_e from thr.
TimeSharingReport time_sharing_bound(const SystemConfig& cfg, const Thresholds& thr,
                                     const bounds::BoundOptions& opts = {});

} // namespace dpcmux::baseline

#endif
