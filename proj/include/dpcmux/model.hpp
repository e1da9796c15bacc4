#ifndef DPCMUX_MODEL_HPP
#define DPCMUX_MODEL_HPP

#include <cstdint>

namespace dpcmux {

// Physical and protocol constants shared by every bound and the simulator.
struct SystemConfig {
    double P = 0.0;  // average block power limit
    double h = 0.0;  // fixed channel coefficient, > 0
    int n_e = 0;     // eMBB blocklength in channel uses
    int n_U = 0;     // URLLC mini-slot length, <= n_e
    double rho = 0.0;        // per-mini-slot URLLC arrival probability
    std::int64_t L_e = 1;    // eMBB message count
    std::int64_t L_U = 1;    // URLLC message count
    std::int64_t L_v = 1;    // DPC bin count per URLLC message

    void validate() const; // throws ValidationError
};

// Free parameters of the coding scheme. beta_U is kept explicit so configs
// can state it, but beta_U + beta_e = 1 is enforced.
struct PowerSplit {
    double alpha = 0.0;   // DPC inflation factor in [0, 1]
    double beta_e = 0.0;  // eMBB power fraction in [0, 1]
    double beta_U = 1.0;  // URLLC power fraction, = 1 - beta_e
    double delta_b = 0.0; // DPC shell width, 0 < delta_b < n_U beta_U P

    double beta_v() const { return beta_U + alpha * alpha * beta_e; }
    void validate(const SystemConfig& cfg) const; // throws ValidationError
};

// Decoder thresholds; the bounds hold for any positive values.
struct Thresholds {
    double gamma_U = 0.0;
    double gamma_e = 0.0;
    double gamma_e_tilde = 0.0;

    void validate() const; // throws ValidationError
};

// Quantities derived from (SystemConfig, PowerSplit).
struct Derived {
    double sigma2 = 0.0;   // h^2 P + 1
    double sigma2_2 = 0.0; // h^2 beta_v P + 1
    double sigma3_2 = 0.0; // h^2 (1-alpha)^2 beta_e P + 1
    double u = 0.0;        // linear-in-||Z|| coefficient of the URLLC miss event
    double tau = 0.0;      // per-detected-block ||Z|| coefficient of the eMBB miss event
    int eta = 0;           // floor(n_e / n_U)
    int tail_len = 0;      // n_e - eta * n_U
};

// Throws DegenerateSplit when sigma2 == sigma3_2 (alpha = 0 and beta_e = 1),
// where u and the URLLC miss exponent divide by zero.
Derived derive(const SystemConfig& cfg, const PowerSplit& split);

// lambda(x)       = x/2 + u^2/4 - (u/2) sqrt(x + u^2/4)
// lambda_tilde(x) = x/2 + u^2/4 + (u/2) sqrt(x + u^2/4)
// so that 2*lambda(x) = (sqrt(x + u^2/4) - u/2)^2.
//
// When x + u^2/4 < 0 the pair is returned with valid = false: the threshold
// event degenerates and the regularized-gamma terms built from the pair must
// be treated as vanishing (the per-codeword miss probability is then 1).
// A sentinel instead of an exception keeps parameter sweeps alive across
// degenerate grid points.
struct LambdaPair {
    double lambda = 0.0;
    double lambda_tilde = 0.0;
    bool valid = false;
};

LambdaPair lambda_pair(double x, double u);

} // namespace dpcmux

#endif
