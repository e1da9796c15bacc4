#ifndef DPCMUX_BOUNDS_HPP
#define DPCMUX_BOUNDS_HPP

#include "dpcmux/logvalue.hpp"
#include "dpcmux/model.hpp"

#include <vector>

namespace dpcmux::bounds {

struct BoundOptions {
    // Two variants circulate for the clean-segment power count in the eMBB
    // miss exponent mu(k): (eta - k) segments (the default here) and
    // (eta + 1 - k), which also charges the tail segment a full mini-slot.
    // This switches to the latter.
    bool appendix_mu = false;
};

// Per-codeword URLLC threshold-miss bounds, chi-CDF route:
//   upper:  Pr[metric <= gamma] <= 1 - F(sqrt(x + u^2/4) - u/2) + F(-sqrt(x + u^2/4) - u/2)
//   lower:  Pr[metric <= gamma] >= 1 - F(sqrt(x + u^2/4) + u/2) + F(u/2 - sqrt(x + u^2/4))
// where F is the chi CDF with n_U degrees of freedom and x is mu_U (upper)
// or mu_U_tilde (lower). When x + u^2/4 < 0 the quadratic event is certain
// and both return 1 (see lambda_pair's sentinel contract).
double miss_upper_chi(int n_U, double x, double u);
double miss_lower_chi(int n_U, double x, double u);

// Same quantities expressed through the regularized lower incomplete gamma
// G(n_U/2, lambda(.)) / G(n_U/2, lambda_tilde(.)) with the sign of the
// chi argument guarding which terms survive. Agrees with the chi route to
// 1e-10; kept as the independent algebraic route for consistency tests.
double miss_upper_gamma(int n_U, double x, double u);
double miss_lower_gamma(int n_U, double x, double u);

// All scalar detection/decoding probabilities entering the threshold bounds.
struct QBlock {
    double zeta = 0.0;       // DPC shell-hit probability per bin
    double rho_U = 0.0;      // rho (1 - (1 - zeta)^{L_v})
    double miss_upper = 1.0; // per-codeword miss, upper bound
    double miss_lower = 1.0; // per-codeword miss, lower bound
    double q_raw = 1.0;      // miss_upper + (L_v L_U - 1) e^{-gamma_U}
    double q = 1.0;          // q_raw clamped to [0, 1]
    double q1 = 1.0;         // 1 - (1 - e^{-gamma_U})^{L_v L_U}
    double q2 = 0.0;         // 1 - miss_upper^{L_v L_U}
    double q3 = 1.0;         // rho_U q4 + (1 - rho_U) q1
    double q4 = 0.0;         // 1 - miss_lower^{L_v L_U}
    double all_miss = 1.0;   // miss_upper^{L_v L_U} = 1 - q2, kept unclamped
    double mu_U = 0.0;       // -inf when J_U = 0 (beta_e = 0)
    double mu_U_tilde = 0.0;
    LogValue log_J_U;
    LogValue log_J_U_tilde;
};

struct PerKTilde {
    int k_tilde = 0;
    LogValue log_J_e_tilde;
    double mu_tilde = 0.0;
    double nu = 0.0;
    double inner_raw = 0.0; // mu T / mu_tilde - nu
    double inner = 0.0;     // clamped to [0, 1]; 1 when vacuous
    bool vacuous = false;   // mu <= 0 or mu_tilde <= 0
};

struct PerKTerms {
    int k = 0;
    LogValue log_J_e;
    double mu = 0.0;
    double T = 0.0;
    double delta_raw = 0.0;
    double delta = 0.0; // clamped to [0, 1]
    double tin_bracket_raw = 0.0;
    double tin_bracket = 0.0; // clamped; 1 when vacuous
    double sic_bracket_raw = 0.0;
    double sic_bracket = 0.0;
    double weight_tin = 0.0; // C(eta,k) q3^k (1 - rho_U q2)^{eta-k}
    double weight_sic = 0.0; // C(eta,k) q4^k (1 - rho_U q2)^{eta-k}
    bool vacuous = false;    // mu <= 0
    std::vector<PerKTilde> sic;
};

struct BoundReport {
    SystemConfig cfg;
    PowerSplit split;
    Thresholds thr;
    Derived derived;
    QBlock qb;
    double eps_U_raw = 1.0, eps_U = 1.0;
    double eps_TIN_raw = 1.0, eps_TIN = 1.0;
    double eps_SIC_raw = 1.0, eps_SIC = 1.0;
    bool appendix_mu = false;
    std::vector<PerKTerms> per_k;
};

// Pr[V - alpha X^(e,2) lands in the DPC shell D_b]. alpha = 0 (and the
// degenerate beta_e = 0 sphere) put the codeword on the shell boundary with
// certainty, so zeta = 1 there.
double zeta(const SystemConfig& cfg, const PowerSplit& split);

// Evaluator with all threshold-independent work precomputed, so optimizer
// grids over (gamma_U, gamma_e, gamma_e_tilde) stay cheap. Construction
// throws DegenerateSplit for alpha = 1 (J_U denominator zero) and for
// sigma^2 == sigma3^2.
class BoundEvaluator {
  public:
    BoundEvaluator(const SystemConfig& cfg, const PowerSplit& split, const BoundOptions& opts = {});

    const Derived& derived() const { return derived_; }
    double zeta_value() const { return zeta_; }

    QBlock q_block(double gamma_U) const;

    // Mixture weights and Delta terms; depend on the q-block only.
    struct MixWeights {
        std::vector<double> outer_tin;  // length eta + 1
        std::vector<double> outer_sic;  // length eta + 1
        std::vector<double> delta_raw;  // length eta + 1
        std::vector<double> delta;      // clamped
        std::vector<double> inner;      // (eta+1) x (eta+1), row k holds C(k,kt) q^kt (1-q)^{k-kt}
    };
    MixWeights mix_weights(const QBlock& qb) const;

    double eps_urllc(const QBlock& qb, double* raw = nullptr) const;
    double eps_tin(const QBlock& qb, const MixWeights& w, double gamma_e, double* raw = nullptr) const;
    double eps_sic(const QBlock& qb, const MixWeights& w, double gamma_e, double gamma_e_tilde,
                   double* raw = nullptr) const;

    BoundReport report(const Thresholds& thr) const;

  private:
    struct TinDetail;
    struct SicDetail;
    double tin_bracket(const MixWeights& w, int k, double gamma_e, TinDetail* detail) const;
    double sic_bracket(const MixWeights& w, int k, double gamma_e, double gamma_e_tilde,
                       SicDetail* detail) const;

    SystemConfig cfg_;
    PowerSplit split_;
    BoundOptions opts_;
    Derived derived_;
    double zeta_ = 0.0;
    double g_ = 0.0;         // sqrt(2) Gamma((n_U+1)/2) / Gamma(n_U/2)
    double LL_ = 1.0;        // L_v * L_U as double
    double log_union_U_ = 0.0; // ln(L_v L_U - 1), -inf when L_v L_U = 1
    double log_union_e_ = 0.0; // ln(L_e - 1), -inf when L_e = 1
    double log_dpc_ = 0.0;   // per detected block factor of J_e
    double log_clean_ = 0.0; // per clean block factor of J_e
    double log_sic3_ = 0.0;  // per subtracted block factor of J_e_tilde
    double log_J_U_value_ = 0.0;  // ln J_U, -inf when beta_e = 0
    double log_J_Ut_value_ = 0.0; // ln J_U_tilde
    // mu_U(gamma) = pre * (base - gamma) + shift
    double pre_U_ = 0.0, base_U_ = 0.0, shift_U_ = 0.0;
    double base_Ut_ = 0.0, shift_Ut_ = 0.0;
    std::vector<double> A_;     // mu(k) = A_[k] - gamma_e
    std::vector<double> N_;     // Markov numerator of T(k)
    std::vector<double> B_;     // mu_tilde(k,kt) = B_[idx] - gamma_e_tilde
    std::vector<double> C_;     // kt-scaled expectation term of nu(k,kt)
    std::vector<double> logJe_; // ln J_e(k)
    std::vector<double> logJet_;
    int idx(int k, int kt) const { return k * (derived_.eta + 1) + kt; }
};

// Spec-level convenience entry points (validate inputs, then evaluate).
QBlock q_quantities(const SystemConfig& cfg, const PowerSplit& split, const Thresholds& thr,
                    const BoundOptions& opts = {});
double urllc_bound(const SystemConfig& cfg, const PowerSplit& split, const Thresholds& thr,
                   double* raw = nullptr, const BoundOptions& opts = {});
double tin_bound(const SystemConfig& cfg, const PowerSplit& split, const Thresholds& thr,
                 double* raw = nullptr, const BoundOptions& opts = {});
double sic_bound(const SystemConfig& cfg, const PowerSplit& split, const Thresholds& thr,
                 double* raw = nullptr, const BoundOptions& opts = {});
BoundReport evaluate(const SystemConfig& cfg, const PowerSplit& split, const Thresholds& thr,
                     const BoundOptions& opts = {});

} // namespace dpcmux::bounds

#endif
