#pragma once

#include "sdc/protocol.hpp"

namespace sdc {

// Lower-bound report for one protocol evaluation. Maintains
// r = 2 log2 d - s_kappa - s_tau and r_tilde = r / (2 log2 d) exactly;
// r is reported raw (it may be negative).
struct KeyRateReport {
    int d{};
    double s_kappa{};     // S(B|A) of the key run, bits
    double s_tau{};       // S(B|A) of the test run, bits
    double r_bits{};      // 2 log2 d - s_kappa - s_tau
    double r_tilde{};     // r / (2 log2 d)
    double dc_capacity{}; // log2 d + S(A) - S(AB) of the shared state, bits
    bool dc_advantage{};
    bool positive_key{};
};

KeyRateReport make_report(int d, double s_kappa, double s_tau, double dc_capacity,
                          bool dc_advantage);

struct DcCapacityResult {
    double capacity_bits;
    double coherent_gap; // S(A) - S(AB)
    bool advantage;      // coherent_gap > 1e-12
};

// C = log2 d_B + S(A) - S(AB), evaluated verbatim (no classical floor).
DcCapacityResult dc_capacity(const DensityOperator& rho);

// Runs both pipeline distributions and assembles the report. The DC fields
// refer to the shared state after the pre-channel.
KeyRateReport key_rate_lower_bound(const ProtocolConfig& cfg, const DensityOperator& rho_in);

// Noiseless closed form for Bell mixtures:
//   s_kappa = H({p^{xy}}),  s_tau = H({ptilde^x}),
//   r = 2 log2 d + sum p log2 p + sum ptilde log2 ptilde.
// Must agree with the pipeline on the same state.
KeyRateReport bell_mixture_key_rate_analytic(const MixtureSpec& spec);

struct Theorem1Result {
    bool dc_advantage{};
    double r_bits{};
    double chain_rhs{};  // log2 d + sum ptilde^x log2 ptilde^x
    bool chain_holds{};  // advantage => r >= chain_rhs >= 0 within 1e-9
};

Theorem1Result theorem1_check(const MixtureSpec& spec);

enum class MixtureStructure { same_x, distinct_x, uniform_full };

// Analytic extremes of the chain right-hand side for a structured mixture
// family, plus its value at uniform mixing probabilities.
//   same_x      (R <= d): every label shares one shift index; RHS = log2 d.
//   distinct_x  (R <= d): all shift indices distinct; min log2(d/R) at
//                         uniform probabilities, sup log2 d.
//   uniform_full (R = d^2): full rank; min 0 at uniform probabilities,
//                         sup log2 d.
// For d < R < d^2 the spread arrangement (R = n d + d') is reached through
// distinct_x: min at uniform probabilities is
// log2 d + n (d/R) log2(d/R) + (d'/R) log2(d'/R).
struct CaseBounds {
    double rhs_min;
    double rhs_max;
    double uniform_value;
};

CaseBounds case_bounds(int d, int rank, MixtureStructure structure);

// Closed-form noisy-MES key-rate lower bounds (identical channels before
// and after encoding, Weyl-covariant depolarising normalization). Terms
// with identically zero coefficients are dropped; a non-positive log
// argument with a nonzero coefficient raises, catching transcription bugs.
double closed_form_depolarising(int d, double p);
double closed_form_dit_phase_flip(int d, double p);

} // namespace sdc
