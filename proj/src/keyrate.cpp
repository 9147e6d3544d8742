#include "sdc/keyrate.hpp"

#include <cmath>

namespace sdc {

namespace {

constexpr double kAdvantageTol = 1e-12;
constexpr double kChainTol = 1e-9;

// coeff * log2(arg) with exact-zero coefficients dropped before the log is
// touched; a non-positive argument under a live coefficient is a bug.
double xlog2(double coeff, double arg) {
    if (std::abs(coeff) < 1e-14) return 0.0;
    if (!(arg > 0.0))
        throw std::domain_error("closed form: non-positive log argument with nonzero coefficient");
    return coeff * std::log2(arg);
}

double entropy_of(const std::vector<double>& v) {
    return detail::entropy_bits(v.data(), v.size());
}

} // namespace

KeyRateReport make_report(int d, double s_kappa, double s_tau, double dc_capacity,
                          bool dc_advantage) {
    const double two_log_d = 2.0 * std::log2(static_cast<double>(d));
    KeyRateReport rep;
    rep.d = d;
    rep.s_kappa = s_kappa;
    rep.s_tau = s_tau;
    rep.r_bits = two_log_d - s_kappa - s_tau;
    rep.r_tilde = rep.r_bits / two_log_d;
    rep.dc_capacity = dc_capacity;
    rep.dc_advantage = dc_advantage;
    rep.positive_key = rep.r_bits > 0.0;
    return rep;
}

DcCapacityResult dc_capacity(const DensityOperator& rho) {
    if (rho.dims.size() != 2) throw std::invalid_argument("dc_capacity: state must be bipartite");
    const double s_ab = von_neumann_entropy(rho);
    const double s_a = von_neumann_entropy(partial_trace(rho, {0}));
    const double gap = s_a - s_ab;
    return DcCapacityResult{std::log2(static_cast<double>(rho.dims[1])) + gap, gap,
                            gap > kAdvantageTol};
}

KeyRateReport key_rate_lower_bound(const ProtocolConfig& cfg, const DensityOperator& rho_in) {
    const auto q = key_run_distribution(cfg, rho_in);
    const auto h = test_run_distribution(cfg, rho_in);
    const DensityOperator shared = apply_channel(cfg.pre, rho_in, 1);
    const auto dc = dc_capacity(shared);
    return make_report(cfg.d, conditional_entropy_b_given_a(q), conditional_entropy_b_given_a(h),
                       dc.capacity_bits, dc.advantage);
}

KeyRateReport bell_mixture_key_rate_analytic(const MixtureSpec& spec) {
    const double s_kappa = shannon_entropy(spec.probs);
    const double s_tau = entropy_of(spec.shift_marginal());
    const double log_d = std::log2(static_cast<double>(spec.d));
    const double gap = log_d - s_kappa; // S(A) - S(AB) for a Bell mixture
    return make_report(spec.d, s_kappa, s_tau, log_d + gap, gap > kAdvantageTol);
}

Theorem1Result theorem1_check(const MixtureSpec& spec) {
    const auto rep = bell_mixture_key_rate_analytic(spec);
    const double log_d = std::log2(static_cast<double>(spec.d));
    Theorem1Result res;
    res.dc_advantage = rep.dc_advantage;
    res.r_bits = rep.r_bits;
    res.chain_rhs = log_d - rep.s_tau;
    res.chain_holds = !res.dc_advantage ||
                      (res.r_bits + kChainTol >= res.chain_rhs &&
                       res.chain_rhs >= -kChainTol && res.r_bits >= -kChainTol);
    return res;
}

CaseBounds case_bounds(int d, int rank, MixtureStructure structure) {
    if (d < 2 || rank < 1 || rank > d * d)
        throw std::invalid_argument("case_bounds: rank must be in [1, d^2]");
    const double log_d = std::log2(static_cast<double>(d));
    switch (structure) {
        case MixtureStructure::same_x: {
            if (rank > d)
                throw std::invalid_argument("case_bounds: same_x requires rank <= d");
            return CaseBounds{log_d, log_d, log_d};
        }
        case MixtureStructure::distinct_x: {
            if (rank <= d) {
                const double lo = std::log2(static_cast<double>(d) / rank);
                return CaseBounds{lo, log_d, lo};
            }
            // spread arrangement R = n d + d', uniform probabilities
            const int n = rank / d;
            const int rem = rank % d;
            double uniform = log_d +
                             xlog2(n * static_cast<double>(d) / rank,
                                   static_cast<double>(d) / rank) +
                             xlog2(static_cast<double>(rem) / rank,
                                   rem > 0 ? static_cast<double>(rem) / rank : 1.0);
            return CaseBounds{0.0, log_d, uniform};
        }
        case MixtureStructure::uniform_full: {
            if (rank != d * d)
                throw std::invalid_argument("case_bounds: uniform_full requires rank = d^2");
            return CaseBounds{0.0, log_d, 0.0};
        }
    }
    throw std::invalid_argument("case_bounds: unknown structure");
}

double closed_form_depolarising(int d, double p) {
    if (d < 2) throw std::invalid_argument("closed_form_depolarising: dimension must be >= 2");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("closed_form_depolarising: noise strength outside [0,1]");
    const double dd = static_cast<double>(d);
    const double d2 = dd * dd;
    const double d4 = d2 * d2;
    const double a = dd - (dd - 1.0) * p; // d - (d-1)p
    const double w = (2.0 - p) * p;

    double rate = 3.0 * std::log2(d2);
    rate += (xlog2((dd - 1.0) * (dd - 1.0) * p * p, p * p / d4) +
             xlog2(2.0 * (dd - 1.0) * p * a, p * a / d4) +
             xlog2(a * a, a * a / d4)) /
            d2;
    rate -= (xlog2((1.0 - d2) * w, w / d4) -
             xlog2(d2 - (d2 - 1.0) * w, (d2 - (d2 - 1.0) * w) / d4)) /
            d2;
    return rate;
}

double closed_form_dit_phase_flip(int d, double p) {
    if (d < 2) throw std::invalid_argument("closed_form_dit_phase_flip: dimension must be >= 2");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("closed_form_dit_phase_flip: noise strength outside [0,1]");
    const double dd = static_cast<double>(d);
    const double d2 = dd * dd;
    const double dm = dd - 1.0;
    const double dm2 = dm * dm;
    const double q = 1.0 - p;

    double rate = 3.0 * std::log2(d2);
    rate += xlog2(p * p, p * p / (dm2 * d2)) + xlog2(2.0 * p * q, q * p / (dm * d2)) +
            xlog2(q * q, q * q / d2);
    rate -= (xlog2(-2.0 * (dd - 2.0) * p * p, (dd - 2.0) * p * p / (dm2 * dm * d2)) +
             xlog2(p * ((d2 - 2.0) * p - 2.0 * dm2),
                   p * (2.0 * dm2 - (d2 - 2.0) * p) / (dm2 * dm2 * d2))) /
            dm2;
    rate -= xlog2(p * (2.0 * dm2 - (dm2 + 1.0) * p) - dm2,
                  (p * ((dm2 + 1.0) * p - 2.0 * dm2) + dm2) / (dm2 * d2)) /
            dm2;
    return rate;
}

} // namespace sdc
