#include "sdc/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <sstream>
#include <thread>

#include "sdc/version.hpp"

namespace sdc {

namespace {

std::string iso_timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RunMetadata make_metadata(const ExperimentConfig& cfg) {
    RunMetadata meta;
    meta.seed = cfg.seed;
    meta.config_summary = cfg.summary();
    meta.config_hash = detail::fnv1a(meta.config_summary);
    meta.version = std::string(kVersion);
    meta.timestamp = iso_timestamp_utc();
    return meta;
}

// Seed for a Monte Carlo cell. Deliberately independent of the noise
// strength so the same trial index reuses the same sampled state across a
// p grid, as in a sweep over pre-generated states.
std::uint64_t cell_seed(std::uint64_t seed, int d, int rank, StateKind states) {
    const std::uint64_t tag = (static_cast<std::uint64_t>(d) << 24) ^
                              (static_cast<std::uint64_t>(rank) << 8) ^
                              static_cast<std::uint64_t>(states == StateKind::rank2_random);
    return splitmix64(splitmix64(seed) ^ tag);
}

// Runs `n` independent trials, striped over `workers` threads; trial i is
// always evaluated with stream i, and results land in index order, so the
// output is identical for any worker count.
template <typename Fn>
std::vector<double> run_trials(int n, int workers, std::uint64_t stream_seed, Fn&& per_trial) {
    std::vector<double> out(static_cast<std::size_t>(n));
    const int w = std::clamp(workers, 1, n);
    if (w == 1) {
        for (int i = 0; i < n; ++i) {
            Rng rng = trial_rng(stream_seed, static_cast<std::uint64_t>(i));
            out[static_cast<std::size_t>(i)] = per_trial(rng);
        }
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(w));
    for (int t = 0; t < w; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (int i = t; i < n; i += w) {
                    Rng rng = trial_rng(stream_seed, static_cast<std::uint64_t>(i));
                    out[static_cast<std::size_t>(i)] = per_trial(rng);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

McRow summarize(const std::vector<double>& vals, int d, int rank, ChannelFamily family, double p) {
    McRow row;
    row.d = d;
    row.rank = rank;
    row.family = family;
    row.p = p;
    row.trials = static_cast<int>(vals.size());
    const double n = static_cast<double>(vals.size());
    double sum_raw = 0.0, sum_clip = 0.0;
    for (double v : vals) {
        sum_raw += v;
        sum_clip += std::max(v, 0.0);
        if (v > 0.0) ++row.positive_count;
    }
    row.mean_raw = sum_raw / n;
    row.mean_clipped = sum_clip / n;
    double var_raw = 0.0, var_clip = 0.0;
    for (double v : vals) {
        var_raw += (v - row.mean_raw) * (v - row.mean_raw);
        var_clip += (std::max(v, 0.0) - row.mean_clipped) * (std::max(v, 0.0) - row.mean_clipped);
    }
    if (vals.size() > 1) {
        var_raw /= n - 1.0;
        var_clip /= n - 1.0;
    }
    row.stderr_raw = std::sqrt(var_raw / n);
    row.stderr_clipped = std::sqrt(var_clip / n);
    return row;
}

double bell_mixture_trial_rtilde(int d, int rank, Rng& rng, ChannelFamily family, double p) {
    const MixtureSpec spec = random_bell_mixture(d, rank, rng);
    if (family == ChannelFamily::identity || p == 0.0)
        return bell_mixture_key_rate_analytic(spec).r_tilde;
    const ProtocolConfig cfg(d, make_channel(family, d, p), make_channel(family, d, p));
    return key_rate_lower_bound(cfg, bell_mixture(spec)).r_tilde;
}

} // namespace

void ExperimentConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
    if (workers < 1) throw std::invalid_argument("ExperimentConfig: workers must be >= 1");
    if (d_list.empty()) throw std::invalid_argument("ExperimentConfig: empty dimension list");
    for (int d : d_list)
        if (d < 2 || d > 8) throw std::invalid_argument("ExperimentConfig: d must be in [2,8]");
    if (rank_list.empty()) throw std::invalid_argument("ExperimentConfig: empty rank list");
    for (int r : rank_list)
        if (r < 1) throw std::invalid_argument("ExperimentConfig: rank must be >= 1");
    if (p_grid.empty()) throw std::invalid_argument("ExperimentConfig: empty p grid");
    for (double p : p_grid)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("ExperimentConfig: p grid outside [0,1]");
}

std::string ExperimentConfig::summary() const {
    std::ostringstream os;
    os << "kind=";
    switch (kind) {
        case ExperimentKind::table1: os << "table1"; break;
        case ExperimentKind::fig1_sweep: os << "fig1_sweep"; break;
        case ExperimentKind::fig2_critical: os << "fig2_critical"; break;
        case ExperimentKind::fig3_noisy_mixtures: os << "fig3_noisy_mixtures"; break;
        case ExperimentKind::theorem_checks: os << "theorem_checks"; break;
        case ExperimentKind::convexity: os << "convexity"; break;
    }
    os << " d=";
    for (std::size_t i = 0; i < d_list.size(); ++i) os << (i ? "," : "") << d_list[i];
    os << " rank=";
    for (std::size_t i = 0; i < rank_list.size(); ++i) os << (i ? "," : "") << rank_list[i];
    os << " states=" << (states == StateKind::bell_mixture ? "bell-mixture" : "rank2");
    os << " noise=" << family_name(noise);
    os << " p=";
    for (std::size_t i = 0; i < p_grid.size(); ++i) os << (i ? "," : "") << p_grid[i];
    os << " trials=" << trials << " seed=" << seed;
    return os.str();
}

ExperimentResult monte_carlo_average(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult res;
    res.meta = make_metadata(cfg);

    const std::vector<double> grid =
        (cfg.noise == ChannelFamily::identity) ? std::vector<double>{0.0} : cfg.p_grid;

    for (int d : cfg.d_list) {
        const auto ranks = (cfg.states == StateKind::rank2_random) ? std::vector<int>{2}
                                                                   : cfg.rank_list;
        for (int rank : ranks) {
            if (cfg.states == StateKind::bell_mixture && rank > d * d)
                throw std::invalid_argument("monte_carlo_average: rank exceeds d^2");
            const std::uint64_t cs = cell_seed(cfg.seed, d, rank, cfg.states);
            for (double p : grid) {
                auto vals = run_trials(cfg.trials, cfg.workers, cs, [&](Rng& rng) {
                    if (cfg.states == StateKind::bell_mixture)
                        return bell_mixture_trial_rtilde(d, rank, rng, cfg.noise, p);
                    return detail::rank2_trial_rtilde(d, rng, cfg.noise, p);
                });
                res.mc.push_back(summarize(vals, d, rank, cfg.noise, p));
            }
        }
    }
    return res;
}

ExperimentResult noise_sweep(int d, ChannelFamily family, const std::vector<double>& p_grid) {
    if (p_grid.empty()) throw std::invalid_argument("noise_sweep: empty p grid");
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::fig1_sweep;
    cfg.d_list = {d};
    cfg.noise = family;
    cfg.p_grid = p_grid;
    cfg.trials = 1;
    cfg.validate();

    ExperimentResult res;
    res.meta = make_metadata(cfg);
    const DensityOperator mes = max_entangled(d).to_density();
    for (double p : p_grid) {
        const ProtocolConfig pc(d, make_channel(family, d, p), make_channel(family, d, p));
        const auto rep = key_rate_lower_bound(pc, mes);
        SweepRow row;
        row.d = d;
        row.family = family;
        row.p = p;
        row.r_bits = rep.r_bits;
        row.r_tilde = rep.r_tilde;
        row.positive = rep.positive_key;
        if (family == ChannelFamily::depolarising)
            row.closed_form_bits = closed_form_depolarising(d, p);
        else if (family == ChannelFamily::dit_phase_flip)
            row.closed_form_bits = closed_form_dit_phase_flip(d, p);
        res.sweep.push_back(row);
    }
    return res;
}

CriticalNoiseResult critical_noise(int d, ChannelFamily family, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("critical_noise: tolerance must be positive");
    const DensityOperator mes = max_entangled(d).to_density();
    auto rtilde = [&](double p) {
        const ProtocolConfig pc(d, make_channel(family, d, p), make_channel(family, d, p));
        return key_rate_lower_bound(pc, mes).r_tilde;
    };
    if (!(rtilde(0.0) > 0.0))
        throw std::runtime_error("critical_noise: rate not positive at p = 0");

    // The rate can cross zero and come back (the d = 2 dit-phase-flip
    // channel degenerates to a single unitary at p = 1), so scan forward
    // for the first non-positive value before bisecting.
    constexpr int kScanSteps = 128;
    double lo = 0.0, hi = -1.0;
    for (int k = 1; k <= kScanSteps; ++k) {
        const double p = static_cast<double>(k) / kScanSteps;
        if (rtilde(p) <= 0.0) {
            lo = static_cast<double>(k - 1) / kScanSteps;
            hi = p;
            break;
        }
    }
    if (hi < 0.0) return CriticalNoiseResult{1.0, true};
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (rtilde(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return CriticalNoiseResult{hi, false};
}

ConvexityReport useless_set_convexity_trial(int d, std::uint64_t seed, int n_pairs) {
    if (d < 2) throw std::invalid_argument("useless_set_convexity_trial: dimension must be >= 2");
    if (n_pairs < 1) throw std::invalid_argument("useless_set_convexity_trial: need n_pairs >= 1");

    ConvexityReport rep;
    rep.d = d;
    rep.pairs = n_pairs;
    rep.seed = seed;
    rep.skt_min = std::numeric_limits<double>::infinity();
    rep.skt_max = -std::numeric_limits<double>::infinity();
    const ProtocolConfig cfg = ProtocolConfig::noiseless(d);

    auto note_skt = [&](double sk, double st) {
        rep.skt_min = std::min(rep.skt_min, sk + st);
        rep.skt_max = std::max(rep.skt_max, sk + st);
    };

    auto sample_useless = [&](Rng& rng) {
        constexpr int kMaxAttempts = 100000;
        for (int a = 0; a < kMaxAttempts; ++a) {
            MixtureSpec spec = random_bell_mixture(d, d * d, rng);
            const auto r = bell_mixture_key_rate_analytic(spec);
            ++rep.states_sampled;
            if (r.r_bits < 0.0) {
                note_skt(r.s_kappa, r.s_tau);
                return spec;
            }
        }
        throw std::runtime_error("useless_set_convexity_trial: no useless sample found");
    };

    for (int k = 0; k < n_pairs; ++k) {
        Rng rng = trial_rng(seed, static_cast<std::uint64_t>(k));
        const MixtureSpec s1 = sample_useless(rng);
        const MixtureSpec s2 = sample_useless(rng);
        const double lam = uniform_open01(rng);
        const Matrix mixed = lam * bell_mixture(s1).mat + (1.0 - lam) * bell_mixture(s2).mat;
        const auto r = key_rate_lower_bound(cfg, DensityOperator({d, d}, mixed));
        note_skt(r.s_kappa, r.s_tau);
        if (r.r_bits >= 1e-9) ++rep.violations;
    }
    return rep;
}

TheoremSweepReport theorem1_sweep(const std::vector<int>& d_list, const std::vector<int>& rank_list,
                                  int trials, std::uint64_t seed) {
    TheoremSweepReport rep;
    for (int d : d_list)
        for (int rank : rank_list) {
            if (rank > d * d) continue;
            const std::uint64_t cs = cell_seed(seed, d, rank, StateKind::bell_mixture);
            for (int i = 0; i < trials; ++i) {
                Rng rng = trial_rng(cs, static_cast<std::uint64_t>(i));
                const auto t = theorem1_check(random_bell_mixture(d, rank, rng));
                ++rep.specs;
                if (t.dc_advantage) ++rep.advantage_count;
                if (!t.chain_holds) ++rep.violations;
            }
        }
    return rep;
}

namespace detail {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double noiseless_rtilde_from_components(int d, const std::vector<std::pair<double, Vector>>& comps) {
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    Matrix bells(n, n);
    for (int x = 0; x < d; ++x)
        for (int y = 0; y < d; ++y)
            bells.col(static_cast<Eigen::Index>(x) * d + y) = bell_state(d, {x, y}).amps;

    const double inv_d2 = 1.0 / static_cast<double>(n);
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    Vector rotated(n);
    for (int x = 0; x < d; ++x)
        for (int y = 0; y < d; ++y) {
            const Matrix u = weyl_unitary(d, x, y);
            for (const auto& [w, psi] : comps) {
                for (int a = 0; a < d; ++a)
                    rotated.segment(static_cast<Eigen::Index>(a) * d, d).noalias() =
                        u * psi.segment(static_cast<Eigen::Index>(a) * d, d);
                const Vector amp = bells.adjoint() * rotated;
                for (Eigen::Index m = 0; m < n; ++m)
                    q(m, static_cast<Eigen::Index>(x) * d + y) += w * std::norm(amp(m)) * inv_d2;
            }
        }

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    const double inv_d = 1.0 / d;
    for (const auto& [w, psi] : comps)
        for (int i = 0; i < d; ++i)
            for (int r = 0; r < d; ++r) {
                const double pr = w * std::norm(psi(static_cast<Eigen::Index>(i) * d + r)) * inv_d;
                for (int s = 0; s < d; ++s)
                    h(static_cast<Eigen::Index>(i) * d + s, static_cast<Eigen::Index>(r) * d + s) += pr;
            }

    const JointOutcomeDistribution qd(d, std::move(q));
    const JointOutcomeDistribution hd(d, std::move(h));
    const double two_log_d = 2.0 * std::log2(static_cast<double>(d));
    return (two_log_d - conditional_entropy_b_given_a(qd) - conditional_entropy_b_given_a(hd)) /
           two_log_d;
}

double rank2_trial_rtilde(int d, Rng& rng, ChannelFamily family, double p) {
    const auto c = random_rank2_components(d, rng);
    if (family == ChannelFamily::identity || p == 0.0)
        return noiseless_rtilde_from_components(d, {{c.p1, c.psi1}, {1.0 - c.p1, c.psi2}});
    Matrix rho = c.p1 * (c.psi1 * c.psi1.adjoint()) + (1.0 - c.p1) * (c.psi2 * c.psi2.adjoint());
    const ProtocolConfig cfg(d, make_channel(family, d, p), make_channel(family, d, p));
    return key_rate_lower_bound(cfg, DensityOperator({d, d}, std::move(rho))).r_tilde;
}

} // namespace detail

} // namespace sdc
