#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdc/keyrate.hpp"

namespace sdc {

enum class ExperimentKind { table1, fig1_sweep, fig2_critical, fig3_noisy_mixtures, theorem_checks, convexity };
enum class StateKind { bell_mixture, rank2_random };

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::table1;
    std::vector<int> d_list{2, 3, 4, 5};
    std::vector<int> rank_list{2};
    StateKind states = StateKind::bell_mixture;
    ChannelFamily noise = ChannelFamily::identity;
    std::vector<double> p_grid{0.0};
    int trials = 10000;
    std::uint64_t seed = 0;
    int workers = 1;

    void validate() const;
    std::string summary() const; // canonical key=value line, hashed into metadata
};

struct RunMetadata {
    std::uint64_t seed{};
    std::uint64_t config_hash{};
    std::string config_summary;
    std::string version;
    std::string timestamp; // informational only; never serialized into outputs
};

// One Monte Carlo cell. Mean and standard error are reported for both
// averaging conventions (raw and clipped at zero).
struct McRow {
    int d{};
    int rank{};
    ChannelFamily family{ChannelFamily::identity};
    double p{};
    int trials{};
    double mean_raw{};
    double mean_clipped{};
    double stderr_raw{};
    double stderr_clipped{};
    int positive_count{};
};

struct SweepRow {
    int d{};
    ChannelFamily family{};
    double p{};
    double r_bits{};
    double r_tilde{};
    std::optional<double> closed_form_bits;
    bool positive{};
};

struct CriticalRow {
    int d{};
    ChannelFamily family{};
    double p_c{};
    bool saturated{};
};

struct ExperimentResult {
    RunMetadata meta;
    std::vector<McRow> mc;
    std::vector<SweepRow> sweep;
    std::vector<CriticalRow> critical;
};

// Monte Carlo averages of the regularized rate over sampled states, one
// row per (d, rank, p) cell. Per-trial streams are split from the seed, so
// results are identical for any worker count; within a cell family the
// same trial index reuses the same sampled state across the p grid.
ExperimentResult monte_carlo_average(const ExperimentConfig& cfg);

// Regularized-rate curve of the noisy maximally entangled state, with the
// closed-form value alongside for the two Weyl families.
ExperimentResult noise_sweep(int d, ChannelFamily family, const std::vector<double>& p_grid);

struct CriticalNoiseResult {
    double p_c{};
    bool saturated{};
};

// Smallest p in [0,1] with r_tilde(p) <= 0 for the noisy maximally
// entangled state, located by a forward scan (the curves need not be
// monotone over the whole interval) and refined by bisection to `tol`.
// If the rate stays positive on the whole interval, returns 1 with the
// saturation flag set. Requires r_tilde(0) > 0.
CriticalNoiseResult critical_noise(int d, ChannelFamily family, double tol = 1e-6);

struct ConvexityReport {
    int d{};
    int pairs{};
    int violations{};
    int states_sampled{};
    double skt_min{};   // min over samples of s_kappa + s_tau
    double skt_max{};
    std::uint64_t seed{};
};

// Theorem-2 trial: samples pairs of useless full-rank Bell mixtures
// (r < 0), mixes them with a uniform weight and checks the combination
// stays useless under the pipeline evaluation.
ConvexityReport useless_set_convexity_trial(int d, std::uint64_t seed, int n_pairs);

struct TheoremSweepReport {
    long long specs{};
    long long advantage_count{};
    long long violations{};
};

// Theorem-1 property sweep over random Bell mixtures.
TheoremSweepReport theorem1_sweep(const std::vector<int>& d_list, const std::vector<int>& rank_list,
                                  int trials, std::uint64_t seed);

namespace detail {

// Noiseless regularized rate of a state given by its pure decomposition;
// fast path used for Monte Carlo over rank-2 random states.
double noiseless_rtilde_from_components(int d, const std::vector<std::pair<double, Vector>>& comps);

double rank2_trial_rtilde(int d, Rng& rng, ChannelFamily family, double p);

std::uint64_t fnv1a(std::string_view s);

} // namespace detail

} // namespace sdc
