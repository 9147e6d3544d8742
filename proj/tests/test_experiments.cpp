#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sdc/experiments.hpp"

using namespace sdc;

namespace {

ExperimentConfig small_table1() {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::table1;
    cfg.d_list = {2, 3};
    cfg.rank_list = {2};
    cfg.trials = 400;
    cfg.seed = 97;
    return cfg;
}

} // namespace

TEST_CASE("config validation") {
    ExperimentConfig cfg;
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = ExperimentConfig{};
    cfg.p_grid = {1.5};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = ExperimentConfig{};
    cfg.d_list = {9};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("monte carlo determinism across runs and worker counts") {
    auto cfg = small_table1();
    const auto a = monte_carlo_average(cfg);
    const auto b = monte_carlo_average(cfg);
    cfg.workers = 3;
    const auto c = monte_carlo_average(cfg);
    REQUIRE(a.mc.size() == b.mc.size());
    REQUIRE(a.mc.size() == c.mc.size());
    for (std::size_t i = 0; i < a.mc.size(); ++i) {
        CHECK(a.mc[i].mean_raw == b.mc[i].mean_raw);
        CHECK(a.mc[i].mean_raw == c.mc[i].mean_raw);
        CHECK(a.mc[i].stderr_raw == c.mc[i].stderr_raw);
    }
}

TEST_CASE("single-trial runs are deterministic and finite") {
    ExperimentConfig cfg = small_table1();
    cfg.trials = 1;
    const auto res = monte_carlo_average(cfg);
    for (const auto& row : res.mc) {
        CHECK(std::isfinite(row.mean_raw));
        CHECK(row.stderr_raw == 0.0);
        CHECK(row.trials == 1);
    }
}

TEST_CASE("standard error scales like 1/sqrt(N)") {
    ExperimentConfig cfg = small_table1();
    cfg.d_list = {2};
    cfg.trials = 2000;
    const double se1 = monte_carlo_average(cfg).mc[0].stderr_raw;
    cfg.trials = 4000;
    const double se2 = monte_carlo_average(cfg).mc[0].stderr_raw;
    const double ratio = se2 / se1;
    CHECK(ratio > 0.6);
    CHECK(ratio < 0.82); // 1/sqrt(2) ~ 0.707 up to sampling noise
}

TEST_CASE("rank-2 fast path matches the pipeline") {
    for (int d : {2, 3})
        for (int t = 0; t < 25; ++t) {
            Rng a = trial_rng(200 + static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(t));
            Rng b = a;
            const double fast = detail::rank2_trial_rtilde(d, a, ChannelFamily::identity, 0.0);
            const auto comps = random_rank2_components(d, b);
            Matrix rho = comps.p1 * (comps.psi1 * comps.psi1.adjoint()) +
                         (1.0 - comps.p1) * (comps.psi2 * comps.psi2.adjoint());
            const auto rep = key_rate_lower_bound(ProtocolConfig::noiseless(d),
                                                  DensityOperator({d, d}, std::move(rho)));
            CHECK(fast == doctest::Approx(rep.r_tilde).epsilon(1e-10));
        }
}

TEST_CASE("noise sweep rows") {
    const std::vector<double> grid{0.0, 0.1, 0.2};
    const auto res = noise_sweep(3, ChannelFamily::depolarising, grid);
    REQUIRE(res.sweep.size() == 3);
    CHECK(res.sweep[0].p == 0.0);
    CHECK(res.sweep[0].r_tilde == doctest::Approx(1.0).epsilon(1e-9));
    for (const auto& row : res.sweep) {
        REQUIRE(row.closed_form_bits.has_value());
        CHECK(std::abs(*row.closed_form_bits - row.r_bits) < 1e-8);
    }
    CHECK(res.sweep[1].r_tilde < res.sweep[0].r_tilde);

    const auto ad = noise_sweep(2, ChannelFamily::amplitude_damping, grid);
    CHECK_FALSE(ad.sweep[1].closed_form_bits.has_value());
}

TEST_CASE("critical noise") {
    // depolarising and dit-phase-flip are bracketed on [0,1]
    const auto dp2 = critical_noise(2, ChannelFamily::depolarising);
    CHECK_FALSE(dp2.saturated);
    CHECK(dp2.p_c == doctest::Approx(0.1710).epsilon(1e-3));

    // the d = 2 dit-phase-flip rate revives near p = 1; the finder must
    // still report the first crossing
    const auto ph2 = critical_noise(2, ChannelFamily::dit_phase_flip);
    CHECK_FALSE(ph2.saturated);
    CHECK(ph2.p_c < 0.2);

    // the closed-form root agrees with the pipeline root at d = 2;
    // both are located to 1e-6, so they match within twice that
    double lo = 0.1, hi = 0.3;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (closed_form_depolarising(2, mid) > 0.0 ? lo : hi) = mid;
    }
    CHECK(std::abs(dp2.p_c - hi) < 2e-6);

    // a channel that never kills the rate saturates at p = 1
    const auto idle = critical_noise(2, ChannelFamily::identity);
    CHECK(idle.saturated);
    CHECK(idle.p_c == 1.0);
}

TEST_CASE("noisy-mixture monte carlo reuses states across the p grid") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::fig3_noisy_mixtures;
    cfg.d_list = {2};
    cfg.rank_list = {2};
    cfg.noise = ChannelFamily::depolarising;
    cfg.p_grid = {0.0, 0.1};
    cfg.trials = 200;
    cfg.seed = 5;
    const auto res = monte_carlo_average(cfg);
    REQUIRE(res.mc.size() == 2);
    // p = 0 mean under the pipeline equals the noiseless analytic mean
    ExperimentConfig base = cfg;
    base.kind = ExperimentKind::table1;
    base.noise = ChannelFamily::identity;
    base.p_grid = {0.0};
    const auto noiseless = monte_carlo_average(base);
    CHECK(res.mc[0].mean_raw == doctest::Approx(noiseless.mc[0].mean_raw).epsilon(1e-9));
    // noise can only lower the average
    CHECK(res.mc[1].mean_raw < res.mc[0].mean_raw);
}

TEST_CASE("dimensional advantage of noisy rank-2 mixtures") {
    // clipped average grows with dimension at a fixed moderate noise level
    for (auto fam : {ChannelFamily::depolarising, ChannelFamily::dit_phase_flip,
                     ChannelFamily::amplitude_damping}) {
        ExperimentConfig cfg;
        cfg.kind = ExperimentKind::fig3_noisy_mixtures;
        cfg.d_list = {2, 3};
        cfg.rank_list = {2};
        cfg.noise = fam;
        cfg.p_grid = {0.05};
        cfg.trials = 300;
        cfg.seed = 11;
        const auto res = monte_carlo_average(cfg);
        REQUIRE(res.mc.size() == 2);
        CHECK(res.mc[1].mean_clipped > res.mc[0].mean_clipped);
    }
}

namespace {

// first zero of the raw-mean rate curve by scan + linear interpolation
double mixture_mean_crossing(int d, ChannelFamily fam, const std::vector<double>& grid,
                             int trials, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::fig3_noisy_mixtures;
    cfg.d_list = {d};
    cfg.rank_list = {2};
    cfg.noise = fam;
    cfg.p_grid = grid;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.workers = 2;
    const auto res = monte_carlo_average(cfg);
    for (std::size_t k = 1; k < res.mc.size(); ++k) {
        const double a = res.mc[k - 1].mean_raw, b = res.mc[k].mean_raw;
        if (a > 0.0 && b <= 0.0)
            return grid[k - 1] + (grid[k] - grid[k - 1]) * a / (a - b);
    }
    return grid.back();
}

} // namespace

TEST_CASE("noisy-mixture critical noise of the mean curve") {
    // The Weyl-noise mixture curves die later as the dimension grows; the
    // amplitude-damping crossings are recorded for inspection (their
    // ordering is sampling-convention sensitive and is not asserted).
    const std::vector<double> grid{0.05, 0.08, 0.11, 0.14, 0.17, 0.2, 0.23, 0.26};
    const double dp2 = mixture_mean_crossing(2, ChannelFamily::depolarising, grid, 300, 19);
    const double dp3 = mixture_mean_crossing(3, ChannelFamily::depolarising, grid, 300, 19);
    CHECK(dp3 > dp2);
    const double ad2 = mixture_mean_crossing(2, ChannelFamily::amplitude_damping, grid, 300, 19);
    const double ad3 = mixture_mean_crossing(3, ChannelFamily::amplitude_damping, grid, 300, 19);
    CHECK(ad2 > grid.front());
    CHECK(ad3 > grid.front());
    MESSAGE("raw-mean crossings: dp d=2 " << dp2 << ", d=3 " << dp3 << "; ad d=2 " << ad2
                                          << ", d=3 " << ad3);
}

TEST_CASE("useless-state convexity trials") {
    for (int d : {2, 3}) {
        const auto rep = useless_set_convexity_trial(d, 2024, 100);
        CHECK(rep.violations == 0);
        CHECK(rep.skt_min >= 0.0);
        CHECK(rep.skt_max <= 4.0 * std::log2(d) + 1e-9);
        CHECK(rep.states_sampled >= 2 * rep.pairs);
    }

    // mixing the uniform full-rank state with itself stays useless
    std::vector<BellLabel> labels;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) labels.push_back({x, y});
    const MixtureSpec uni(2, labels, ProbabilityVector(std::vector<double>(4, 0.25)));
    const auto rep = key_rate_lower_bound(ProtocolConfig::noiseless(2), bell_mixture(uni));
    CHECK(rep.r_bits == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("theorem-1 sweep has no violations") {
    const auto rep = theorem1_sweep({2, 3}, {2, 3}, 500, 7);
    CHECK(rep.specs == 2000);
    CHECK(rep.violations == 0);
    CHECK(rep.advantage_count > 0);
}
