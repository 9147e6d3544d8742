#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sdc/keyrate.hpp"
#include "support/test_util.hpp"

using namespace sdc;

namespace {

MixtureSpec random_spec(int d, int rank, std::uint64_t seed, std::uint64_t idx) {
    Rng rng = trial_rng(seed, idx);
    return random_bell_mixture(d, rank, rng);
}

} // namespace

TEST_CASE("noiseless MES rate is 2 log2 d") {
    for (int d : {2, 3, 4, 5}) {
        const auto rep = key_rate_lower_bound(ProtocolConfig::noiseless(d),
                                              max_entangled(d).to_density());
        CHECK(rep.r_bits == doctest::Approx(2.0 * std::log2(d)).epsilon(1e-12));
        CHECK(rep.r_tilde == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.s_kappa == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(rep.s_tau == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(rep.dc_advantage);
        CHECK(rep.positive_key);
    }
}

TEST_CASE("uniform full-rank mixture is maximally useless") {
    for (int d : {2, 3}) {
        std::vector<BellLabel> labels;
        for (int x = 0; x < d; ++x)
            for (int y = 0; y < d; ++y) labels.push_back({x, y});
        const MixtureSpec spec(
            d, labels, ProbabilityVector(std::vector<double>(labels.size(), 1.0 / (d * d))));
        const auto rep = bell_mixture_key_rate_analytic(spec);
        CHECK(rep.s_kappa == doctest::Approx(2.0 * std::log2(d)).epsilon(1e-12));
        CHECK(rep.s_tau == doctest::Approx(std::log2(d)).epsilon(1e-12));
        CHECK(rep.r_bits == doctest::Approx(-std::log2(d)).epsilon(1e-12));
        CHECK_FALSE(rep.dc_advantage);
        // pipeline agrees
        const auto pipe = key_rate_lower_bound(ProtocolConfig::noiseless(d), bell_mixture(spec));
        CHECK(pipe.r_bits == doctest::Approx(rep.r_bits).epsilon(1e-9));
    }
}

TEST_CASE("same-shift rank-2 mixture yields one bit at d = 2") {
    const MixtureSpec spec(2, {{0, 0}, {0, 1}}, ProbabilityVector({0.5, 0.5}));
    const auto rep = bell_mixture_key_rate_analytic(spec);
    CHECK(rep.s_kappa == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.s_tau == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.r_bits == doctest::Approx(1.0).epsilon(1e-12));
    const auto pipe = key_rate_lower_bound(ProtocolConfig::noiseless(2), bell_mixture(spec));
    CHECK(pipe.r_bits == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("analytic and pipeline rates agree on random mixtures") {
    for (int d : {2, 3, 4})
        for (int t = 0; t < 350; ++t) {
            Rng rng = trial_rng(50 + static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(t));
            const int rank = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(d * d));
            const auto spec = random_bell_mixture(d, rank, rng);
            const auto a = bell_mixture_key_rate_analytic(spec);
            const auto b = key_rate_lower_bound(ProtocolConfig::noiseless(d), bell_mixture(spec));
            CHECK(a.r_bits == doctest::Approx(b.r_bits).epsilon(1e-9));
            CHECK(a.s_kappa == doctest::Approx(b.s_kappa).epsilon(1e-9));
            CHECK(a.s_tau == doctest::Approx(b.s_tau).epsilon(1e-9));
        }
}

TEST_CASE("report identities hold exactly") {
    for (int d : {2, 3, 5})
        for (int t = 0; t < 20; ++t) {
            const auto spec = random_spec(d, 1 + t % (d * d), 51, static_cast<std::uint64_t>(t));
            const auto rep = bell_mixture_key_rate_analytic(spec);
            const double two_log_d = 2.0 * std::log2(static_cast<double>(d));
            CHECK(std::abs(rep.r_bits - (two_log_d - rep.s_kappa - rep.s_tau)) < 1e-12);
            CHECK(std::abs(rep.r_tilde - rep.r_bits / two_log_d) < 1e-12);
        }
}

TEST_CASE("dc capacity") {
    for (int d : {2, 3}) {
        const auto mes = dc_capacity(max_entangled(d).to_density());
        CHECK(mes.capacity_bits == doctest::Approx(2.0 * std::log2(d)).epsilon(1e-12));
        CHECK(mes.advantage);

        const DensityOperator mixed({d, d},
                                    Matrix::Identity(d * d, d * d) / static_cast<double>(d * d));
        const auto mm = dc_capacity(mixed);
        CHECK(mm.capacity_bits == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(mm.coherent_gap == doctest::Approx(-std::log2(d)).epsilon(1e-9));
        CHECK_FALSE(mm.advantage);
    }

    // Bell mixture: C = 2 log2 d + sum p log2 p
    Rng rng = trial_rng(52, 0);
    const auto spec = random_bell_mixture(3, 4, rng);
    double plogp = 0.0;
    for (std::size_t i = 0; i < spec.probs.size(); ++i)
        plogp += spec.probs[i] * std::log2(spec.probs[i]);
    const auto dc = dc_capacity(bell_mixture(spec));
    CHECK(dc.capacity_bits == doctest::Approx(2.0 * std::log2(3.0) + plogp).epsilon(1e-9));
}

TEST_CASE("theorem 1 check") {
    // uniform full-rank: no advantage, implication vacuous, r = -log2 d
    for (int d : {2, 3}) {
        std::vector<BellLabel> labels;
        for (int x = 0; x < d; ++x)
            for (int y = 0; y < d; ++y) labels.push_back({x, y});
        const MixtureSpec spec(
            d, labels, ProbabilityVector(std::vector<double>(labels.size(), 1.0 / (d * d))));
        const auto t = theorem1_check(spec);
        CHECK_FALSE(t.dc_advantage);
        CHECK(t.chain_holds);
        CHECK(t.r_bits == doctest::Approx(-std::log2(d)).epsilon(1e-12));
    }

    // property sweep: advantage always implies a non-negative rate
    for (int d : {2, 3, 4})
        for (int rank : {2, 3, 4})
            for (int t = 0; t < 500; ++t) {
                const auto spec =
                    random_spec(d, rank, 53 + static_cast<std::uint64_t>(d * 10 + rank),
                                static_cast<std::uint64_t>(t));
                const auto res = theorem1_check(spec);
                CHECK(res.chain_holds);
                if (res.dc_advantage) {
                    CHECK(res.r_bits >= -1e-9);
                    CHECK(res.r_bits + 1e-9 >= res.chain_rhs);
                    CHECK(res.chain_rhs >= -1e-9);
                }
            }
}

TEST_CASE("case bounds") {
    const double log3 = std::log2(3.0);

    // same shift: RHS pinned to log2 d
    const auto same = case_bounds(3, 2, MixtureStructure::same_x);
    CHECK(same.rhs_min == doctest::Approx(log3));
    CHECK(same.rhs_max == doctest::Approx(log3));

    // distinct shifts: minimum log2(d/R) at uniform probabilities
    const auto dist = case_bounds(3, 2, MixtureStructure::distinct_x);
    CHECK(dist.rhs_min == doctest::Approx(std::log2(1.5)));
    CHECK(dist.rhs_max == doctest::Approx(log3));
    CHECK(dist.uniform_value == doctest::Approx(std::log2(1.5)));

    // full rank uniform: minimum zero
    const auto full = case_bounds(3, 9, MixtureStructure::uniform_full);
    CHECK(full.rhs_min == doctest::Approx(0.0));
    CHECK(full.uniform_value == doctest::Approx(0.0));

    // spread arrangement for d < R < d^2, uniform probabilities
    const auto spread = case_bounds(3, 5, MixtureStructure::distinct_x);
    const double want = log3 + (3.0 / 5.0) * std::log2(3.0 / 5.0) + (2.0 / 5.0) * std::log2(2.0 / 5.0);
    CHECK(spread.uniform_value == doctest::Approx(want).epsilon(1e-12));

    CHECK_THROWS_AS(case_bounds(2, 3, MixtureStructure::same_x), std::invalid_argument);
    CHECK_THROWS_AS(case_bounds(2, 3, MixtureStructure::uniform_full), std::invalid_argument);
    CHECK_THROWS_AS(case_bounds(2, 5, MixtureStructure::distinct_x), std::invalid_argument);

    // random structured specs respect the bounds
    for (int t = 0; t < 200; ++t) {
        Rng rng = trial_rng(54, static_cast<std::uint64_t>(t));
        const int d = 3 + static_cast<int>(rng() % 2);
        const int rank = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(d - 1));
        std::vector<double> w(static_cast<std::size_t>(rank));
        double sum = 0.0;
        for (double& x : w) {
            x = uniform_open01(rng);
            sum += x;
        }
        for (double& x : w) x /= sum;

        // same shift
        std::vector<BellLabel> same_labels;
        for (int y = 0; y < rank; ++y) same_labels.push_back({1, y});
        const auto t1 = theorem1_check(MixtureSpec(d, same_labels, ProbabilityVector(w)));
        const auto b1 = case_bounds(d, rank, MixtureStructure::same_x);
        CHECK(t1.chain_rhs >= b1.rhs_min - 1e-9);
        CHECK(t1.chain_rhs <= b1.rhs_max + 1e-9);

        // distinct shifts
        std::vector<BellLabel> dist_labels;
        for (int x = 0; x < rank; ++x) dist_labels.push_back({x, 0});
        const auto t2 = theorem1_check(MixtureSpec(d, dist_labels, ProbabilityVector(w)));
        const auto b2 = case_bounds(d, rank, MixtureStructure::distinct_x);
        CHECK(t2.chain_rhs >= b2.rhs_min - 1e-9);
        CHECK(t2.chain_rhs <= b2.rhs_max + 1e-9);
    }
}

TEST_CASE("closed forms: endpoints and pipeline agreement") {
    for (int d = 2; d <= 5; ++d) {
        CHECK(closed_form_depolarising(d, 0.0) ==
              doctest::Approx(2.0 * std::log2(d)).epsilon(1e-12));
        CHECK(closed_form_dit_phase_flip(d, 0.0) ==
              doctest::Approx(2.0 * std::log2(d)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(closed_form_depolarising(3, -0.2), std::invalid_argument);
    CHECK_THROWS_AS(closed_form_dit_phase_flip(3, 1.2), std::invalid_argument);

    for (int d : {2, 3, 4}) {
        const auto mes = max_entangled(d).to_density();
        for (int k = 0; k <= 10; ++k) {
            const double p = k / 10.0;
            const ProtocolConfig dp(d, depolarising(d, p), depolarising(d, p));
            CHECK(std::abs(key_rate_lower_bound(dp, mes).r_bits -
                           closed_form_depolarising(d, p)) < 1e-8);
            const ProtocolConfig ph(d, dit_phase_flip(d, p), dit_phase_flip(d, p));
            CHECK(std::abs(key_rate_lower_bound(ph, mes).r_bits -
                           closed_form_dit_phase_flip(d, p)) < 1e-8);
        }
    }
}

TEST_CASE("closed forms are non-increasing while the rate lasts") {
    // checked on the first positive-rate stretch; past the first zero the
    // d = 2 dit-phase-flip curve climbs back towards its unitary p = 1 limit
    for (int d : {2, 3, 4, 5}) {
        double prev_dp = closed_form_depolarising(d, 0.0);
        double prev_ph = closed_form_dit_phase_flip(d, 0.0);
        for (int k = 1; k <= 40; ++k) {
            const double p = k / 40.0;
            const double dp = closed_form_depolarising(d, p);
            if (prev_dp > 0.0) CHECK(dp <= prev_dp + 1e-9);
            prev_dp = dp;
            const double ph = closed_form_dit_phase_flip(d, p);
            if (prev_ph > 0.0 && ph > 0.0) CHECK(ph <= prev_ph + 1e-9);
            if (prev_ph <= 0.0) break;
            prev_ph = ph;
        }
    }
}

TEST_CASE("local-unitary invariance through canonicalization") {
    Rng rng = trial_rng(55, 0);
    std::normal_distribution<double> g(0.0, 1.0);
    auto random_unitary = [&](int d) {
        Matrix m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
        return Matrix(Eigen::HouseholderQR<Matrix>(m).householderQ());
    };
    for (int d : {2, 3}) {
        const Vector rotated =
            tensor_product(random_unitary(d), random_unitary(d)) * max_entangled(d).amps;
        const auto form = canonicalize_mes(PureState({d, d}, rotated));
        const auto rep =
            key_rate_lower_bound(ProtocolConfig::noiseless(d), form.canonical.to_density());
        CHECK(rep.r_bits == doctest::Approx(2.0 * std::log2(d)).epsilon(1e-9));
    }
}
