#include "sdc/cli.hpp"

#include <cmath>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdc/experiments.hpp"
#include "sdc/io.hpp"
#include "sdc/version.hpp"

namespace sdc::cli {

namespace {

using nlohmann::json;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// ---- option container -------------------------------------------------

struct CommonOpts {
    std::string d = "2";
    std::string noise = "none";
    double p = 0.0;
    std::string grid;
    std::string rank = "2";
    std::string state = "mes";
    int trials = 10000;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string format = "csv";
    std::string out;
    std::string config;
};

std::vector<int> parse_int_list(const std::string& s, const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t pos = 0;
            const int v = std::stoi(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw UsageError("--" + key + ": cannot parse integer list '" + s + "'");
        }
    }
    if (out.empty()) throw UsageError("--" + key + ": empty list");
    return out;
}

std::vector<double> parse_grid(const std::string& s, const std::string& key) {
    double lo = 0.0, hi = 0.0, step = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream ss(s);
    if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !ss.eof())
        throw UsageError("--" + key + ": expected lo:hi:step, got '" + s + "'");
    if (step <= 0.0) throw UsageError("--" + key + ": step must be positive");
    if (lo < 0.0 || hi > 1.0 || lo > hi)
        throw UsageError("--" + key + ": grid outside [0,1]");
    std::vector<double> grid;
    const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    for (int k = 0; k <= n; ++k) grid.push_back(lo + k * step);
    return grid;
}

ChannelFamily parse_noise_or_throw(const std::string& s) {
    const auto f = parse_family(s);
    if (!f) throw UsageError("--noise: unknown family '" + s + "'");
    return *f;
}

void check_p_flag(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("--p: noise strength outside [0,1]");
}

// Canonical flat key=value echo of a run configuration; reparses to the
// same values through load_config_file.
std::string config_echo(const CommonOpts& o) {
    std::ostringstream os;
    os << "d = " << o.d << "\n";
    os << "noise = " << o.noise << "\n";
    os << "p = " << io::format_double(o.p) << "\n";
    if (!o.grid.empty()) os << "grid = " << o.grid << "\n";
    os << "rank = " << o.rank << "\n";
    os << "state = " << o.state << "\n";
    os << "trials = " << o.trials << "\n";
    os << "seed = " << o.seed << "\n";
    os << "workers = " << o.workers << "\n";
    os << "format = " << o.format << "\n";
    return os.str();
}

json metadata_json(const CommonOpts& o) {
    json meta;
    meta["seed"] = o.seed;
    meta["version"] = std::string(kVersion);
    const std::string echo = config_echo(o);
    meta["config_hash"] = detail::fnv1a(echo);
    json cfg = json::object();
    for (const auto& [k, v] : io::parse_flat_config(echo, "echo")) cfg[k] = v;
    meta["config"] = cfg;
    return meta;
}

void emit(const CommonOpts& o, const std::string& content) {
    if (o.out.empty()) {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << '\n';
    } else {
        io::write_atomic(o.out, content);
        std::cerr << "wrote " << o.out << "\n";
    }
}

std::string bool_str(bool b) { return b ? "1" : "0"; }

// ---- subcommands ------------------------------------------------------

int cmd_keyrate(const CommonOpts& o) {
    const auto d_list = parse_int_list(o.d, "d");
    if (d_list.size() != 1) throw UsageError("--d: keyrate expects a single dimension");
    const int d = d_list[0];
    const ChannelFamily fam = parse_noise_or_throw(o.noise);
    check_p_flag(o.p);
    const ProtocolConfig cfg(d, make_channel(fam, d, o.p), make_channel(fam, d, o.p));

    KeyRateReport rep;
    if (o.state == "mes") {
        rep = key_rate_lower_bound(cfg, max_entangled(d).to_density());
    } else if (o.state == "bell-mixture") {
        const auto ranks = parse_int_list(o.rank, "rank");
        if (ranks.size() != 1) throw UsageError("--rank: keyrate expects a single rank");
        Rng rng = trial_rng(o.seed, 0);
        rep = key_rate_lower_bound(cfg, bell_mixture(random_bell_mixture(d, ranks[0], rng)));
    } else if (o.state == "rank2") {
        Rng rng = trial_rng(o.seed, 0);
        rep = key_rate_lower_bound(cfg, random_rank2_state(d, rng));
    } else {
        throw UsageError("--state: expected mes|bell-mixture|rank2, got '" + o.state + "'");
    }

    if (o.format == "json") {
        json out;
        out["metadata"] = metadata_json(o);
        out["report"] = {{"d", rep.d},
                         {"s_kappa", rep.s_kappa},
                         {"s_tau", rep.s_tau},
                         {"r_bits", rep.r_bits},
                         {"r_tilde", rep.r_tilde},
                         {"dc_capacity", rep.dc_capacity},
                         {"dc_advantage", rep.dc_advantage},
                         {"positive_key", rep.positive_key}};
        emit(o, out.dump(2));
    } else {
        std::ostringstream os;
        os << "d,family,p,state,s_kappa,s_tau,r_bits,r_tilde,dc_capacity,dc_advantage,positive_key\n";
        os << rep.d << ',' << family_name(fam) << ',' << io::format_double(o.p) << ',' << o.state
           << ',' << io::format_double(rep.s_kappa) << ',' << io::format_double(rep.s_tau) << ','
           << io::format_double(rep.r_bits) << ',' << io::format_double(rep.r_tilde) << ','
           << io::format_double(rep.dc_capacity) << ',' << bool_str(rep.dc_advantage) << ','
           << bool_str(rep.positive_key) << '\n';
        emit(o, os.str());
    }
    return 0;
}

int cmd_sweep(const CommonOpts& o) {
    const auto d_list = parse_int_list(o.d, "d");
    if (d_list.size() != 1) throw UsageError("--d: sweep expects a single dimension");
    const ChannelFamily fam = parse_noise_or_throw(o.noise);
    if (fam == ChannelFamily::identity) throw UsageError("--noise: sweep needs a noise family");
    const auto grid = parse_grid(o.grid.empty() ? "0:1:0.01" : o.grid, "grid");

    const auto res = noise_sweep(d_list[0], fam, grid);

    if (o.format == "json") {
        json rows = json::array();
        for (const auto& r : res.sweep) {
            json row = {{"d", r.d},          {"family", family_name(r.family)},
                        {"p", r.p},          {"r_bits", r.r_bits},
                        {"r_tilde", r.r_tilde}, {"positive_flag", r.positive}};
            if (r.closed_form_bits) row["closed_form_bits"] = *r.closed_form_bits;
            rows.push_back(row);
        }
        json out;
        out["metadata"] = metadata_json(o);
        out["rows"] = rows;
        emit(o, out.dump(2));
    } else {
        std::ostringstream os;
        os << "# seed=" << o.seed << " version=" << kVersion
           << " config_hash=" << detail::fnv1a(config_echo(o)) << "\n";
        os << "d,family,p,r_bits,r_tilde,closed_form_bits,positive_flag\n";
        for (const auto& r : res.sweep) {
            os << r.d << ',' << family_name(r.family) << ',' << io::format_double(r.p) << ','
               << io::format_double(r.r_bits) << ',' << io::format_double(r.r_tilde) << ','
               << (r.closed_form_bits ? io::format_double(*r.closed_form_bits) : std::string{})
               << ',' << bool_str(r.positive) << '\n';
        }
        emit(o, os.str());
    }
    return 0;
}

int cmd_critical(const CommonOpts& o) {
    const auto d_list = parse_int_list(o.d, "d");
    const ChannelFamily fam = parse_noise_or_throw(o.noise);
    if (fam == ChannelFamily::identity) throw UsageError("--noise: critical needs a noise family");

    std::vector<CriticalRow> rows;
    for (int d : d_list) {
        const auto res = critical_noise(d, fam);
        rows.push_back(CriticalRow{d, fam, res.p_c, res.saturated});
    }

    if (o.format == "json") {
        json jrows = json::array();
        for (const auto& r : rows)
            jrows.push_back({{"d", r.d},
                             {"family", family_name(r.family)},
                             {"p_c", r.p_c},
                             {"saturated", r.saturated}});
        json out;
        out["metadata"] = metadata_json(o);
        out["rows"] = jrows;
        emit(o, out.dump(2));
    } else {
        std::ostringstream os;
        os << "d,family,p_c,saturated\n";
        for (const auto& r : rows)
            os << r.d << ',' << family_name(r.family) << ',' << io::format_double(r.p_c) << ','
               << bool_str(r.saturated) << '\n';
        emit(o, os.str());
    }
    return 0;
}

int cmd_montecarlo(const CommonOpts& o) {
    ExperimentConfig cfg;
    cfg.d_list = parse_int_list(o.d, "d");
    cfg.rank_list = parse_int_list(o.rank, "rank");
    cfg.noise = parse_noise_or_throw(o.noise);
    cfg.trials = o.trials;
    cfg.seed = o.seed;
    cfg.workers = o.workers;
    if (o.state == "bell-mixture")
        cfg.states = StateKind::bell_mixture;
    else if (o.state == "rank2")
        cfg.states = StateKind::rank2_random;
    else if (o.state != "mes")
        throw UsageError("--state: expected bell-mixture|rank2, got '" + o.state + "'");
    else
        cfg.states = StateKind::bell_mixture;
    if (cfg.noise == ChannelFamily::identity) {
        cfg.kind = ExperimentKind::table1;
        cfg.p_grid = {0.0};
    } else {
        cfg.kind = ExperimentKind::fig3_noisy_mixtures;
        cfg.p_grid = o.grid.empty() ? std::vector<double>{o.p} : parse_grid(o.grid, "grid");
        if (o.grid.empty()) check_p_flag(o.p);
    }

    const auto res = monte_carlo_average(cfg);

    if (o.format == "json") {
        json rows = json::array();
        for (const auto& r : res.mc)
            rows.push_back({{"d", r.d},
                            {"rank", r.rank},
                            {"family", family_name(r.family)},
                            {"p", r.p},
                            {"n_trials", r.trials},
                            {"mean_r_tilde_raw", r.mean_raw},
                            {"mean_r_tilde_clipped", r.mean_clipped},
                            {"stderr_raw", r.stderr_raw},
                            {"stderr_clipped", r.stderr_clipped},
                            {"positive_count", r.positive_count}});
        json out;
        out["metadata"] = metadata_json(o);
        out["metadata"]["config_summary"] = res.meta.config_summary;
        out["rows"] = rows;
        emit(o, out.dump(2));
    } else {
        std::ostringstream os;
        os << "# version=" << kVersion << " config_hash=" << res.meta.config_hash << "\n";
        os << "d,R,family,p,n_trials,mean_r_tilde_raw,mean_r_tilde_clipped,stderr,seed\n";
        for (const auto& r : res.mc)
            os << r.d << ',' << r.rank << ',' << family_name(r.family) << ','
               << io::format_double(r.p) << ',' << r.trials << ','
               << io::format_double(r.mean_raw) << ',' << io::format_double(r.mean_clipped) << ','
               << io::format_double(r.stderr_raw) << ',' << o.seed << '\n';
        emit(o, os.str());
    }
    return 0;
}

int cmd_theorems(const CommonOpts& o) {
    const auto d_list = parse_int_list(o.d, "d");
    const auto ranks = parse_int_list(o.rank, "rank");

    const auto t1 = theorem1_sweep(d_list, ranks, o.trials, o.seed);
    std::cout << "theorem-1 sweep: " << t1.specs << " mixtures, " << t1.advantage_count
              << " with DC advantage, " << t1.violations << " chain violations\n";

    bool ok = t1.violations == 0;
    const int pairs = std::max(1, o.trials / 10);
    for (int d : d_list) {
        if (d > 3) continue; // convexity trials kept to the small dimensions
        const auto cv = useless_set_convexity_trial(d, o.seed, pairs);
        const double bound = 4.0 * std::log2(static_cast<double>(d));
        const bool in_range = cv.skt_min >= 0.0 && cv.skt_max <= bound + 1e-9;
        std::cout << "theorem-2 convexity d=" << d << ": " << cv.pairs << " pairs, "
                  << cv.violations << " violations, s_kappa+s_tau in [" << io::format_double(cv.skt_min)
                  << ", " << io::format_double(cv.skt_max) << "] of [0, " << io::format_double(bound)
                  << "]\n";
        ok = ok && cv.violations == 0 && in_range;
    }
    std::cout << (ok ? "theorems: PASS\n" : "theorems: FAIL\n");
    return ok ? 0 : 3;
}

// ---- validate ---------------------------------------------------------

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

void run_check(std::vector<Check>& out, const std::string& name,
               const std::function<std::string()>& body) {
    // body returns an empty string on success, a reason on failure
    try {
        std::string detail = body();
        out.push_back({name, detail.empty(), detail});
    } catch (const std::exception& e) {
        out.push_back({name, false, e.what()});
    }
}

std::string check_weyl() {
    for (int d = 2; d <= 6; ++d)
        for (int x = 0; x < d; ++x)
            for (int y = 0; y < d; ++y) {
                const Matrix u = weyl_unitary(d, x, y);
                if ((u.adjoint() * u - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-12)
                    return "non-unitary at d=" + std::to_string(d);
                for (int x2 = 0; x2 < d; ++x2)
                    for (int y2 = 0; y2 < d; ++y2) {
                        const Complex tr = (u.adjoint() * weyl_unitary(d, x2, y2)).trace();
                        const double want = (x == x2 && y == y2) ? d : 0.0;
                        if (std::abs(tr - Complex(want, 0)) > 1e-9)
                            return "trace orthogonality broken at d=" + std::to_string(d);
                    }
            }
    return {};
}

std::string check_bell_basis() {
    for (int d = 2; d <= 6; ++d) {
        const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
        Matrix b(n, n);
        for (int x = 0; x < d; ++x)
            for (int y = 0; y < d; ++y)
                b.col(static_cast<Eigen::Index>(x) * d + y) = bell_state(d, {x, y}).amps;
        if ((b.adjoint() * b - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12)
            return "Gram matrix deviates at d=" + std::to_string(d);
        if ((b * b.adjoint() - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
            return "completeness deviates at d=" + std::to_string(d);
    }
    return {};
}

std::string check_test_basis() {
    for (int d = 2; d <= 6; ++d) {
        const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
        Matrix t(n, n);
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                t.col(static_cast<Eigen::Index>(j) * d + k) = test_basis_vector(d, j, k).amps;
        if ((t.adjoint() * t - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12)
            return "Gram matrix deviates at d=" + std::to_string(d);
    }
    return {};
}

std::string check_overlap() {
    for (int d = 2; d <= 6; ++d) overlap_constant(d); // throws on deviation
    return {};
}

std::string check_kraus() {
    for (int d = 2; d <= 5; ++d)
        for (int k = 0; k <= 10; ++k) {
            const double p = k / 10.0;
            for (auto fam : {ChannelFamily::depolarising, ChannelFamily::dit_phase_flip,
                             ChannelFamily::amplitude_damping}) {
                const auto ch = make_channel(fam, d, p);
                if (completeness_residual(ch.ops, d) > 1e-12)
                    return std::string(family_name(fam)) + " residual > 1e-12 at d=" +
                           std::to_string(d) + " p=" + io::format_double(p);
            }
        }
    return {};
}

std::string check_unitality() {
    for (int d = 2; d <= 4; ++d) {
        const Matrix mixed = Matrix::Identity(d, d) / d;
        for (auto fam : {ChannelFamily::depolarising, ChannelFamily::dit_phase_flip})
            for (double p : {0.3, 0.7, 1.0}) {
                const auto ch = make_channel(fam, d, p);
                if ((detail::apply_kraus_single(mixed, ch.ops) - mixed).cwiseAbs().maxCoeff() > 1e-12)
                    return std::string(family_name(fam)) + " not unital at d=" + std::to_string(d);
            }
        const auto ad = amplitude_damping(d, 0.5);
        if ((detail::apply_kraus_single(mixed, ad.ops) - mixed).cwiseAbs().maxCoeff() < 1e-3)
            return "amplitude damping unexpectedly unital at d=" + std::to_string(d);
    }
    return {};
}

std::string check_oracle_equivalence() {
    for (int d = 2; d <= 4; ++d) {
        const ProtocolConfig cfg = ProtocolConfig::noiseless(d);
        for (int t = 0; t < 10; ++t) {
            Rng rng = trial_rng(20 + static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(t));
            const int rank = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(d * d));
            const MixtureSpec spec = random_bell_mixture(d, rank, rng);
            const DensityOperator rho = bell_mixture(spec);
            const double dq = (key_run_distribution(cfg, rho).table() -
                               bell_mixture_key_distribution(spec).table())
                                  .cwiseAbs()
                                  .maxCoeff();
            const double dh = (test_run_distribution(cfg, rho).table() -
                               bell_mixture_test_distribution(spec).table())
                                  .cwiseAbs()
                                  .maxCoeff();
            if (dq > 1e-10 || dh > 1e-10)
                return "closed-form tables deviate at d=" + std::to_string(d) +
                       " (dq=" + io::format_double(dq) + ", dh=" + io::format_double(dh) + ")";
        }
    }
    return {};
}

std::string check_analytic_vs_pipeline() {
    for (int d = 2; d <= 4; ++d) {
        const ProtocolConfig cfg = ProtocolConfig::noiseless(d);
        for (int t = 0; t < 10; ++t) {
            Rng rng = trial_rng(40 + static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(t));
            const int rank = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(d * d));
            const MixtureSpec spec = random_bell_mixture(d, rank, rng);
            const auto a = bell_mixture_key_rate_analytic(spec);
            const auto b = key_rate_lower_bound(cfg, bell_mixture(spec));
            if (std::abs(a.r_bits - b.r_bits) > 1e-9)
                return "rate mismatch " + io::format_double(a.r_bits) + " vs " +
                       io::format_double(b.r_bits) + " at d=" + std::to_string(d);
        }
    }
    return {};
}

std::string check_closed_forms() {
    for (int d = 2; d <= 5; ++d) {
        const double want = 2.0 * std::log2(static_cast<double>(d));
        if (std::abs(closed_form_depolarising(d, 0.0) - want) > 1e-9 ||
            std::abs(closed_form_dit_phase_flip(d, 0.0) - want) > 1e-9)
            return "p=0 endpoint deviates at d=" + std::to_string(d);
    }
    for (int d = 2; d <= 4; ++d) {
        const DensityOperator mes = max_entangled(d).to_density();
        for (int k = 0; k <= 4; ++k) {
            const double p = k / 4.0;
            for (auto fam : {ChannelFamily::depolarising, ChannelFamily::dit_phase_flip}) {
                const ProtocolConfig cfg(d, make_channel(fam, d, p), make_channel(fam, d, p));
                const double pipeline = key_rate_lower_bound(cfg, mes).r_bits;
                const double closed = fam == ChannelFamily::depolarising
                                          ? closed_form_depolarising(d, p)
                                          : closed_form_dit_phase_flip(d, p);
                if (std::abs(pipeline - closed) > 1e-8)
                    return std::string(family_name(fam)) + " closed form deviates at d=" +
                           std::to_string(d) + " p=" + io::format_double(p);
            }
        }
    }
    return {};
}

std::string check_sampled_invariants() {
    for (int d = 2; d <= 4; ++d)
        for (int t = 0; t < 50; ++t) {
            Rng rng = trial_rng(60 + static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(t));
            const int rank = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(d * d));
            // constructors validate Hermiticity, trace and positivity
            const DensityOperator mix = bell_mixture(random_bell_mixture(d, rank, rng));
            const DensityOperator r2 = random_rank2_state(d, rng);
            const auto rep = bell_mixture_key_rate_analytic(random_bell_mixture(d, rank, rng));
            const double two_log_d = 2.0 * std::log2(static_cast<double>(d));
            if (std::abs(rep.r_bits - (two_log_d - rep.s_kappa - rep.s_tau)) > 1e-12)
                return "report identity broken";
            if (std::abs(rep.r_tilde - rep.r_bits / two_log_d) > 1e-12)
                return "regularized-rate identity broken";
            (void)mix;
            (void)r2;
        }
    return {};
}

std::string check_mixture_marginals() {
    for (int d = 2; d <= 4; ++d)
        for (int t = 0; t < 10; ++t) {
            Rng rng = trial_rng(80 + static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(t));
            const int rank = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(d * d));
            const DensityOperator rho = bell_mixture(random_bell_mixture(d, rank, rng));
            const double want = std::log2(static_cast<double>(d));
            if (std::abs(von_neumann_entropy(partial_trace(rho, {0})) - want) > 1e-9 ||
                std::abs(von_neumann_entropy(partial_trace(rho, {1})) - want) > 1e-9)
                return "mixture marginal not maximally mixed at d=" + std::to_string(d);
        }
    return {};
}

int cmd_validate() {
    std::vector<Check> checks;
    run_check(checks, "weyl-unitarity-orthogonality", check_weyl);
    run_check(checks, "bell-orthonormality-completeness", check_bell_basis);
    run_check(checks, "test-basis-orthonormality", check_test_basis);
    run_check(checks, "mub-overlap-constant", check_overlap);
    run_check(checks, "kraus-completeness-grid", check_kraus);
    run_check(checks, "channel-unitality", check_unitality);
    run_check(checks, "outcome-table-closed-forms", check_oracle_equivalence);
    run_check(checks, "analytic-vs-pipeline-rates", check_analytic_vs_pipeline);
    run_check(checks, "closed-form-noisy-rates", check_closed_forms);
    run_check(checks, "sampled-state-invariants", check_sampled_invariants);
    run_check(checks, "bell-mixture-marginals", check_mixture_marginals);

    bool all = true;
    for (const auto& c : checks) {
        std::cout << (c.pass ? "PASS  " : "FAIL  ") << c.name;
        if (!c.pass) std::cout << "  [" << c.detail << "]";
        std::cout << "\n";
        all = all && c.pass;
    }
    std::cout << (all ? "validate: all checks passed\n" : "validate: FAILURES detected\n");
    return all ? 0 : 3;
}

// ---- config file ------------------------------------------------------

template <typename T>
T parse_number(const std::string& value, const std::string& key) {
    std::istringstream ss(value);
    T v{};
    if (!(ss >> v) || !ss.eof())
        throw UsageError("config: cannot parse value '" + value + "' for key '" + key + "'");
    return v;
}

void apply_config_file(CLI::App* sub, CommonOpts& o) {
    if (o.config.empty()) return;
    std::vector<std::pair<std::string, std::string>> kv;
    try {
        kv = io::load_config_file(o.config);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    for (const auto& [key, value] : kv) {
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr || key == "config")
            throw UsageError("config: unknown key '" + key + "'");
        if (opt->count() > 0) continue; // explicit flags win over the file
        if (key == "d") o.d = value;
        else if (key == "noise") o.noise = value;
        else if (key == "p") o.p = parse_number<double>(value, key);
        else if (key == "grid") o.grid = value;
        else if (key == "rank") o.rank = value;
        else if (key == "state") o.state = value;
        else if (key == "trials") o.trials = parse_number<int>(value, key);
        else if (key == "seed") o.seed = parse_number<std::uint64_t>(value, key);
        else if (key == "workers") o.workers = parse_number<int>(value, key);
        else if (key == "format") {
            if (value != "csv" && value != "json")
                throw UsageError("config: key 'format' must be csv or json");
            o.format = value;
        } else if (key == "out") o.out = value;
        else throw UsageError("config: unknown key '" + key + "'");
    }
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"two-qudit dense-coding QKD key-rate toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    CommonOpts o;
    std::vector<CLI::App*> subs;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--d", o.d, "dimension (or comma list where applicable)");
        sub->add_option("--noise", o.noise, "none|depolarising|dit-phase-flip|amplitude-damping");
        sub->add_option("--p", o.p, "noise strength in [0,1]");
        sub->add_option("--grid", o.grid, "noise grid lo:hi:step");
        sub->add_option("--rank", o.rank, "Bell-mixture rank (or comma list)");
        sub->add_option("--state", o.state, "mes|bell-mixture|rank2");
        sub->add_option("--trials", o.trials, "Monte Carlo trials per cell");
        sub->add_option("--seed", o.seed, "RNG seed");
        sub->add_option("--workers", o.workers, "worker threads");
        sub->add_option("--format", o.format, "csv|json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", o.out, "output path (stdout when omitted)");
        sub->add_option("--config", o.config, "flat key=value config file");
        subs.push_back(sub);
        return sub;
    };

    auto* keyrate = add_common(app.add_subcommand("keyrate", "single key-rate report"));
    auto* sweep = add_common(app.add_subcommand("sweep", "rate curve over a noise grid"));
    auto* critical = add_common(app.add_subcommand("critical", "critical noise strength"));
    auto* montecarlo = add_common(app.add_subcommand("montecarlo", "Monte Carlo averages"));
    auto* theorems = add_common(app.add_subcommand("theorems", "theorem property sweeps"));
    app.add_subcommand("validate", "run the structural invariant suite");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        if (active->get_name() != "validate") apply_config_file(active, o);
        if (active == keyrate) return cmd_keyrate(o);
        if (active == sweep) return cmd_sweep(o);
        if (active == critical) return cmd_critical(o);
        if (active == montecarlo) return cmd_montecarlo(o);
        if (active == theorems) return cmd_theorems(o);
        return cmd_validate();
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace sdc::cli
