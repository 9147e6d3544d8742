#include "sdc/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace sdc {

namespace {

Complex unit_phase(int d, long long k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(((k % d) + d) % d) / d;
    return {std::cos(angle), std::sin(angle)};
}

void check_label(int d, int x, int y, const char* who) {
    if (d < 2) throw std::invalid_argument(std::string(who) + ": dimension must be >= 2");
    if (x < 0 || x >= d || y < 0 || y >= d)
        throw std::invalid_argument(std::string(who) + ": label out of range");
}

} // namespace

MixtureSpec::MixtureSpec(int d_, std::vector<BellLabel> labels_, ProbabilityVector probs_)
    : d(d_), labels(std::move(labels_)), probs(std::move(probs_)) {
    if (d < 2) throw std::invalid_argument("MixtureSpec: dimension must be >= 2");
    if (labels.empty()) throw std::invalid_argument("MixtureSpec: no labels");
    if (labels.size() != probs.size())
        throw std::invalid_argument("MixtureSpec: label/probability count mismatch");
    if (static_cast<int>(labels.size()) > d * d)
        throw std::invalid_argument("MixtureSpec: more labels than d^2");
    std::set<std::pair<int, int>> seen;
    for (const auto& l : labels) {
        check_label(d, l.x, l.y, "MixtureSpec");
        if (!seen.insert({l.x, l.y}).second)
            throw std::invalid_argument("MixtureSpec: duplicate labels");
    }
}

std::vector<double> MixtureSpec::shift_marginal() const {
    std::vector<double> pt(static_cast<std::size_t>(d), 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) pt[static_cast<std::size_t>(labels[i].x)] += probs[i];
    return pt;
}

PureState::PureState(std::vector<int> dims_, Vector amps_)
    : dims(std::move(dims_)), amps(std::move(amps_)) {
    if (dims.empty()) throw std::invalid_argument("PureState: empty dimension list");
    long long total = 1;
    for (int d : dims) {
        if (d < 2) throw std::invalid_argument("PureState: subsystem dimension < 2");
        total *= d;
    }
    if (amps.size() != total) throw std::invalid_argument("PureState: amplitude count mismatch");
    if (!amps.allFinite()) throw std::invalid_argument("PureState: non-finite amplitudes");
    if (std::abs(amps.squaredNorm() - 1.0) > 1e-9)
        throw std::invalid_argument("PureState: not normalized");
}

DensityOperator PureState::to_density() const {
    return DensityOperator(dims, amps * amps.adjoint());
}

Matrix weyl_unitary(int d, int x, int y) {
    check_label(d, x, y, "weyl_unitary");
    Matrix u = Matrix::Zero(d, d);
    for (int l = 0; l < d; ++l) u(l, (l + x) % d) = unit_phase(d, static_cast<long long>(l) * y);
    return u;
}

PureState bell_state(int d, BellLabel label) {
    check_label(d, label.x, label.y, "bell_state");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(d) * d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    for (int l = 0; l < d; ++l)
        v(static_cast<Eigen::Index>((l + label.x) % d) * d + l) =
            norm * unit_phase(d, static_cast<long long>(l) * label.y);
    return PureState({d, d}, std::move(v));
}

PureState max_entangled(int d) {
    if (d < 2) throw std::invalid_argument("max_entangled: dimension must be >= 2");
    return bell_state(d, BellLabel{0, 0});
}

Vector fourier_vector(int d, int k) {
    if (d < 2 || k < 0 || k >= d) throw std::invalid_argument("fourier_vector: index out of range");
    Vector v(d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    for (int l = 0; l < d; ++l) v(l) = norm * unit_phase(d, static_cast<long long>(k) * l);
    return v;
}

PureState test_basis_vector(int d, int j, int k) {
    check_label(d, j, k, "test_basis_vector");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(d) * d);
    v.segment(static_cast<Eigen::Index>(j) * d, d) = fourier_vector(d, k);
    return PureState({d, d}, std::move(v));
}

DensityOperator bell_mixture(const MixtureSpec& spec) {
    const int d = spec.d;
    Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d);
    for (std::size_t i = 0; i < spec.labels.size(); ++i) {
        const Vector v = bell_state(d, spec.labels[i]).amps;
        rho.noalias() += spec.probs[i] * (v * v.adjoint());
    }
    return DensityOperator({d, d}, std::move(rho));
}

MixtureSpec random_bell_mixture(int d, int rank, Rng& rng) {
    if (d < 2) throw std::invalid_argument("random_bell_mixture: dimension must be >= 2");
    if (rank < 1 || rank > d * d)
        throw std::invalid_argument("random_bell_mixture: rank must be in [1, d^2]");

    // partial Fisher-Yates over the d^2 labels
    std::vector<int> idx(static_cast<std::size_t>(d) * d);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::vector<BellLabel> labels;
    labels.reserve(static_cast<std::size_t>(rank));
    for (int i = 0; i < rank; ++i) {
        std::uniform_int_distribution<int> pick(i, d * d - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
        labels.push_back({idx[static_cast<std::size_t>(i)] / d, idx[static_cast<std::size_t>(i)] % d});
    }

    std::vector<double> w(static_cast<std::size_t>(rank));
    double sum = 0.0;
    for (double& x : w) {
        x = uniform_open01(rng);
        sum += x;
    }
    for (double& x : w) x /= sum;
    return MixtureSpec(d, std::move(labels), ProbabilityVector(std::move(w)));
}

Rank2Components random_rank2_components(int d, Rng& rng, bool complex_amplitudes) {
    if (d < 2) throw std::invalid_argument("random_rank2_state: dimension must be >= 2");
    std::normal_distribution<double> gauss(0.0, 1.0);

    auto draw = [&](void) {
        Vector a(d);
        do {
            for (int i = 0; i < d; ++i) {
                const double re = gauss(rng);
                const double im = complex_amplitudes ? gauss(rng) : 0.0;
                a(i) = Complex(re, im);
            }
        } while (a.norm() < 1e-12);
        a /= a.norm();
        return a;
    };

    const Vector a = draw();
    const Vector b = draw();
    Vector psi1 = Vector::Zero(static_cast<Eigen::Index>(d) * d);
    Vector psi2 = Vector::Zero(static_cast<Eigen::Index>(d) * d);
    for (int i = 0; i < d; ++i) {
        psi1(static_cast<Eigen::Index>(i) * d + i) = a(i);
        psi2(static_cast<Eigen::Index>(i) * d + (i + 1) % d) = b(i);
    }
    return Rank2Components{uniform_open01(rng), std::move(psi1), std::move(psi2)};
}

DensityOperator random_rank2_state(int d, Rng& rng, bool complex_amplitudes) {
    const auto c = random_rank2_components(d, rng, complex_amplitudes);
    Matrix rho = c.p1 * (c.psi1 * c.psi1.adjoint()) + (1.0 - c.p1) * (c.psi2 * c.psi2.adjoint());
    return DensityOperator({d, d}, std::move(rho));
}

SchmidtForm canonicalize_mes(const PureState& psi) {
    if (psi.dims.size() != 2)
        throw std::invalid_argument("canonicalize_mes: state must be bipartite");
    const int da = psi.dims[0];
    const int db = psi.dims[1];

    // coefficient matrix C with psi = sum_{ab} C(a,b) |a,b>
    Matrix c(da, db);
    for (int a = 0; a < da; ++a)
        for (int b = 0; b < db; ++b) c(a, b) = psi.amps(static_cast<Eigen::Index>(a) * db + b);

    Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Matrix local_a = svd.matrixU().adjoint();
    const Matrix local_b = svd.matrixV().transpose();

    Vector canonical = Vector::Zero(static_cast<Eigen::Index>(da) * db);
    std::vector<double> coeffs(svd.singularValues().data(),
                               svd.singularValues().data() + svd.singularValues().size());
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        canonical(static_cast<Eigen::Index>(i) * db + static_cast<Eigen::Index>(i)) = coeffs[i];

    return SchmidtForm{local_a, local_b, PureState({da, db}, std::move(canonical)), std::move(coeffs)};
}

} // namespace sdc
