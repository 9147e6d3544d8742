#include "sdc/channels.hpp"

#include <cmath>

#include "sdc/states.hpp"

namespace sdc {

namespace {

void check_p(double p, const char* who) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument(std::string(who) + ": noise strength outside [0,1]");
}

} // namespace

std::string_view family_name(ChannelFamily f) {
    switch (f) {
        case ChannelFamily::identity: return "none";
        case ChannelFamily::depolarising: return "depolarising";
        case ChannelFamily::dit_phase_flip: return "dit-phase-flip";
        case ChannelFamily::amplitude_damping: return "amplitude-damping";
    }
    return "?";
}

std::optional<ChannelFamily> parse_family(std::string_view name) {
    if (name == "none" || name == "identity") return ChannelFamily::identity;
    if (name == "depolarising" || name == "depolarizing") return ChannelFamily::depolarising;
    if (name == "dit-phase-flip") return ChannelFamily::dit_phase_flip;
    if (name == "amplitude-damping") return ChannelFamily::amplitude_damping;
    return std::nullopt;
}

KrausChannel::KrausChannel(int d_, ChannelFamily family_, double p_, std::vector<Matrix> ops_)
    : d(d_), family(family_), p(p_), ops(std::move(ops_)) {
    if (d < 2) throw std::invalid_argument("KrausChannel: dimension must be >= 2");
    if (ops.empty()) throw std::invalid_argument("KrausChannel: no Kraus operators");
    for (const auto& k : ops)
        if (k.rows() != d || k.cols() != d)
            throw std::invalid_argument("KrausChannel: operator size mismatch");
    if (completeness_residual(ops, d) > 1e-9)
        throw std::invalid_argument("KrausChannel: completeness relation violated");
}

double completeness_residual(const std::vector<Matrix>& ops, int d) {
    Matrix acc = Matrix::Zero(d, d);
    for (const auto& k : ops) acc.noalias() += k.adjoint() * k;
    return (acc - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
}

KrausChannel identity_channel(int d) {
    if (d < 2) throw std::invalid_argument("identity_channel: dimension must be >= 2");
    return KrausChannel(d, ChannelFamily::identity, 0.0, {Matrix::Identity(d, d)});
}

KrausChannel depolarising(int d, double p) {
    check_p(p, "depolarising");
    if (d < 2) throw std::invalid_argument("depolarising: dimension must be >= 2");
    std::vector<Matrix> ops;
    const double c0 = 1.0 - (static_cast<double>(d) * d - 1.0) * p / (static_cast<double>(d) * d);
    ops.push_back(std::sqrt(c0) * Matrix::Identity(d, d));
    if (p > 0.0) {
        const double c = std::sqrt(p) / d;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (i != 0 || j != 0) ops.push_back(c * weyl_unitary(d, i, j));
    }
    return KrausChannel(d, ChannelFamily::depolarising, p, std::move(ops));
}

KrausChannel dit_phase_flip(int d, double p) {
    check_p(p, "dit_phase_flip");
    if (d < 2) throw std::invalid_argument("dit_phase_flip: dimension must be >= 2");
    std::vector<Matrix> ops;
    if (p < 1.0) ops.push_back(std::sqrt(1.0 - p) * Matrix::Identity(d, d));
    if (p > 0.0) {
        const double c = std::sqrt(p) / (d - 1);
        for (int i = 1; i < d; ++i)
            for (int j = 1; j < d; ++j) ops.push_back(c * weyl_unitary(d, i, j));
    }
    return KrausChannel(d, ChannelFamily::dit_phase_flip, p, std::move(ops));
}

KrausChannel amplitude_damping(int d, double p) {
    check_p(p, "amplitude_damping");
    if (d < 2) throw std::invalid_argument("amplitude_damping: dimension must be >= 2");
    std::vector<Matrix> ops;
    Matrix k0 = Matrix::Zero(d, d);
    k0(0, 0) = 1.0;
    for (int i = 1; i < d; ++i) k0(i, i) = std::sqrt(1.0 - p);
    ops.push_back(std::move(k0));
    if (p > 0.0) {
        for (int i = 1; i < d; ++i) {
            Matrix k = Matrix::Zero(d, d);
            k(0, i) = std::sqrt(p);
            ops.push_back(std::move(k));
        }
    }
    return KrausChannel(d, ChannelFamily::amplitude_damping, p, std::move(ops));
}

KrausChannel make_channel(ChannelFamily f, int d, double p) {
    switch (f) {
        case ChannelFamily::identity: return identity_channel(d);
        case ChannelFamily::depolarising: return depolarising(d, p);
        case ChannelFamily::dit_phase_flip: return dit_phase_flip(d, p);
        case ChannelFamily::amplitude_damping: return amplitude_damping(d, p);
    }
    throw std::invalid_argument("make_channel: unknown family");
}

namespace detail {

Matrix apply_kraus_single(const Matrix& rho, const std::vector<Matrix>& ops) {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto& k : ops) out.noalias() += k * rho * k.adjoint();
    return out;
}

Matrix apply_kraus_second(const Matrix& rho, const std::vector<Matrix>& ops, int da, int db) {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    Matrix tmp(db, db);
    for (const auto& k : ops) {
        for (int a = 0; a < da; ++a)
            for (int b = 0; b < da; ++b) {
                tmp.noalias() = k * rho.block(a * db, b * db, db, db) * k.adjoint();
                out.block(a * db, b * db, db, db) += tmp;
            }
    }
    return out;
}

} // namespace detail

DensityOperator apply_channel(const KrausChannel& ch, const DensityOperator& rho, int target) {
    const int n = static_cast<int>(rho.dims.size());
    if (target < 0 || target >= n)
        throw std::invalid_argument("apply_channel: target subsystem out of range");
    if (rho.dims[static_cast<std::size_t>(target)] != ch.d)
        throw std::invalid_argument("apply_channel: channel/subsystem dimension mismatch");

    // two-qudit fast paths, generic lifted-operator path otherwise
    if (n == 2 && target == 1) {
        return DensityOperator(rho.dims,
                               detail::apply_kraus_second(rho.mat, ch.ops, rho.dims[0], rho.dims[1]));
    }
    long long left = 1, right = 1;
    for (int i = 0; i < target; ++i) left *= rho.dims[static_cast<std::size_t>(i)];
    for (int i = target + 1; i < n; ++i) right *= rho.dims[static_cast<std::size_t>(i)];

    const Matrix il = Matrix::Identity(left, left);
    const Matrix ir = Matrix::Identity(right, right);
    Matrix out = Matrix::Zero(rho.mat.rows(), rho.mat.cols());
    for (const auto& k : ch.ops) {
        const Matrix lifted = tensor_product(tensor_product(il, k), ir);
        out.noalias() += lifted * rho.mat * lifted.adjoint();
    }
    return DensityOperator(rho.dims, std::move(out));
}

} // namespace sdc
