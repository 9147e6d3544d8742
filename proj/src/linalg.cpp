#include "sdc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sdc {

namespace detail {

double hermiticity_residual(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double entropy_bits(const double* v, std::size_t n) {
    double h = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] > 0.0) h -= v[i] * std::log2(v[i]);
    }
    return h < 0.0 ? 0.0 : h;
}

} // namespace detail

ProbabilityVector::ProbabilityVector(std::vector<double> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw std::invalid_argument("ProbabilityVector: empty weight list");
    double sum = 0.0;
    for (double& w : w_) {
        if (!std::isfinite(w)) throw std::invalid_argument("ProbabilityVector: non-finite weight");
        if (w < -kProbNegTol)
            throw std::invalid_argument("ProbabilityVector: weight below -1e-12");
        if (w < 0.0) w = 0.0;
        sum += w;
    }
    if (std::abs(sum - 1.0) > kProbSumTol)
        throw std::invalid_argument("ProbabilityVector: weights do not sum to 1");
}

DensityOperator::DensityOperator(std::vector<int> dims_, Matrix mat_)
    : dims(std::move(dims_)), mat(std::move(mat_)) {
    if (dims.empty()) throw std::invalid_argument("DensityOperator: empty dimension list");
    long long total = 1;
    for (int d : dims) {
        if (d < 2) throw std::invalid_argument("DensityOperator: subsystem dimension < 2");
        total *= d;
    }
    if (mat.rows() != total || mat.cols() != total)
        throw std::invalid_argument("DensityOperator: matrix size does not match dimensions");
    if (!detail::all_finite(mat))
        throw std::invalid_argument("DensityOperator: non-finite entries");
    if (detail::hermiticity_residual(mat) > kHermitianTol)
        throw std::invalid_argument("DensityOperator: not Hermitian within tolerance");
    if (std::abs(mat.trace().real() - 1.0) > kTraceTol || std::abs(mat.trace().imag()) > kTraceTol)
        throw std::invalid_argument("DensityOperator: trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(mat, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdTol)
        throw std::invalid_argument("DensityOperator: negative eigenvalue beyond tolerance");
}

ProbabilityVector DensityOperator::spectrum() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(mat, Eigen::EigenvaluesOnly);
    std::vector<double> lam(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(lam.begin(), lam.end(), std::greater<>());
    for (double& l : lam) l = std::clamp(l, 0.0, 1.0);
    // renormalize the clipping residue so the vector stays valid
    double s = std::accumulate(lam.begin(), lam.end(), 0.0);
    for (double& l : lam) l /= s;
    return ProbabilityVector(lam);
}

Matrix tensor_product(const Matrix& a, const Matrix& b) {
    if (!detail::all_finite(a) || !detail::all_finite(b))
        throw std::invalid_argument("tensor_product: non-finite input");
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& keep) {
    const auto& dims = rho.dims;
    const int n = static_cast<int>(dims.size());
    if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 0 || keep[i] >= n)
            throw std::invalid_argument("partial_trace: subsystem index out of range");
        if (i > 0 && keep[i] <= keep[i - 1])
            throw std::invalid_argument("partial_trace: keep indices must be strictly increasing");
    }

    std::vector<int> traced;
    for (int i = 0; i < n; ++i)
        if (std::find(keep.begin(), keep.end(), i) == keep.end()) traced.push_back(i);

    std::vector<long long> stride(n, 1);
    for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

    auto flat_offsets = [&](const std::vector<int>& subs) {
        long long dim = 1;
        for (int s : subs) dim *= dims[s];
        std::vector<long long> offs(static_cast<std::size_t>(dim), 0);
        for (long long idx = 0; idx < dim; ++idx) {
            long long rem = idx, off = 0;
            for (auto it = subs.rbegin(); it != subs.rend(); ++it) {
                off += (rem % dims[*it]) * stride[*it];
                rem /= dims[*it];
            }
            offs[static_cast<std::size_t>(idx)] = off;
        }
        return offs;
    };

    const auto koffs = flat_offsets(keep);
    const auto toffs = traced.empty() ? std::vector<long long>{0} : flat_offsets(traced);

    const auto dk = static_cast<Eigen::Index>(koffs.size());
    Matrix out = Matrix::Zero(dk, dk);
    for (Eigen::Index r = 0; r < dk; ++r)
        for (Eigen::Index c = 0; c < dk; ++c) {
            Complex acc = 0.0;
            for (long long t : toffs) acc += rho.mat(koffs[r] + t, koffs[c] + t);
            out(r, c) = acc;
        }

    std::vector<int> kept_dims;
    for (int s : keep) kept_dims.push_back(dims[s]);
    return DensityOperator(std::move(kept_dims), std::move(out));
}

std::vector<double> eigenvalues_hermitian(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eigenvalues_hermitian: non-square input");
    if (!detail::all_finite(m)) throw std::invalid_argument("eigenvalues_hermitian: non-finite input");
    if (detail::hermiticity_residual(m) > kHermitianTol)
        throw std::invalid_argument("eigenvalues_hermitian: input not Hermitian within tolerance");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    std::vector<double> lam(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(lam.begin(), lam.end(), std::greater<>());
    return lam;
}

double von_neumann_entropy(const DensityOperator& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.mat, Eigen::EigenvaluesOnly);
    double h = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        double lam = es.eigenvalues()(i);
        if (lam < -kPsdTol)
            throw std::invalid_argument("von_neumann_entropy: eigenvalue below -1e-9");
        if (lam > 0.0) {
            if (lam > 1.0) lam = 1.0;
            h -= lam * std::log2(lam);
        }
    }
    return h < 0.0 ? 0.0 : h;
}

double shannon_entropy(const ProbabilityVector& p) {
    return detail::entropy_bits(p.weights().data(), p.size());
}

} // namespace sdc
