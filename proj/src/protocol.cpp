#include "sdc/protocol.hpp"

#include <cmath>

namespace sdc {

namespace {

void check_two_qudit(const DensityOperator& rho, int d, const char* who) {
    if (rho.dims.size() != 2 || rho.dims[0] != d || rho.dims[1] != d)
        throw std::invalid_argument(std::string(who) + ": state is not a d x d two-qudit state");
}

// columns: Bell vectors indexed by x*d+y
Matrix bell_basis_matrix(int d) {
    Matrix b(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d);
    for (int x = 0; x < d; ++x)
        for (int y = 0; y < d; ++y)
            b.col(static_cast<Eigen::Index>(x) * d + y) = bell_state(d, {x, y}).amps;
    return b;
}

} // namespace

ProtocolConfig::ProtocolConfig(int d_, KrausChannel pre_, KrausChannel post_)
    : d(d_), pre(std::move(pre_)), post(std::move(post_)) {
    if (pre.d != d || post.d != d)
        throw std::invalid_argument("ProtocolConfig: channel dimension mismatch");
}

ProtocolConfig ProtocolConfig::noiseless(int d) {
    return ProtocolConfig(d, identity_channel(d), identity_channel(d));
}

JointOutcomeDistribution::JointOutcomeDistribution(int d, Eigen::MatrixXd table)
    : d_(d), table_(std::move(table)) {
    if (d_ < 2) throw std::invalid_argument("JointOutcomeDistribution: dimension must be >= 2");
    const Eigen::Index n = static_cast<Eigen::Index>(d_) * d_;
    if (table_.rows() != n || table_.cols() != n)
        throw std::invalid_argument("JointOutcomeDistribution: table must be d^2 x d^2");
    double sum = 0.0;
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
            double& v = table_(r, c);
            if (!std::isfinite(v))
                throw std::invalid_argument("JointOutcomeDistribution: non-finite entry");
            if (v < -kProbNegTol)
                throw std::invalid_argument("JointOutcomeDistribution: entry below -1e-12");
            if (v < 0.0) v = 0.0;
            sum += v;
        }
    if (std::abs(sum - 1.0) > kProbSumTol)
        throw std::invalid_argument("JointOutcomeDistribution: table does not sum to 1");
}

EncodedBranch encode_branch(const DensityOperator& rho_ab, BellLabel label) {
    const int d = rho_ab.dims[0];
    check_two_qudit(rho_ab, d, "encode_branch");
    const Matrix u = weyl_unitary(d, label.x, label.y);
    Matrix out(rho_ab.mat.rows(), rho_ab.mat.cols());
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            out.block(static_cast<Eigen::Index>(a) * d, static_cast<Eigen::Index>(b) * d, d, d)
                .noalias() = u * rho_ab.mat.block(static_cast<Eigen::Index>(a) * d,
                                                  static_cast<Eigen::Index>(b) * d, d, d) *
                             u.adjoint();
    return EncodedBranch{1.0 / (static_cast<double>(d) * d),
                         DensityOperator(rho_ab.dims, std::move(out))};
}

JointOutcomeDistribution key_run_distribution(const ProtocolConfig& cfg,
                                              const DensityOperator& rho_in) {
    const int d = cfg.d;
    check_two_qudit(rho_in, d, "key_run_distribution");
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;

    Matrix shared = cfg.pre.is_identity()
                        ? rho_in.mat
                        : detail::apply_kraus_second(rho_in.mat, cfg.pre.ops, d, d);
    const Matrix bells = bell_basis_matrix(d);
    const double inv_d2 = 1.0 / static_cast<double>(n);

    Eigen::MatrixXd q(n, n);
    for (int x = 0; x < d; ++x)
        for (int y = 0; y < d; ++y) {
            const Matrix u = weyl_unitary(d, x, y);
            Matrix branch(n, n);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    branch.block(static_cast<Eigen::Index>(a) * d,
                                 static_cast<Eigen::Index>(b) * d, d, d)
                        .noalias() = u * shared.block(static_cast<Eigen::Index>(a) * d,
                                                      static_cast<Eigen::Index>(b) * d, d, d) *
                                     u.adjoint();
            if (!cfg.post.is_identity())
                branch = detail::apply_kraus_second(branch, cfg.post.ops, d, d);
            const Matrix mb = branch * bells;
            for (Eigen::Index a = 0; a < n; ++a)
                q(a, static_cast<Eigen::Index>(x) * d + y) =
                    inv_d2 * bells.col(a).dot(mb.col(a)).real();
        }
    return JointOutcomeDistribution(d, std::move(q));
}

JointOutcomeDistribution test_run_distribution(const ProtocolConfig& cfg,
                                               const DensityOperator& rho_in) {
    const int d = cfg.d;
    check_two_qudit(rho_in, d, "test_run_distribution");
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;

    Matrix shared = cfg.pre.is_identity()
                        ? rho_in.mat
                        : detail::apply_kraus_second(rho_in.mat, cfg.pre.ops, d, d);

    // Alice's computational statistics against Bob's outcome r:
    // comp(i, r) = <i,r| shared |i,r>.
    Eigen::MatrixXd comp(d, d);
    for (int i = 0; i < d; ++i)
        for (int r = 0; r < d; ++r)
            comp(i, r) = shared(static_cast<Eigen::Index>(i) * d + r,
                                static_cast<Eigen::Index>(i) * d + r)
                             .real();

    // Fourier statistics of the returned test state through the post
    // channel: fres(j, s) = <j_F| post(|s_F><s_F|) |j_F>.
    Eigen::MatrixXd fres(d, d);
    std::vector<Vector> fourier(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) fourier[static_cast<std::size_t>(k)] = fourier_vector(d, k);
    for (int s = 0; s < d; ++s) {
        Matrix sigma = fourier[static_cast<std::size_t>(s)] *
                       fourier[static_cast<std::size_t>(s)].adjoint();
        if (!cfg.post.is_identity()) sigma = detail::apply_kraus_single(sigma, cfg.post.ops);
        for (int j = 0; j < d; ++j)
            fres(j, s) =
                fourier[static_cast<std::size_t>(j)].dot(sigma * fourier[static_cast<std::size_t>(j)]).real();
    }

    // zero-probability branches contribute zero rows by construction
    const double inv_d = 1.0 / d;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int r = 0; r < d; ++r)
        for (int s = 0; s < d; ++s)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    h(static_cast<Eigen::Index>(i) * d + j,
                      static_cast<Eigen::Index>(r) * d + s) = inv_d * comp(i, r) * fres(j, s);
    return JointOutcomeDistribution(d, std::move(h));
}

double conditional_entropy_b_given_a(const JointOutcomeDistribution& q) {
    const auto& t = q.table();
    const double joint = detail::entropy_bits(t.data(), static_cast<std::size_t>(t.size()));
    const Eigen::VectorXd marg = q.alice_marginal();
    const double alice = detail::entropy_bits(marg.data(), static_cast<std::size_t>(marg.size()));
    return joint - alice;
}

double overlap_constant(int d) {
    if (d < 2) throw std::invalid_argument("overlap_constant: dimension must be >= 2");
    double maxsq = 0.0;
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            const Vector t = test_basis_vector(d, j, k).amps;
            for (int x = 0; x < d; ++x)
                for (int y = 0; y < d; ++y) {
                    const double sq = std::norm(t.dot(bell_state(d, {x, y}).amps));
                    if (sq > maxsq) maxsq = sq;
                }
        }
    const double analytic = 1.0 / (static_cast<double>(d) * d);
    if (std::abs(maxsq - analytic) > 1e-12)
        throw std::runtime_error("overlap_constant: numeric maximum deviates from 1/d^2");
    return analytic;
}

JointOutcomeDistribution bell_mixture_key_distribution(const MixtureSpec& spec) {
    const int d = spec.d;
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    const double inv_d2 = 1.0 / static_cast<double>(n);
    for (int r = 0; r < d; ++r)
        for (int s = 0; s < d; ++s)
            for (std::size_t m = 0; m < spec.labels.size(); ++m) {
                const int i = (spec.labels[m].x + r) % d;
                const int j = (spec.labels[m].y + s) % d;
                q(static_cast<Eigen::Index>(i) * d + j, static_cast<Eigen::Index>(r) * d + s) +=
                    spec.probs[m] * inv_d2;
            }
    return JointOutcomeDistribution(d, std::move(q));
}

JointOutcomeDistribution bell_mixture_test_distribution(const MixtureSpec& spec) {
    const int d = spec.d;
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    const double inv_d2 = 1.0 / static_cast<double>(n);
    for (int r = 0; r < d; ++r)
        for (int s = 0; s < d; ++s)
            for (std::size_t m = 0; m < spec.labels.size(); ++m) {
                const int i = (spec.labels[m].x + r) % d;
                h(static_cast<Eigen::Index>(i) * d + s, static_cast<Eigen::Index>(r) * d + s) +=
                    spec.probs[m] * inv_d2;
            }
    return JointOutcomeDistribution(d, std::move(h));
}

} // namespace sdc
