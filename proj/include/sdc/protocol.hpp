#pragma once

#include <Eigen/Dense>

#include "sdc/channels.hpp"
#include "sdc/linalg.hpp"
#include "sdc/states.hpp"

namespace sdc {

// Channels around the encoding step: `pre` carries the state from Alice to
// Bob before encoding, `post` carries the encoded qudit back.
struct ProtocolConfig {
    int d;
    KrausChannel pre;
    KrausChannel post;

    ProtocolConfig(int d_, KrausChannel pre_, KrausChannel post_);

    static ProtocolConfig noiseless(int d);
};

// Joint distribution over Alice outcomes (rows, (i,j) -> i*d+j) and Bob
// outcomes (columns, (x,y) -> x*d+y, or (r,s) for test runs). Entries in
// [-1e-12, 0) are clipped to zero; the table must sum to one within 1e-9.
class JointOutcomeDistribution {
public:
    JointOutcomeDistribution(int d, Eigen::MatrixXd table);

    int d() const { return d_; }
    const Eigen::MatrixXd& table() const { return table_; }
    Eigen::VectorXd alice_marginal() const { return table_.rowwise().sum(); }
    Eigen::VectorXd bob_marginal() const { return table_.colwise().sum().transpose(); }

private:
    int d_;
    Eigen::MatrixXd table_;
};

struct EncodedBranch {
    double probability; // exactly 1/d^2 for every input state
    DensityOperator state;
};

// Purified encoding branch for message (x,y): the branch occurs with
// probability 1/d^2 and its state is (I (x) U^{xy}) rho (I (x) U^{xy})^dag.
EncodedBranch encode_branch(const DensityOperator& rho_ab, BellLabel label);

// Key-generation run. Pipeline: pre-channel on the transmitted qudit, one
// encoding branch per (x,y), post-channel on the encoded qudit, Bell-basis
// decoding by Alice: q(ij,xy) = (1/d^2) <B(ij)| rho''^{xy} |B(ij)>.
JointOutcomeDistribution key_run_distribution(const ProtocolConfig& cfg,
                                              const DensityOperator& rho_in);

// Test run. Bob's branch label (r,s) is his computational outcome r
// together with the Fourier state |s_F> placed on the return channel (the
// ancilla half is projected onto the conjugate Fourier vector, which
// leaves |s_F> on the transmitted side); Alice projects onto |i, j_T>.
JointOutcomeDistribution test_run_distribution(const ProtocolConfig& cfg,
                                               const DensityOperator& rho_in);

// S(B|A) = H(joint) - H(Alice marginal) in bits.
double conditional_entropy_b_given_a(const JointOutcomeDistribution& q);

// Overlap constant of the test/Bell measurement pair: computes
// max_{jk,xy} |<j k_T | B(xy)>|^2 numerically, checks it equals 1/d^2
// within 1e-12 and returns 1/d^2.
double overlap_constant(int d);

// Closed-form outcome tables for noiseless Bell mixtures; the analytic
// counterpart of the two pipelines above and the primary correctness
// oracle for them:
//   key:  q(ij,rs) = (1/d^2) sum p(a,b) [i = a(+)r][j = b(+)s]
//   test: h(ij,rs) = (1/d^2) sum p(a,b) [i = a(+)r][j = s]
JointOutcomeDistribution bell_mixture_key_distribution(const MixtureSpec& spec);
JointOutcomeDistribution bell_mixture_test_distribution(const MixtureSpec& spec);

} // namespace sdc
