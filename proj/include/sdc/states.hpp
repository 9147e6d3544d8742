#pragma once

#include <compare>
#include <vector>

#include "sdc/linalg.hpp"
#include "sdc/rng.hpp"

namespace sdc {

// Label of a generalized Bell state / Weyl operator: shift x, phase y,
// both in Z_d.
struct BellLabel {
    int x{};
    int y{};
    friend auto operator<=>(const BellLabel&, const BellLabel&) = default;
};

// Convex mixture of distinct generalized Bell states. Rank equals the
// number of labels (for nonzero probabilities).
struct MixtureSpec {
    int d;
    std::vector<BellLabel> labels;
    ProbabilityVector probs;

    MixtureSpec(int d_, std::vector<BellLabel> labels_, ProbabilityVector probs_);

    int rank() const { return static_cast<int>(labels.size()); }

    // Marginal over the phase index: ptilde[x] = sum_y p(x,y).
    std::vector<double> shift_marginal() const;
};

struct PureState {
    std::vector<int> dims;
    Vector amps;

    PureState(std::vector<int> dims_, Vector amps_);

    int total_dim() const { return static_cast<int>(amps.size()); }
    DensityOperator to_density() const;
};

// Weyl unitary U^{xy} = sum_l exp(2 pi i l y / d) |l><l (+) x|.
Matrix weyl_unitary(int d, int x, int y);

// Generalized Bell family used throughout the library:
//
//   |B(x,y)> = (1/sqrt d) sum_l exp(2 pi i l y / d) |l (+) x> |l>
//
// The cyclic shift sits on the first slot so that the Weyl operator acting
// on the second slot advances both labels: (I (x) U^{xy}) maps B(a,b) to
// B(a(+)x, b(+)y) up to a global phase. This keeps encoding labels, Bell
// decoding outcomes and the closed-form outcome tables aligned without any
// outcome relabeling.
PureState bell_state(int d, BellLabel label);

// |phi+> = (1/sqrt d) sum_p |p,p>; equals bell_state(d, {0,0}).
PureState max_entangled(int d);

// Test-basis vector |j, k_T> = |j> (x) |k_F| with the Fourier vector
// |k_F> = (1/sqrt d) sum_l exp(2 pi i k l / d) |l>. The d^2 vectors form an
// orthonormal basis mutually unbiased with the Bell family.
PureState test_basis_vector(int d, int j, int k);

// Computational Fourier vector |k_F> on a single qudit.
Vector fourier_vector(int d, int k);

DensityOperator bell_mixture(const MixtureSpec& spec);

// Samples `rank` distinct labels uniformly without replacement and mixing
// probabilities as normalized uniforms on (0,1).
MixtureSpec random_bell_mixture(int d, int rank, Rng& rng);

// Rank-2 state p1 |psi1><psi1| + p2 |psi2><psi2| with
// psi1 = sum_i a_i |i,i>, psi2 = sum_i b_i |i, i(+)1>, amplitudes drawn
// from a standard Gaussian (real by default; complex behind the flag),
// each vector normalized, p1 uniform on (0,1), p2 = 1 - p1. The two
// supports are disjoint, so the rank is exactly two.
struct Rank2Components {
    double p1;
    Vector psi1; // length d^2
    Vector psi2;
};

Rank2Components random_rank2_components(int d, Rng& rng, bool complex_amplitudes = false);
DensityOperator random_rank2_state(int d, Rng& rng, bool complex_amplitudes = false);

// Local-unitary canonical form of a bipartite pure state:
// (local_a (x) local_b) psi = sum_i c_i |i,i> with Schmidt coefficients
// real, non-negative, descending. A maximally entangled input maps to
// |phi+> in the computational basis.
struct SchmidtForm {
    Matrix local_a;
    Matrix local_b;
    PureState canonical;
    std::vector<double> coefficients;
};

SchmidtForm canonicalize_mes(const PureState& psi);

} // namespace sdc
