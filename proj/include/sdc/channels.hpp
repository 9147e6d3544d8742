#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdc/linalg.hpp"

namespace sdc {

enum class ChannelFamily { identity, depolarising, dit_phase_flip, amplitude_damping };

std::string_view family_name(ChannelFamily f);
std::optional<ChannelFamily> parse_family(std::string_view name); // none|depolarising|dit-phase-flip|amplitude-damping

// Quantum channel in Kraus form. Construction validates the completeness
// relation sum K^dag K = I within 1e-9; operators with identically zero
// coefficients are dropped by the family constructors.
struct KrausChannel {
    int d;
    ChannelFamily family;
    double p;
    std::vector<Matrix> ops;

    KrausChannel(int d_, ChannelFamily family_, double p_, std::vector<Matrix> ops_);

    bool is_identity() const { return family == ChannelFamily::identity; }
};

KrausChannel identity_channel(int d);

// Weyl-covariant depolarising channel:
//   K^{00} = sqrt(1 - (d^2-1) p / d^2) I,  K^{ij} = (sqrt(p)/d) U^{ij},
// equivalently rho -> (1-p) rho + p I/d.
KrausChannel depolarising(int d, double p);

// Dit-phase-flip channel:
//   K^{00} = sqrt(1-p) I,  K^{ij} = (sqrt(p)/(d-1)) U^{ij}, 1 <= i,j <= d-1.
KrausChannel dit_phase_flip(int d, double p);

// Amplitude damping towards |0>:
//   K^0 = |0><0| + sqrt(1-p) sum_{i>=1} |i><i|,  K^i = sqrt(p) |0><i|.
// Non-unital for p > 0.
KrausChannel amplitude_damping(int d, double p);

KrausChannel make_channel(ChannelFamily f, int d, double p);

// max |sum K^dag K - I| entrywise.
double completeness_residual(const std::vector<Matrix>& ops, int d);

// sum_k (lifted K) rho (lifted K)^dag with K acting on the target
// subsystem (0-based); trace preserving, output validated.
DensityOperator apply_channel(const KrausChannel& ch, const DensityOperator& rho, int target);

namespace detail {

// Raw channel action on the second slot of a (dA x dB) bipartite matrix,
// done blockwise. Hot path for the protocol pipelines; no validation.
Matrix apply_kraus_second(const Matrix& rho, const std::vector<Matrix>& ops, int da, int db);

// Channel action on a single-qudit matrix.
Matrix apply_kraus_single(const Matrix& rho, const std::vector<Matrix>& ops);

} // namespace detail

} // namespace sdc
