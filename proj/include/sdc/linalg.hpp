#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace sdc {

using Complex = std::complex<double>;
using Matrix  = Eigen::MatrixXcd;
using Vector  = Eigen::VectorXcd;

// Composite-index convention used everywhere in this library:
// the basis ket |a>|b> of a bipartite system with dimensions (dA, dB)
// maps to the flat index a*dB + b (first tensor factor is the slow index).

inline constexpr double kHermitianTol = 1e-9;  // max |M - M^dag| entrywise
inline constexpr double kTraceTol     = 1e-9;
inline constexpr double kPsdTol       = 1e-9;  // smallest eigenvalue >= -kPsdTol
inline constexpr double kProbNegTol   = 1e-12; // weights in [-1e-12, 0) clip to 0
inline constexpr double kProbSumTol   = 1e-9;

// Normalized probability distribution. Weights within [-1e-12, 0) are
// clipped to zero at construction; anything more negative is rejected,
// as is a total differing from one by more than 1e-9.
class ProbabilityVector {
public:
    explicit ProbabilityVector(std::vector<double> weights);

    const std::vector<double>& weights() const { return w_; }
    std::size_t size() const { return w_.size(); }
    double operator[](std::size_t i) const { return w_[i]; }

private:
    std::vector<double> w_;
};

// Density operator over a composite system with explicit subsystem
// dimensions. Construction validates finiteness, Hermiticity, unit trace
// and positive semidefiniteness within the module tolerances; every state
// produced anywhere in the library passes through this check.
struct DensityOperator {
    std::vector<int> dims;
    Matrix mat;

    DensityOperator(std::vector<int> dims_, Matrix mat_);

    int total_dim() const { return static_cast<int>(mat.rows()); }

    // Eigenvalues clipped to [0,1], as a valid probability vector.
    ProbabilityVector spectrum() const;
};

// Kronecker product; the first factor carries the slow index.
Matrix tensor_product(const Matrix& a, const Matrix& b);

// Reduced operator over the kept subsystems (indices must be strictly
// increasing and in range). Trace is preserved.
DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& keep);

// Real eigenvalues of a Hermitian matrix, descending. Rejects inputs whose
// anti-Hermitian part exceeds kHermitianTol entrywise.
std::vector<double> eigenvalues_hermitian(const Matrix& m);

// S(rho) = -Tr(rho log2 rho) in bits, with 0 log 0 := 0. Eigenvalues in
// [-1e-9, 0) are treated as exact zeros; more negative values would have
// been rejected at construction.
double von_neumann_entropy(const DensityOperator& rho);

// H(p) = -sum p_i log2 p_i in bits.
double shannon_entropy(const ProbabilityVector& p);

namespace detail {

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

double hermiticity_residual(const Matrix& m);

// -sum v_i log2 v_i over the positive entries of v.
double entropy_bits(const double* v, std::size_t n);

} // namespace detail

} // namespace sdc
