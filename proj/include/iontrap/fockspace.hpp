#ifndef IONTRAP_FOCKSPACE_HPP
#define IONTRAP_FOCKSPACE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string_view>

#include "iontrap/errors.hpp"

// Truncated bosonic + two-level Hilbert space: ladder operators,
// displacement operators, coherent states and electronic tensor products.
//
// Basis ordering is fixed project-wide: the ground-state block
// |g,0>,...,|g,n_max-1> comes first, then the excited block
// |e,0>,...,|e,n_max-1>.  sigma_z |g> = -|g>, sigma_z |e> = +|e>.
//
// All values are immutable after construction and safe to share across
// threads without synchronization.

namespace iontrap {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Basis convention string, exported for serializers.
inline constexpr std::string_view kBasisOrdering =
    "g:0..n_max-1,e:0..n_max-1";

/// Dimensions of the two-level (x) truncated-Fock product space.
struct SpaceDims {
    int n_max;  // Fock levels 0..n_max-1

    explicit SpaceDims(int levels) : n_max(levels) {
        if (levels < 2) throw Error("SpaceDims: n_max must be >= 2");
    }
    int total() const { return 2 * n_max; }
};

/// Index of |g,n> or |e,n> in the fixed basis ordering.
inline int basis_index(bool excited, int n, const SpaceDims& dims) {
    return (excited ? dims.n_max : 0) + n;
}

enum class ElectronicOp { identity, sigma_plus, sigma_minus, sigma_z };

/// Dense complex operator on either the Fock-only space or the full
/// two-level (x) Fock space.  The hermitian/unitary members are hints set
/// by builders; tests verify them against the stored entries.
struct OperatorMatrix {
    Matrix m;
    int n_fock = 0;
    bool full_space = false;
    bool hermitian = false;
    bool unitary = false;

    int dim() const { return full_space ? 2 * n_fock : n_fock; }

    static OperatorMatrix fock(int n_max, Matrix entries,
                               bool herm = false, bool unit = false) {
        check_square(entries, n_max);
        return OperatorMatrix{std::move(entries), n_max, false, herm, unit};
    }

    static OperatorMatrix full(const SpaceDims& dims, Matrix entries,
                               bool herm = false, bool unit = false) {
        check_square(entries, dims.total());
        return OperatorMatrix{std::move(entries), dims.n_max, true, herm, unit};
    }

  private:
    static void check_square(const Matrix& entries, int d) {
        if (entries.rows() != d || entries.cols() != d)
            throw DimensionMismatch("OperatorMatrix: entries do not match dims");
    }
};

/// Normalized state on the Fock-only or full space.
struct StateVector {
    Vector v;
    int n_fock = 0;
    bool full_space = false;
    // Probability removed by truncation before renormalization
    // (nonzero only for coherent states).
    double truncation_deficit = 0.0;

    int dim() const { return full_space ? 2 * n_fock : n_fock; }

    static StateVector make(Vector entries, int n_fock, bool full,
                            double deficit = 0.0) {
        const int d = full ? 2 * n_fock : n_fock;
        if (entries.size() != d)
            throw DimensionMismatch("StateVector: entries do not match dims");
        if (std::abs(entries.norm() - 1.0) > 1e-10)
            throw Error("StateVector: not normalized at construction");
        return StateVector{std::move(entries), n_fock, full, deficit};
    }
};

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

/// Annihilation operator: <m|a|n> = sqrt(n) delta_{m,n-1}.
inline OperatorMatrix build_annihilation(const SpaceDims& dims) {
    Matrix a = Matrix::Zero(dims.n_max, dims.n_max);
    for (int n = 1; n < dims.n_max; ++n) a(n - 1, n) = std::sqrt(double(n));
    return OperatorMatrix::fock(dims.n_max, std::move(a));
}

inline OperatorMatrix build_creation(const SpaceDims& dims) {
    OperatorMatrix a = build_annihilation(dims);
    return OperatorMatrix::fock(dims.n_max, a.m.adjoint());
}

/// Number operator, diagonal in the Fock basis.
inline OperatorMatrix build_number(const SpaceDims& dims) {
    Matrix n = Matrix::Zero(dims.n_max, dims.n_max);
    for (int k = 0; k < dims.n_max; ++k) n(k, k) = double(k);
    return OperatorMatrix::fock(dims.n_max, std::move(n), /*herm=*/true);
}

/// exp(i*scale*K) for Hermitian K, by eigendecomposition.  Exact (to
/// roundoff) on the truncated space, hence exactly unitary there.
inline Matrix exp_i_hermitian(const Matrix& k, double scale = 1.0) {
    const double scale_ref = max_abs(k);
    if (scale_ref > 0.0 && max_abs(Matrix(k - k.adjoint())) > 1e-12 * scale_ref)
        throw Error("exp_i_hermitian: generator is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(k);
    if (es.info() != Eigen::Success)
        throw Error("exp_i_hermitian: eigendecomposition failed");
    Vector phases(k.rows());
    for (int j = 0; j < k.rows(); ++j)
        phases(j) = std::exp(cplx(0.0, scale * es.eigenvalues()(j)));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Displacement operator exp(beta a^dag - beta^* a), computed by exact
/// exponentiation of the truncated generator.  The generator is i*K with
/// K = -i(beta a^dag - beta^* a) Hermitian, so the result is exactly
/// unitary on the truncated space; deviations from the untruncated matrix
/// elements are confined to the boundary levels.
inline OperatorMatrix build_displacement(cplx beta, int n_max) {
    SpaceDims dims(n_max);
    const Matrix adag = build_creation(dims).m;
    const Matrix g = beta * adag - std::conj(beta) * adag.adjoint();
    Matrix k = cplx(0.0, -1.0) * g;  // Hermitian
    Matrix d = exp_i_hermitian(k, 1.0);
    return OperatorMatrix::fock(n_max, std::move(d), false, /*unit=*/true);
}

namespace detail {

/// log(n!) via lgamma; exact enough for amplitude ratios up to n ~ 1e4.
inline double log_factorial(int n) { return std::lgamma(double(n) + 1.0); }

/// Coherent amplitude <n|alpha> = exp(-|alpha|^2/2) alpha^n / sqrt(n!),
/// evaluated in log-space to avoid overflow for large n.
inline cplx coherent_amp(cplx alpha, int n) {
    const double r = std::abs(alpha);
    if (r == 0.0) return n == 0 ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
    const double logmag =
        -0.5 * r * r + n * std::log(r) - 0.5 * log_factorial(n);
    const double phase = n * std::arg(alpha);
    return std::exp(logmag) * cplx(std::cos(phase), std::sin(phase));
}

}  // namespace detail

/// Truncation rule: levels needed to hold a coherent state of amplitude
/// |alpha| with the Poisson tail and transient spreading safely below the
/// working tolerances.
inline int required_levels(double abs_alpha) {
    return int(std::ceil(abs_alpha * abs_alpha + 6.0 * abs_alpha + 10.0));
}

/// Coherent state |alpha> truncated to n_max levels and renormalized.
/// The removed probability is recorded in truncation_deficit (and in
/// *deficit if given).  Throws TruncationTooSmall unless
/// |alpha|^2 + 6|alpha| + 10 <= n_max.
inline StateVector coherent_state(cplx alpha, int n_max,
                                  double* deficit = nullptr) {
    SpaceDims dims(n_max);
    if (required_levels(std::abs(alpha)) > n_max)
        throw TruncationTooSmall("coherent_state: need n_max >= " +
                                 std::to_string(required_levels(std::abs(alpha))));
    Vector v(n_max);
    for (int n = 0; n < n_max; ++n) v(n) = detail::coherent_amp(alpha, n);
    const double norm = v.norm();
    const double def = 1.0 - norm * norm;
    if (deficit) *deficit = def;
    v /= norm;
    return StateVector::make(std::move(v), n_max, false, def);
}

/// Electronic (x) vibrational product operator in the fixed basis
/// ordering.  The electronic factor selects which 2x2 block pattern the
/// vibrational operator occupies.
inline OperatorMatrix tensor_electronic(const OperatorMatrix& vib_op,
                                        ElectronicOp electronic_part) {
    if (vib_op.full_space)
        throw DimensionMismatch("tensor_electronic: vibrational operator expected");
    const int n = vib_op.n_fock;
    SpaceDims dims(n);
    Matrix out = Matrix::Zero(2 * n, 2 * n);
    switch (electronic_part) {
        case ElectronicOp::identity:
            out.topLeftCorner(n, n) = vib_op.m;
            out.bottomRightCorner(n, n) = vib_op.m;
            break;
        case ElectronicOp::sigma_z:
            out.topLeftCorner(n, n) = -vib_op.m;
            out.bottomRightCorner(n, n) = vib_op.m;
            break;
        case ElectronicOp::sigma_plus:   // |e><g|
            out.bottomLeftCorner(n, n) = vib_op.m;
            break;
        case ElectronicOp::sigma_minus:  // |g><e|
            out.topRightCorner(n, n) = vib_op.m;
            break;
    }
    return OperatorMatrix::full(dims, std::move(out));
}

/// Embed a vibrational state in the chosen electronic level.
inline StateVector embed_electronic(const StateVector& vib, bool excited) {
    if (vib.full_space)
        throw DimensionMismatch("embed_electronic: vibrational state expected");
    const int n = vib.n_fock;
    Vector v = Vector::Zero(2 * n);
    v.segment(excited ? n : 0, n) = vib.v;
    return StateVector::make(std::move(v), n, true, vib.truncation_deficit);
}

inline cplx expectation(const OperatorMatrix& op, const StateVector& psi) {
    if (op.dim() != psi.dim() || op.full_space != psi.full_space)
        throw DimensionMismatch("expectation: operator/state dims differ");
    return psi.v.dot(op.m * psi.v);  // dot() conjugates the left argument
}

/// <n_hat> of a state; sums both electronic blocks on the full space.
inline double mean_fock_number(const StateVector& psi) {
    double s = 0.0;
    const int n = psi.n_fock;
    for (int k = 0; k < n; ++k) {
        s += k * std::norm(psi.v(k));
        if (psi.full_space) s += k * std::norm(psi.v(n + k));
    }
    return s;
}

/// Margin of boundary levels excluded from single-displacement checks.
inline int displacement_margin(double abs_beta) {
    return int(std::ceil(4.0 * abs_beta + 4.0));
}

/// Margin for checks on products of displacement-built operators.  The
/// truncation defect of such a product is confined to a boundary layer
/// whose depth scales with the total displacement magnitude carried by
/// the chain; the measured 1e-10 knee at n_max up to 128 sits within
/// 8*total + 8 levels for totals up to 4.
inline int product_chain_margin(double total_displacement) {
    return int(std::ceil(8.0 * total_displacement + 8.0));
}

/// Margin for propagation-type checks (states stay clear of the boundary).
inline constexpr int kPropagationMargin = 6;

/// Largest |entry| over rows and columns whose Fock index is below
/// `levels` (both electronic blocks for full-space operators).
inline double max_abs_interior(const Matrix& m, int n_fock, bool full,
                               int levels) {
    if (levels <= 0) throw Error("max_abs_interior: empty interior");
    if (levels > n_fock) levels = n_fock;
    double best = 0.0;
    const int blocks = full ? 2 : 1;
    for (int br = 0; br < blocks; ++br)
        for (int bc = 0; bc < blocks; ++bc) {
            const auto blk =
                m.block(br * n_fock, bc * n_fock, levels, levels);
            best = std::max(best, blk.cwiseAbs().maxCoeff());
        }
    return best;
}

inline double max_abs_interior(const OperatorMatrix& op, int levels) {
    return max_abs_interior(op.m, op.n_fock, op.full_space, levels);
}

/// max |(A - I)_ij| on the interior, for unitarity checks.
inline double identity_defect_interior(const Matrix& a, int n_fock, bool full,
                                       int levels) {
    Matrix d = a;
    d.diagonal().array() -= 1.0;
    return max_abs_interior(d, n_fock, full, levels);
}

}  // namespace iontrap

#endif
