#ifndef IONTRAP_PROPAGATOR_HPP
#define IONTRAP_PROPAGATOR_HPP

#include <cmath>
#include <vector>

#include "iontrap/series.hpp"

// Independent numerical time evolution, used as the project's brute-force
// oracle.  Any time-independent Hermitian Hamiltonian is propagated
// exactly (to roundoff) through its eigendecomposition; no ODE stepping,
// so no time-discretization error enters oracle comparisons.

namespace iontrap {

/// Eigendecomposition of a Hermitian operator, reused across time points.
/// Immutable after construction and shareable between threads.
struct SpectralPropagator {
    Eigen::VectorXd eigenvalues;
    Matrix eigenvectors;
    int n_fock = 0;
    bool full_space = false;

    int dim() const { return full_space ? 2 * n_fock : n_fock; }

    static SpectralPropagator make(const OperatorMatrix& h) {
        if (!h.hermitian)
            throw Error("SpectralPropagator: Hamiltonian must be Hermitian");
        Eigen::SelfAdjointEigenSolver<Matrix> es(h.m);
        if (es.info() != Eigen::Success)
            throw Error("SpectralPropagator: eigendecomposition failed");
        SpectralPropagator prop{es.eigenvalues(), es.eigenvectors(),
                                h.n_fock, h.full_space};
        const double scale =
            std::max(1e-300, prop.eigenvalues.cwiseAbs().maxCoeff());
        const double residual = max_abs(Matrix(
            h.m * prop.eigenvectors -
            prop.eigenvectors *
                prop.eigenvalues.cast<cplx>().asDiagonal().toDenseMatrix()));
        if (residual > 1e-9 * scale)
            throw Error("SpectralPropagator: eigendecomposition residual too large");
        const double ortho = identity_defect_interior(
            Matrix(prop.eigenvectors.adjoint() * prop.eigenvectors),
            prop.dim(), false, prop.dim());
        if (ortho > 1e-10)
            throw Error("SpectralPropagator: eigenvectors not orthonormal");
        return prop;
    }
};

/// psi(t) = V e^{-i lambda t} V^dag psi0.
inline StateVector evolve(const SpectralPropagator& prop,
                          const StateVector& psi0, double t) {
    if (prop.dim() != psi0.dim() || prop.full_space != psi0.full_space)
        throw DimensionMismatch("evolve: propagator/state dims differ");
    Vector y = prop.eigenvectors.adjoint() * psi0.v;
    for (int j = 0; j < y.size(); ++j)
        y(j) *= std::exp(cplx(0.0, -prop.eigenvalues(j) * t));
    Vector out = prop.eigenvectors * y;
    return StateVector::make(std::move(out), psi0.n_fock, psi0.full_space,
                             psi0.truncation_deficit);
}

enum class HamiltonianChoice { rwa, transformed_full, lab_full };

namespace detail {

inline double mean_fock_of_vector(const Vector& v, int n_max) {
    double s = 0.0;
    for (int n = 0; n < n_max; ++n)
        s += n * (std::norm(v(n)) + std::norm(v(n_max + n)));
    return s;
}

}  // namespace detail

/// Mean-excitation curve from explicit matrix evolution.
///
///   rwa               exp(-i H_int t) between T and T^dag, from |e,alpha>;
///                     requires the resonant regime.
///   transformed_full  same sandwich, but the full transformed Hamiltonian
///                     is exponentiated (no rotating-wave step).
///   lab_full          direct evolution under the lab-frame Hamiltonian;
///                     <n> is evaluated with no transformation at all.
///
/// Scaled time tau = g t, so eta > 0 is required to map the grid to t.
/// n_max <= 0 selects the truncation rule automatically.
inline ExcitationSeries evolve_matrix_pipeline(
    const IonParams& p, const CoherentAmplitude& alpha,
    const std::vector<double>& tau_grid, HamiltonianChoice choice,
    int n_max = 0) {
    if (alpha.eta != p.eta)
        throw Error("evolve_matrix_pipeline: alpha and params disagree on eta");
    if (p.g <= 0.0)
        throw Error("evolve_matrix_pipeline: scaled time needs g > 0");
    if (choice == HamiltonianChoice::rwa && !p.rwa_regime)
        throw RegimeViolation("evolve_matrix_pipeline: rwa requires nu = 2*omega");
    if (n_max <= 0) n_max = auto_n_max(alpha);
    if (required_levels(std::abs(alpha.alpha_tilde)) > n_max)
        throw TruncationTooSmall("evolve_matrix_pipeline: n_max too small");
    SpaceDims dims(n_max);

    const StateVector prepared =
        embed_electronic(coherent_state(alpha.alpha, n_max), /*excited=*/true);

    const bool sandwich = choice != HamiltonianChoice::lab_full;
    Matrix t_mat, t_dag;
    StateVector initial = prepared;
    if (sandwich) {
        OperatorMatrix t_op = build_T(p, dims);
        t_dag = t_op.m.adjoint();
        Vector v = t_op.m * prepared.v;
        initial = StateVector::make(std::move(v), n_max, true,
                                    prepared.truncation_deficit);
        t_mat = std::move(t_op.m);
    }

    OperatorMatrix h = [&] {
        switch (choice) {
            case HamiltonianChoice::rwa:
                return build_interaction_coupling(p, dims);
            case HamiltonianChoice::transformed_full:
                return build_transformed_hamiltonian(p, dims);
            case HamiltonianChoice::lab_full:
            default:
                return build_full_hamiltonian(p, dims);
        }
    }();
    const SpectralPropagator prop = SpectralPropagator::make(h);

    const Provenance prov = choice == HamiltonianChoice::rwa
                                ? Provenance::oracle_rwa
                                : Provenance::oracle_full;
    std::vector<double> values(tau_grid.size());
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        const double t = tau_grid[i] / p.g;
        StateVector psi = evolve(prop, initial, t);
        if (std::abs(psi.v.norm() - 1.0) > 1e-10)
            throw Error("evolve_matrix_pipeline: norm drift");
        if (sandwich) {
            Vector lab = t_dag * psi.v;
            values[i] = detail::mean_fock_of_vector(lab, n_max);
        } else {
            values[i] = detail::mean_fock_of_vector(psi.v, n_max);
        }
    }

    ExcitationSeries s = ExcitationSeries::make(tau_grid, std::move(values),
                                                prov, p, alpha);
    if (!s.tau.empty() && s.tau.front() == 0.0) {
        const double expect = std::norm(alpha.alpha);
        if (std::abs(s.n_mean.front() - expect) > 1e-6)
            throw Error("evolve_matrix_pipeline: <n>(0) != |alpha|^2");
    }
    return s;
}

}  // namespace iontrap

#endif
