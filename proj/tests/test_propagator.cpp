#include <catch2/catch.hpp>

#include "iontrap/analytic.hpp"
#include "iontrap/propagator.hpp"

using namespace iontrap;

namespace {
const IonParams kParams = IonParams::make(1.0, 0.5, 0.0, 0.5);
const CoherentAmplitude kPrep = CoherentAmplitude::make(cplx(0.5, 5.0), 0.5);
}  // namespace

TEST_CASE("spectral propagator demands a hermitian hamiltonian") {
    SpaceDims dims(8);
    OperatorMatrix a = build_annihilation(dims);
    CHECK_THROWS_AS(SpectralPropagator::make(a), Error);
}

TEST_CASE("spectral decomposition satisfies its residual bounds") {
    SpaceDims dims(48);
    OperatorMatrix h = build_rwa_hamiltonian(kParams, dims);
    SpectralPropagator prop = SpectralPropagator::make(h);
    const double scale = prop.eigenvalues.cwiseAbs().maxCoeff();
    const double residual = max_abs(Matrix(
        h.m * prop.eigenvectors -
        prop.eigenvectors *
            prop.eigenvalues.cast<cplx>().asDiagonal().toDenseMatrix()));
    CHECK(residual <= 1e-9 * scale);
    CHECK(identity_defect_interior(
              Matrix(prop.eigenvectors.adjoint() * prop.eigenvectors),
              prop.dim(), false, prop.dim()) <= 1e-10);
}

TEST_CASE("evolution at t = 0 returns the initial state") {
    const int n_max = 80;
    SpaceDims dims(n_max);
    SpectralPropagator prop =
        SpectralPropagator::make(build_rwa_hamiltonian(kParams, dims));
    StateVector psi0 = embed_electronic(coherent_state(kPrep.alpha, n_max), true);
    StateVector back = evolve(prop, psi0, 0.0);
    CHECK((back.v - psi0.v).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("evolution under a diagonal hamiltonian only rotates phases") {
    const int n_max = 16;
    SpaceDims dims(n_max);
    IonParams p = IonParams::make(1.0, 0.0, 0.3, 0.5);  // omega = 0
    SpectralPropagator prop =
        SpectralPropagator::make(build_full_hamiltonian(p, dims));
    Vector v = Vector::Zero(2 * n_max);
    const int idx = basis_index(true, 3, dims);
    v(idx) = 1.0;
    StateVector psi0 = StateVector::make(v, n_max, true);
    const double t = 2.31;
    StateVector psi = evolve(prop, psi0, t);
    const cplx expected = std::exp(cplx(0.0, -(p.nu * 3 + 0.5 * p.delta) * t));
    CHECK(std::abs(psi.v(idx) - expected) < 1e-10);
    for (int i = 0; i < 2 * n_max; ++i)
        if (i != idx) CHECK(std::abs(psi.v(i)) < 1e-12);
}

TEST_CASE("evolution rejects mismatched dimensions") {
    SpectralPropagator prop =
        SpectralPropagator::make(build_rwa_hamiltonian(kParams, SpaceDims(16)));
    StateVector vib = coherent_state(cplx(0.0, 0.0), 16);
    CHECK_THROWS_AS(evolve(prop, vib, 1.0), DimensionMismatch);
}

TEST_CASE("interaction-frame sandwich agrees with the closed form at tau = 50") {
    const int n_max = auto_n_max(kPrep);
    SpaceDims dims(n_max);
    Matrix t = build_T(kParams, dims).m;
    StateVector prep = embed_electronic(coherent_state(kPrep.alpha, n_max), true);
    StateVector chi0 = StateVector::make(t * prep.v, n_max, true);
    SpectralPropagator prop =
        SpectralPropagator::make(build_interaction_coupling(kParams, dims));
    const double tau = 50.0;
    StateVector chi = evolve(prop, chi0, tau / kParams.g);
    Vector lab = t.adjoint() * chi.v;
    const double n_oracle = detail::mean_fock_of_vector(lab, n_max);

    CoefficientTable tab = coefficients(kPrep, kParams, tau, dims);
    const double n_closed = mean_excitation_from_coefficients(tab, kParams.eta);
    CHECK(n_oracle == Approx(n_closed).margin(1e-6));
}

TEST_CASE("free rotation leaves the mean occupation invariant") {
    // Schrodinger-picture evolution under the resonant hamiltonian and
    // interaction-picture evolution under the coupling alone give the
    // same <n> when no frame sandwich is applied.
    const int n_max = auto_n_max(kPrep);
    SpaceDims dims(n_max);
    Matrix t = build_T(kParams, dims).m;
    StateVector prep = embed_electronic(coherent_state(kPrep.alpha, n_max), true);
    StateVector chi0 = StateVector::make(t * prep.v, n_max, true);
    SpectralPropagator full =
        SpectralPropagator::make(build_rwa_hamiltonian(kParams, dims));
    SpectralPropagator coupling =
        SpectralPropagator::make(build_interaction_coupling(kParams, dims));
    for (double tau : {3.0, 50.0}) {
        StateVector a = evolve(full, chi0, tau / kParams.g);
        StateVector b = evolve(coupling, chi0, tau / kParams.g);
        CHECK(detail::mean_fock_of_vector(a.v, n_max) ==
              Approx(detail::mean_fock_of_vector(b.v, n_max)).margin(1e-9));
    }
}

TEST_CASE("pipeline preconditions") {
    auto grid = make_tau_grid(1.0, 0.1);
    SECTION("rwa choice needs the resonant regime") {
        IonParams p = IonParams::make(1.0, 0.4, 0.0, 0.5);
        CoherentAmplitude a = CoherentAmplitude::make(cplx(1.0, 0.0), 0.5);
        CHECK_THROWS_AS(
            evolve_matrix_pipeline(p, a, grid, HamiltonianChoice::rwa),
            RegimeViolation);
    }
    SECTION("truncation rule enforced") {
        CHECK_THROWS_AS(evolve_matrix_pipeline(kParams, kPrep, grid,
                                              HamiltonianChoice::rwa, 32),
                        TruncationTooSmall);
    }
    SECTION("scaled time needs eta > 0") {
        IonParams p = IonParams::make(1.0, 0.5, 0.0, 0.0);
        CoherentAmplitude a = CoherentAmplitude::make(cplx(1.0, 0.0), 0.0);
        CHECK_THROWS_AS(
            evolve_matrix_pipeline(p, a, grid, HamiltonianChoice::lab_full),
            Error);
    }
}

TEST_CASE("rwa pipeline starts at |alpha|^2") {
    auto grid = make_tau_grid(0.5, 0.1);
    ExcitationSeries s =
        evolve_matrix_pipeline(kParams, kPrep, grid, HamiltonianChoice::rwa);
    CHECK(s.n_mean.front() == Approx(25.25).margin(1e-8));
    CHECK(s.provenance == Provenance::oracle_rwa);
}

TEST_CASE("lab evolution with the drive off conserves the occupation") {
    IonParams p = IonParams::make(1.0, 0.0, 0.0, 0.5);
    CoherentAmplitude a = CoherentAmplitude::make(cplx(2.0, 0.0), 0.5);
    auto grid = make_tau_grid(20.0, 0.5);
    ExcitationSeries s =
        evolve_matrix_pipeline(p, a, grid, HamiltonianChoice::lab_full);
    for (double v : s.n_mean) CHECK(v == Approx(4.0).margin(1e-9));
}

TEST_CASE("mean excitation is robust under truncation refinement") {
    auto grid = make_tau_grid(20.0, 0.1);
    const int base = auto_n_max(kPrep);
    ExcitationSeries s1 =
        evolve_matrix_pipeline(kParams, kPrep, grid, HamiltonianChoice::rwa, base);
    ExcitationSeries s2 = evolve_matrix_pipeline(kParams, kPrep, grid,
                                                HamiltonianChoice::rwa, 2 * base);
    double dev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        dev = std::max(dev, std::abs(s1.n_mean[i] - s2.n_mean[i]));
    CHECK(dev < 1e-6);
}

TEST_CASE("resonant-model error is measured, bounded and truncation-stable") {
    auto grid = make_tau_grid(30.0, 0.1);
    const int base = auto_n_max(kPrep);
    auto deviation = [&](int n_max) {
        ExcitationSeries rwa = evolve_matrix_pipeline(kParams, kPrep, grid,
                                                     HamiltonianChoice::rwa,
                                                     n_max);
        ExcitationSeries lab = evolve_matrix_pipeline(kParams, kPrep, grid,
                                                     HamiltonianChoice::lab_full,
                                                     n_max);
        double dev = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            dev = std::max(dev, std::abs(rwa.n_mean[i] - lab.n_mean[i]));
        return dev;
    };
    const double d1 = deviation(base);
    const double d2 = deviation(base + 32);
    CHECK(std::isfinite(d1));
    CHECK(d1 > 0.0);
    CHECK(std::abs(d2 - d1) <= 0.1 * d1);
}

TEST_CASE("transformed-frame and lab-frame oracles agree") {
    // the two full evolutions are unitarily equivalent, so their mean
    // occupations match to truncation accuracy
    auto grid = make_tau_grid(20.0, 0.5);
    ExcitationSeries trf = evolve_matrix_pipeline(
        kParams, kPrep, grid, HamiltonianChoice::transformed_full);
    ExcitationSeries lab =
        evolve_matrix_pipeline(kParams, kPrep, grid, HamiltonianChoice::lab_full);
    CHECK(trf.provenance == Provenance::oracle_full);
    double dev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        dev = std::max(dev, std::abs(trf.n_mean[i] - lab.n_mean[i]));
    CHECK(dev < 1e-6);
}
