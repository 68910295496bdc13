#ifndef IONTRAP_HAMILTONIANS_HPP
#define IONTRAP_HAMILTONIANS_HPP

#include <cmath>
#include <limits>

#include "iontrap/fockspace.hpp"

// Builders for the laser-driven trapped-ion Hamiltonian, the unitary
// transformation that linearizes it, the transformed Hamiltonian, and its
// resonant (rotating-wave) Jaynes-Cummings form.  hbar = 1 throughout; nu
// sets the frequency scale.
//
// All builders are pure functions of immutable inputs.

namespace iontrap {

/// Physical parameters of the driven ion.
///
///   nu     trap frequency (> 0)
///   omega  Rabi frequency of the effective two-level drive (>= 0)
///   delta  laser-ion detuning
///   eta    Lamb-Dicke parameter (>= 0); no small-eta expansion is made
///
/// Derived: coupling g = eta*nu/2 and displacement amplitude
/// beta = i*eta/2 of the linearizing transformation.  The resonant regime
/// nu = 2*omega (exact up to rwa_tolerance) enables the rotating-wave step.
struct IonParams {
    double nu = 1.0;
    double omega = 0.0;
    double delta = 0.0;
    double eta = 0.0;
    double g = 0.0;        // eta*nu/2
    cplx beta{0.0, 0.0};   // i*eta/2
    bool rwa_regime = false;
    double rwa_tolerance = 1e-9;

    static IonParams make(double nu, double omega, double delta, double eta,
                          double rwa_tolerance = 1e-9) {
        if (nu <= 0.0) throw Error("IonParams: nu must be positive");
        if (omega < 0.0) throw Error("IonParams: omega must be non-negative");
        if (eta < 0.0) throw Error("IonParams: eta must be non-negative");
        IonParams p;
        p.nu = nu;
        p.omega = omega;
        p.delta = delta;
        p.eta = eta;
        p.g = eta * nu / 2.0;
        p.beta = cplx(0.0, eta / 2.0);
        p.rwa_tolerance = rwa_tolerance;
        p.rwa_regime = std::abs(nu - 2.0 * omega) / nu <= rwa_tolerance;
        return p;
    }
};

/// Full ion-laser Hamiltonian
///
///   H = nu n + (delta/2) sigma_z
///       + omega (sigma_- e^{-i eta (a + a^dag)} + sigma_+ e^{+i eta (a + a^dag)})
///
/// The kick operators e^{+-i eta (a+a^dag)} are built by exact
/// exponentiation of the truncated Hermitian generator.  The drive
/// coupling enters with coefficient omega (not omega/2): this is the
/// normalization under which conjugation by the transformation T below
/// reproduces the transformed Hamiltonian, the spectra agree, and the
/// resonant form reduces to the Jaynes-Cummings model at nu = 2*omega.
inline OperatorMatrix build_full_hamiltonian(const IonParams& p,
                                             const SpaceDims& dims) {
    const Matrix a = build_annihilation(dims).m;
    const Matrix x = a + Matrix(a.adjoint());  // a + a^dag, Hermitian
    const Matrix kick_up = exp_i_hermitian(p.eta * x, 1.0);    // e^{+i eta x}
    const Matrix kick_dn = kick_up.adjoint();                  // e^{-i eta x}

    const OperatorMatrix n_op = build_number(dims);
    Matrix h = p.nu * tensor_electronic(n_op, ElectronicOp::identity).m;
    Matrix sz = tensor_electronic(
        OperatorMatrix::fock(dims.n_max, Matrix::Identity(dims.n_max, dims.n_max)),
        ElectronicOp::sigma_z).m;
    h += 0.5 * p.delta * sz;
    h += p.omega *
         tensor_electronic(OperatorMatrix::fock(dims.n_max, kick_dn),
                           ElectronicOp::sigma_minus).m;
    h += p.omega *
         tensor_electronic(OperatorMatrix::fock(dims.n_max, kick_up),
                           ElectronicOp::sigma_plus).m;
    return OperatorMatrix::full(dims, std::move(h), /*herm=*/true);
}

/// Linearizing unitary
///
///   T = (1/sqrt2) { (1/2)[D^dag(beta) + D(beta)] I
///                 + (1/2)[D^dag(beta) - D(beta)] sigma_z
///                 + D(beta) sigma_+  -  D^dag(beta) sigma_- },   beta = i eta/2.
///
/// Exactly unitary on the truncated space because D is built from the
/// truncated generator.
inline OperatorMatrix build_T(const IonParams& p, const SpaceDims& dims) {
    const Matrix d = build_displacement(p.beta, dims.n_max).m;
    const Matrix ddag = d.adjoint();
    auto vib = [&](Matrix m) {
        return OperatorMatrix::fock(dims.n_max, std::move(m));
    };
    Matrix t =
        0.5 * tensor_electronic(vib(ddag + d), ElectronicOp::identity).m +
        0.5 * tensor_electronic(vib(ddag - d), ElectronicOp::sigma_z).m +
        tensor_electronic(vib(d), ElectronicOp::sigma_plus).m -
        tensor_electronic(vib(ddag), ElectronicOp::sigma_minus).m;
    t /= std::sqrt(2.0);
    return OperatorMatrix::full(dims, std::move(t), false, /*unit=*/true);
}

/// Transformed Hamiltonian T H T^dag, built directly from its closed form
///
///   H' = nu n + omega sigma_z
///        - i (eta nu / 2) [ (a^dag - a) - i delta/(eta nu) ] (sigma_- + sigma_+)
///        + nu eta^2/4.
///
/// The agreement with the explicit conjugation T H T^dag is a test oracle,
/// not part of this builder.  Throws EtaZeroUndefined when eta = 0 with
/// delta != 0 (the delta/(eta nu) term is singular there).
inline OperatorMatrix build_transformed_hamiltonian(const IonParams& p,
                                                    const SpaceDims& dims) {
    if (p.eta == 0.0 && p.delta != 0.0)
        throw EtaZeroUndefined(
            "build_transformed_hamiltonian: delta term undefined at eta = 0");
    const Matrix a = build_annihilation(dims).m;
    const int n = dims.n_max;

    // Fock factor of the coupling: -i(eta nu/2)(a^dag - a) - delta/2.
    Matrix f = cplx(0.0, -0.5 * p.eta * p.nu) * (Matrix(a.adjoint()) - a);
    f -= 0.5 * p.delta * Matrix::Identity(n, n);

    Matrix h = p.nu * tensor_electronic(build_number(dims),
                                        ElectronicOp::identity).m;
    h += p.omega * tensor_electronic(
        OperatorMatrix::fock(n, Matrix::Identity(n, n)),
        ElectronicOp::sigma_z).m;
    h += tensor_electronic(OperatorMatrix::fock(n, f),
                           ElectronicOp::sigma_minus).m;
    h += tensor_electronic(OperatorMatrix::fock(n, f),
                           ElectronicOp::sigma_plus).m;
    h += (p.nu * p.eta * p.eta / 4.0) * Matrix::Identity(2 * n, 2 * n);
    return OperatorMatrix::full(dims, std::move(h), /*herm=*/true);
}

/// Interaction-picture coupling of the resonant model:
///   H_int = -i g (a^dag sigma_-  -  a sigma_+).
inline OperatorMatrix build_interaction_coupling(const IonParams& p,
                                                 const SpaceDims& dims) {
    const OperatorMatrix a = build_annihilation(dims);
    const OperatorMatrix adag = build_creation(dims);
    Matrix h = cplx(0.0, -p.g) *
               tensor_electronic(adag, ElectronicOp::sigma_minus).m;
    h += cplx(0.0, p.g) * tensor_electronic(a, ElectronicOp::sigma_plus).m;
    return OperatorMatrix::full(dims, std::move(h), /*herm=*/true);
}

/// Resonant (rotating-wave) Hamiltonian, valid in the regime nu = 2*omega:
///
///   H_RWA = nu n + (nu/2) sigma_z - i g (a^dag sigma_- - a sigma_+),
///   g = eta nu / 2.
///
/// The constant nu eta^2/4 is dropped (overall phase).  Throws
/// RegimeViolation when |nu - 2 omega|/nu exceeds p.rwa_tolerance.
inline OperatorMatrix build_rwa_hamiltonian(const IonParams& p,
                                            const SpaceDims& dims) {
    if (!p.rwa_regime)
        throw RegimeViolation("build_rwa_hamiltonian: requires nu = 2*omega");
    const int n = dims.n_max;
    Matrix h = p.nu * tensor_electronic(build_number(dims),
                                        ElectronicOp::identity).m;
    h += 0.5 * p.nu * tensor_electronic(
        OperatorMatrix::fock(n, Matrix::Identity(n, n)),
        ElectronicOp::sigma_z).m;
    h += build_interaction_coupling(p, dims).m;
    return OperatorMatrix::full(dims, std::move(h), /*herm=*/true);
}

/// Boundary margin (in Fock levels) outside which the truncated
/// conjugation T H T^dag deviates from the closed-form transformed
/// Hamiltonian.  The chain T * H * T^dag carries displacements totalling
/// 2*eta (eta/2 from each transformation factor, eta from each kick
/// operator), so the product-chain rule applies with that total.
inline int conjugation_interior_margin(double eta) {
    return product_chain_margin(2.0 * eta);
}

/// Size of the detuning term dropped by the rotating-wave step, relative
/// to the coupling g.  Users should treat the resonant model with caution
/// when this is not small.
inline double rwa_delta_diagnostic(const IonParams& p) {
    if (p.g == 0.0)
        return p.delta == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(p.delta) / 2.0 / p.g;
}

}  // namespace iontrap

#endif
