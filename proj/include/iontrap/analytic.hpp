#ifndef IONTRAP_ANALYTIC_HPP
#define IONTRAP_ANALYTIC_HPP

#include <cmath>
#include <vector>

#include "iontrap/series.hpp"

// Closed-form time evolution of the linearized model: the resonant
// Jaynes-Cummings propagator in the interaction picture, the branch
// coefficients of the evolved state for the preparation |e>|alpha>, and
// the closed-form mean vibrational excitation <n>(tau).
//
// Conventions (fixed once, against the matrix pipeline, and used
// everywhere):
//  * scaled time tau = g t; all closed-form trig arguments are
//    tau*sqrt(n) or tau*sqrt(n+1), so the curves depend on eta only
//    through alpha_tilde and the explicit eta factors below;
//  * U_I(tau) = exp(-i H_int t), which pairs |e,n> -> cos|e,n> - sin|g,n+1>;
//  * coefficient tables are normalized to unit state norm and carry the
//    global phase exp(-i (eta/2) Re alpha) the transformation imprints on
//    the coherent preparation.

namespace iontrap {

/// Branch coefficients c_e(n), c_g(n) of the transformed, interaction-
/// picture state at one scaled time.
struct CoefficientTable {
    double tau = 0.0;
    std::vector<cplx> c_e;
    std::vector<cplx> c_g;
    cplx alpha_tilde{0.0, 0.0};

    double norm_sum() const {
        double s = 0.0;
        for (const cplx& c : c_e) s += std::norm(c);
        for (const cplx& c : c_g) s += std::norm(c);
        return s;
    }
};

/// Resonant Jaynes-Cummings propagator in the interaction picture,
/// assembled from its closed form in the fixed basis:
///
///   U_I(tau) |g,0>   = |g,0>
///   U_I(tau) |e,n>   = cos(tau sqrt(n+1)) |e,n> - sin(tau sqrt(n+1)) |g,n+1>
///   U_I(tau) |g,n+1> = cos(tau sqrt(n+1)) |g,n+1> + sin(tau sqrt(n+1)) |e,n>
///
/// Exactly unitary except in the last Fock level, where the truncated
/// ladder has no partner state.
inline OperatorMatrix jc_propagator(double tau, const SpaceDims& dims) {
    if (!std::isfinite(tau)) throw Error("jc_propagator: tau must be finite");
    const int n_max = dims.n_max;
    Matrix u = Matrix::Zero(2 * n_max, 2 * n_max);
    for (int n = 0; n < n_max; ++n) {
        u(n, n) = std::cos(tau * std::sqrt(double(n)));                    // g-block
        u(n_max + n, n_max + n) = std::cos(tau * std::sqrt(double(n + 1)));  // e-block
    }
    for (int n = 0; n + 1 < n_max; ++n) {
        const double s = std::sin(tau * std::sqrt(double(n + 1)));
        u(n + 1, n_max + n) = -s;  // <g,n+1| U |e,n>
        u(n_max + n, n + 1) = s;   // <e,n| U |g,n+1>
    }
    return OperatorMatrix::full(dims, std::move(u), false, /*unit=*/true);
}

/// Branch coefficients at scaled time tau for the preparation |e>|alpha>.
///
/// With A_n = <n|alpha_tilde> and K = exp(-i (eta/2) Re alpha)/sqrt(2):
///
///   c_e(n) =  K [ A_n     cos(tau sqrt(n+1)) - A_{n+1} sin(tau sqrt(n+1)) ]
///   c_g(n) = -K [ A_n     cos(tau sqrt(n))   + A_{n-1} sin(tau sqrt(n))   ]
///
/// The n = 0 term of c_g has no A_{-1} contribution (sin(0) = 0 closes
/// the limit).  Throws TruncationTooSmall when n_max violates the
/// truncation rule for alpha_tilde.
inline CoefficientTable coefficients(const CoherentAmplitude& alpha,
                                     const IonParams& p, double tau,
                                     const SpaceDims& dims) {
    if (alpha.eta != p.eta)
        throw Error("coefficients: alpha and params disagree on eta");
    const int n_max = dims.n_max;
    if (required_levels(std::abs(alpha.alpha_tilde)) > n_max)
        throw TruncationTooSmall("coefficients: need n_max >= " +
            std::to_string(required_levels(std::abs(alpha.alpha_tilde))));

    std::vector<cplx> amp(n_max + 1);
    for (int n = 0; n <= n_max; ++n)
        amp[n] = detail::coherent_amp(alpha.alpha_tilde, n);

    const double phase = -0.5 * p.eta * alpha.alpha.real();
    const cplx k = cplx(std::cos(phase), std::sin(phase)) / std::sqrt(2.0);

    CoefficientTable table;
    table.tau = tau;
    table.alpha_tilde = alpha.alpha_tilde;
    table.c_e.resize(n_max);
    table.c_g.resize(n_max);
    for (int n = 0; n < n_max; ++n) {
        const double re = tau * std::sqrt(double(n + 1));
        table.c_e[n] = k * (amp[n] * std::cos(re) - amp[n + 1] * std::sin(re));
        const double rg = tau * std::sqrt(double(n));
        cplx cg = amp[n] * std::cos(rg);
        if (n > 0) cg += amp[n - 1] * std::sin(rg);
        table.c_g[n] = -k * cg;
    }
    return table;
}

/// Mean vibrational excitation from a coefficient table:
///
///   <n> = sum_n (n + eta^2/4) (|c_e(n)|^2 + |c_g(n)|^2) + eta Im(w),
///   w   = sum_n sqrt(n+1) [ c_g(n+1)^* c_e(n) - c_g(n)^* c_e(n+1) ].
///
/// The interference sum is the matrix element of the displacement-dressed
/// number operator between the two electronic branches.
inline double mean_excitation_from_coefficients(const CoefficientTable& t,
                                                double eta) {
    const int n_max = int(t.c_e.size());
    double populations = 0.0;
    for (int n = 0; n < n_max; ++n)
        populations += (n + eta * eta / 4.0) *
                       (std::norm(t.c_e[n]) + std::norm(t.c_g[n]));
    cplx w(0.0, 0.0);
    for (int n = 0; n + 1 < n_max; ++n)
        w += std::sqrt(double(n + 1)) *
             (std::conj(t.c_g[n + 1]) * t.c_e[n] -
              std::conj(t.c_g[n]) * t.c_e[n + 1]);
    return populations + eta * w.imag();
}

/// Closed-form <n>(tau) over a grid for the preparation |e>|alpha>.
/// n_max <= 0 selects the truncation rule automatically.
inline ExcitationSeries mean_excitation_analytic(
    const CoherentAmplitude& alpha, const IonParams& p,
    const std::vector<double>& tau_grid, int n_max = 0) {
    if (n_max <= 0) n_max = auto_n_max(alpha);
    SpaceDims dims(n_max);
    std::vector<double> values(tau_grid.size());
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        const CoefficientTable t = coefficients(alpha, p, tau_grid[i], dims);
        values[i] = mean_excitation_from_coefficients(t, p.eta);
    }
    ExcitationSeries s = ExcitationSeries::make(
        tau_grid, std::move(values), Provenance::analytic, p, alpha);
    if (!s.tau.empty() && s.tau.front() == 0.0) {
        const double expect = std::norm(alpha.alpha);
        if (std::abs(s.n_mean.front() - expect) > 1e-6)
            throw Error("mean_excitation_analytic: <n>(0) != |alpha|^2");
    }
    return s;
}

}  // namespace iontrap

#endif
