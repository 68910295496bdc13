#ifndef IONTRAP_SERIES_HPP
#define IONTRAP_SERIES_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "iontrap/hamiltonians.hpp"

namespace iontrap {

/// Coherent preparation amplitude alpha together with the shifted
/// amplitude alpha_tilde = alpha - i*eta/2 that the linearized dynamics
/// actually sees.
struct CoherentAmplitude {
    cplx alpha{0.0, 0.0};
    double eta = 0.0;
    cplx alpha_tilde{0.0, 0.0};

    static CoherentAmplitude make(cplx alpha, double eta) {
        if (eta < 0.0) throw Error("CoherentAmplitude: eta must be >= 0");
        return CoherentAmplitude{alpha, eta, alpha - cplx(0.0, eta / 2.0)};
    }
};

enum class Provenance { analytic, oracle_rwa, oracle_full };

inline const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::analytic: return "analytic";
        case Provenance::oracle_rwa: return "oracle_rwa";
        case Provenance::oracle_full: return "oracle_full";
    }
    return "?";
}

/// Sampled mean-excitation curve (tau_k, <n>(tau_k)) in scaled time
/// tau = g t, tagged with how it was produced.
struct ExcitationSeries {
    std::vector<double> tau;
    std::vector<double> n_mean;
    Provenance provenance = Provenance::analytic;
    IonParams params;
    CoherentAmplitude alpha;

    static ExcitationSeries make(std::vector<double> tau,
                                 std::vector<double> n_mean,
                                 Provenance prov, const IonParams& p,
                                 const CoherentAmplitude& a) {
        if (tau.size() != n_mean.size() || tau.empty())
            throw Error("ExcitationSeries: tau/n_mean size mismatch");
        for (std::size_t i = 1; i < tau.size(); ++i)
            if (!(tau[i] > tau[i - 1]))
                throw Error("ExcitationSeries: tau must be strictly increasing");
        for (double v : n_mean)
            if (!(v >= -1e-10))
                throw Error("ExcitationSeries: negative mean excitation");
        return ExcitationSeries{std::move(tau), std::move(n_mean), prov, p, a};
    }
};

/// Uniform grid 0, step, 2*step, ..., covering [0, tau_max].
inline std::vector<double> make_tau_grid(double tau_max, double step) {
    if (!(step > 0.0) || !(tau_max > step))
        throw Error("make_tau_grid: need tau_max > step > 0");
    const auto count = std::size_t(std::floor(tau_max / step)) + 1;
    std::vector<double> grid(count);
    for (std::size_t k = 0; k < count; ++k) grid[k] = double(k) * step;
    return grid;
}

/// Levels required by the truncation rule for this preparation.  Both the
/// lab-frame state (centered on |alpha|^2) and the transformed-frame
/// dynamics (centered on |alpha_tilde|^2) must fit.
inline int auto_n_max(const CoherentAmplitude& a) {
    return std::max(required_levels(std::abs(a.alpha)),
                    required_levels(std::abs(a.alpha_tilde)));
}

/// Same, rounded up to the next multiple of 16.
inline int auto_n_max_aligned(const CoherentAmplitude& a) {
    const int raw = auto_n_max(a);
    return ((raw + 15) / 16) * 16;
}

}  // namespace iontrap

#endif
