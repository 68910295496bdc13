#ifndef IONTRAP_REVIVALS_HPP
#define IONTRAP_REVIVALS_HPP

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <optional>
#include <vector>

#include "iontrap/series.hpp"

// Signal analysis on mean-excitation curves: oscillation-envelope
// extraction, revival-time estimation, and the long-time-scale
// "super-revival" test around tau_sr = 4 |alpha|^2 tau_r.
//
// Everything here is deterministic: identical series give identical
// reports, and all thresholds are relative (median / median-absolute-
// deviation based), so scaling a curve by c > 0 scales heights by c and
// leaves every detected time unchanged.

namespace iontrap {

struct EnvelopeCurve {
    std::vector<double> tau;
    std::vector<double> value;
};

struct Peak {
    double tau = 0.0;
    double height = 0.0;
};

struct RevivalReport {
    double n_bar = 0.0;                    // |alpha|^2 of the preparation
    double tau_r_predicted_scaled = 0.0;   // 2 pi sqrt(n_bar), tau = g t units
    double tau_r_predicted_rabi = 0.0;     // 2 pi sqrt(n_bar) * g / omega
    std::optional<double> tau_r_measured;  // autocorrelation period estimate
    std::optional<double> tau_r_first_envelope_peak;  // diagnostic
    std::optional<double> tau_sr_predicted;  // 4 n_bar tau_r_measured
    std::optional<double> tau_sr_measured;
    bool super_revival_evaluated = false;
    bool super_revival_detected = false;
    EnvelopeCurve envelope;
    std::vector<Peak> peak_list;
    double envelope_window = 0.0;
    double threshold = 0.0;   // median + 1.5 * MAD of the envelope
    double median_level = 0.0;
    double mad_level = 0.0;
    double super_baseline = 0.0;  // quiet-region bar the resurgence must clear
};

struct DetectOptions {
    double window = 8.0 * std::numbers::pi;  // envelope window, in tau units
    bool detect_super = true;    // attempt the long-time detection
    bool strict_span = false;    // throw SeriesTooShort instead of skipping
};

namespace detail {

inline double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline double mad_of(const std::vector<double>& v, double median) {
    std::vector<double> dev(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) dev[i] = std::abs(v[i] - median);
    return median_of(std::move(dev));
}

/// Centered rolling mean with truncated windows at the edges.
inline std::vector<double> rolling_mean(const std::vector<double>& x,
                                        int half) {
    const int n = int(x.size());
    std::vector<double> pre(n + 1, 0.0);
    for (int i = 0; i < n; ++i) pre[i + 1] = pre[i] + x[i];
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(n - 1, i + half);
        out[i] = (pre[hi + 1] - pre[lo]) / double(hi - lo + 1);
    }
    return out;
}

/// Centered rolling max (or min) via a monotonic deque, O(n).
inline std::vector<double> rolling_extreme(const std::vector<double>& x,
                                           int half, bool want_max) {
    const int n = int(x.size());
    std::vector<double> out(n);
    std::deque<int> dq;
    auto worse = [&](double a, double b) { return want_max ? a <= b : a >= b; };
    int right = -1;
    for (int i = 0; i < n; ++i) {
        const int hi = std::min(n - 1, i + half);
        while (right < hi) {
            ++right;
            while (!dq.empty() && worse(x[dq.back()], x[right])) dq.pop_back();
            dq.push_back(right);
        }
        const int lo = std::max(0, i - half);
        while (!dq.empty() && dq.front() < lo) dq.pop_front();
        out[i] = x[dq.front()];
    }
    return out;
}

/// Plateau-aware strict local maxima of a curve.
inline std::vector<int> local_maxima(const std::vector<double>& y) {
    std::vector<int> peaks;
    const int n = int(y.size());
    int i = 1;
    while (i < n - 1) {
        if (y[i] > y[i - 1]) {
            int j = i;
            while (j + 1 < n && y[j + 1] == y[i]) ++j;  // walk plateau
            if (j + 1 < n && y[j + 1] < y[i]) peaks.push_back((i + j) / 2);
            i = j + 1;
        } else {
            ++i;
        }
    }
    return peaks;
}

}  // namespace detail

/// Oscillation envelope: centered rolling peak-to-peak amplitude of the
/// residual around a centered rolling mean, on the same tau grid.  The
/// window must cover at least four fast-oscillation periods near the mean
/// excitation, else WindowTooSmall.
inline EnvelopeCurve extract_envelope(const ExcitationSeries& series,
                                      double window = 8.0 * std::numbers::pi) {
    const double n_bar = std::norm(series.alpha.alpha);
    const double fast_period = std::numbers::pi / std::sqrt(n_bar + 1.0);
    if (window < 4.0 * fast_period)
        throw WindowTooSmall("extract_envelope: window below 4 oscillation periods");
    if (series.tau.size() < 4)
        throw SeriesTooShort("extract_envelope: series too short");

    const double step = series.tau[1] - series.tau[0];
    const int half = std::max(1, int(std::lround(window / step / 2.0)));
    const std::vector<double>& x = series.n_mean;
    const std::vector<double> mean = detail::rolling_mean(x, half);
    std::vector<double> resid(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) resid[i] = x[i] - mean[i];
    const std::vector<double> hi = detail::rolling_extreme(resid, half, true);
    const std::vector<double> lo = detail::rolling_extreme(resid, half, false);
    EnvelopeCurve env;
    env.tau = series.tau;
    env.value.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) env.value[i] = hi[i] - lo[i];
    return env;
}

namespace detail {

/// Revival period from the first significant autocorrelation peak of the
/// detrended curve.  Revival dynamics may show up either as bursts of a
/// fast carrier or as a slow swing of the mean at the revival period; the
/// autocorrelation period catches both, where a bump-finding rule on the
/// smoothed envelope only catches the first.  The search is restricted to
/// an early segment (10 revival scales) so the estimate does not depend
/// on how far the series extends, and to lags within a factor of the
/// physical revival scale 2 pi sqrt(n_bar + 1).
inline std::optional<double> autocorr_revival_time(
    const ExcitationSeries& series, double detrend_window) {
    const double n_bar = std::norm(series.alpha.alpha);
    const double tau_scale = 2.0 * std::numbers::pi * std::sqrt(n_bar + 1.0);
    const double step = series.tau[1] - series.tau[0];
    const std::size_t n_early = std::min(
        series.tau.size(), std::size_t(10.0 * tau_scale / step) + 1);

    const int half =
        std::max(1, int(std::lround(detrend_window / step / 2.0)));
    std::vector<double> x(series.n_mean.begin(),
                          series.n_mean.begin() + n_early);
    const std::vector<double> mean = rolling_mean(x, half);
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - mean[i];
    double r2 = 0.0;
    for (double v : r) r2 += v * v;
    if (r2 <= 0.0) return std::nullopt;

    const int lag_lo = std::max(1, int(0.25 * tau_scale / step));
    const int lag_hi =
        std::min(int(2.0 * tau_scale / step), int(r.size()) - 2);
    if (lag_hi <= lag_lo) return std::nullopt;
    double best = 0.0;
    int best_lag = -1;
    for (int lag = lag_lo; lag <= lag_hi; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i + lag < r.size(); ++i)
            acc += r[i] * r[i + lag];
        acc /= r2;
        if (acc > best) {
            best = acc;
            best_lag = lag;
        }
    }
    if (best_lag < 0) return std::nullopt;  // no positive correlation: aperiodic
    return best_lag * step;
}

}  // namespace detail

/// Collapse/revival report.
///
/// peak_list holds the envelope's local maxima above the prominence
/// threshold median + 1.5 * MAD.  tau_r_measured is the autocorrelation
/// period of the detrended early segment; the first envelope peak after
/// the collapse (first downward threshold crossing) is kept as a
/// diagnostic.  The super-revival flag is set when the envelope maximum
/// inside [0.5, 1.5] * tau_sr_predicted clears the quiet inter-revival
/// baseline, measured over [max(3 tau_r, 0.05), 0.2] * tau_sr_predicted,
/// by 1.5 * that region's MAD above its maximum.
inline RevivalReport detect_revivals(const ExcitationSeries& series,
                                     const DetectOptions& opts = {}) {
    RevivalReport rep;
    rep.n_bar = std::norm(series.alpha.alpha);
    rep.tau_r_predicted_scaled = 2.0 * std::numbers::pi * std::sqrt(rep.n_bar);
    rep.tau_r_predicted_rabi =
        series.params.omega > 0.0
            ? rep.tau_r_predicted_scaled * series.params.g / series.params.omega
            : 0.0;
    rep.envelope_window = opts.window;
    rep.envelope = extract_envelope(series, opts.window);

    const std::vector<double>& env = rep.envelope.value;
    rep.median_level = detail::median_of(env);
    rep.mad_level = detail::mad_of(env, rep.median_level);
    // relative floor keeps pure-roundoff ripples out of the peak list
    // while preserving scale equivariance
    const double env_max = *std::max_element(env.begin(), env.end());
    rep.threshold =
        std::max(rep.median_level + 1.5 * rep.mad_level, 1e-9 * env_max);

    for (int idx : detail::local_maxima(env))
        if (env[idx] > rep.threshold)
            rep.peak_list.push_back({rep.envelope.tau[idx], env[idx]});

    // Collapse: first downward crossing of the threshold; the next listed
    // peak is the classic "first revival of the envelope" diagnostic.
    bool was_above = false;
    std::optional<double> collapse_tau;
    for (std::size_t i = 0; i < env.size(); ++i) {
        if (env[i] > rep.threshold) {
            was_above = true;
        } else if (was_above) {
            collapse_tau = rep.envelope.tau[i];
            break;
        }
    }
    if (collapse_tau) {
        for (const Peak& pk : rep.peak_list)
            if (pk.tau > *collapse_tau) {
                rep.tau_r_first_envelope_peak = pk.tau;
                break;
            }
    }

    rep.tau_r_measured = detail::autocorr_revival_time(series, opts.window);

    if (rep.tau_r_measured) {
        const double pred = 4.0 * rep.n_bar * *rep.tau_r_measured;
        rep.tau_sr_predicted = pred;
        if (opts.detect_super) {
            if (series.tau.back() < 1.2 * pred) {
                if (opts.strict_span)
                    throw SeriesTooShort(
                        "detect_revivals: super-revival test needs tau up to " +
                        std::to_string(1.2 * pred));
            } else {
                rep.super_revival_evaluated = true;
                const double base_lo =
                    std::max(3.0 * *rep.tau_r_measured, 0.05 * pred);
                const double base_hi = 0.2 * pred;
                const double zone_lo = 0.5 * pred;
                const double zone_hi =
                    std::min(1.5 * pred, series.tau.back());
                std::vector<double> base;
                double base_max = 0.0;
                double zone_max = -1.0, zone_arg = 0.0;
                for (std::size_t i = 0; i < env.size(); ++i) {
                    const double t = rep.envelope.tau[i];
                    if (t >= base_lo && t <= base_hi) {
                        base.push_back(env[i]);
                        base_max = std::max(base_max, env[i]);
                    }
                    if (t >= zone_lo && t <= zone_hi && env[i] > zone_max) {
                        zone_max = env[i];
                        zone_arg = t;
                    }
                }
                if (!base.empty() && zone_max >= 0.0) {
                    const double base_med = detail::median_of(base);
                    const double base_mad = detail::mad_of(base, base_med);
                    rep.super_baseline = base_max + 1.5 * base_mad;
                    if (zone_max > rep.super_baseline) {
                        rep.super_revival_detected = true;
                        rep.tau_sr_measured = zone_arg;
                    }
                }
            }
        }
    } else if (opts.detect_super && opts.strict_span) {
        throw SeriesTooShort("detect_revivals: no revival period found");
    }
    return rep;
}

/// Span a series must reach before the super-revival test is meaningful.
inline double required_span_for_super(double n_bar, double tau_r) {
    return 1.2 * 4.0 * n_bar * tau_r;
}

}  // namespace iontrap

#endif
