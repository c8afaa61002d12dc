#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "hydrostart/csv.hpp"
#include "hydrostart/errors.hpp"
#include "hydrostart/params.hpp"

namespace hydrostart {

/// Measured trajectory tau_M: speed, opening and strain sampled uniformly at
/// f_M during one startup. Strains are in normalized units throughout.
struct MeasuredSample {
    double omega;
    double o;
    double s;
};

struct MeasuredTrajectory {
    std::vector<MeasuredSample> samples;
    double f_m = 500.0;
    double t_st = 0.0;  // (samples.size() - 1) / f_m
    StartupParams params;
};

inline void validate(const MeasuredTrajectory& t) {
    if (t.samples.empty()) throw ValidationError("measured trajectory has no samples");
    if (!(t.f_m > 0.0)) throw ValidationError("measured trajectory rate must be positive");
    for (const auto& s : t.samples)
        if (!std::isfinite(s.omega) || !std::isfinite(s.o) || !std::isfinite(s.s))
            throw ValidationError("measured trajectory contains non-finite samples");
    const double expected = static_cast<double>(t.samples.size() - 1) / t.f_m;
    if (std::abs(t.t_st - expected) > 0.5 / t.f_m)
        throw ValidationError("measured trajectory length does not match t_st");
}

/// Enveloped trajectory tau_e: upper/lower strain bounds at f_e.
struct EnvelopedSample {
    double omega;
    double o;
    double s_u;
    double s_l;
};

struct EnvelopedTrajectory {
    std::vector<EnvelopedSample> samples;
    double f_e = 10.0;
    size_t window_w = 0;  // envelope window in source steps
};

/// Sliding-window envelope: for each n the upper/lower bound over source
/// indices [n - ceil(w/2), n + floor(w/2)], truncated at the signal edges.
/// Monotonic-deque implementation, O(n) total.
inline std::pair<std::vector<double>, std::vector<double>> compute_envelope(
    const std::vector<double>& signal, size_t w) {
    if (signal.empty()) throw EmptySignal("compute_envelope: empty signal");
    if (w < 1) throw ValidationError("compute_envelope: window must be >= 1");
    const size_t n = signal.size();
    const size_t back = (w + 1) / 2;  // ceil(w/2) indices behind
    const size_t fwd = w / 2;         // floor(w/2) indices ahead
    std::vector<double> upper(n), lower(n);

    std::deque<size_t> maxq, minq;  // indices; values decreasing / increasing
    size_t pushed = 0;
    for (size_t i = 0; i < n; ++i) {
        const size_t hi = std::min(i + fwd, n - 1);
        for (; pushed <= hi; ++pushed) {
            while (!maxq.empty() && signal[maxq.back()] <= signal[pushed]) maxq.pop_back();
            maxq.push_back(pushed);
            while (!minq.empty() && signal[minq.back()] >= signal[pushed]) minq.pop_back();
            minq.push_back(pushed);
        }
        const size_t lo = i >= back ? i - back : 0;
        while (maxq.front() < lo) maxq.pop_front();
        while (minq.front() < lo) minq.pop_front();
        upper[i] = signal[maxq.front()];
        lower[i] = signal[minq.front()];
    }
    return {std::move(upper), std::move(lower)};
}

/// Decimates an envelope from f_m to f_e by blocks of stride f_m / f_e:
/// block max of the upper bound, block min of the lower bound, block-start
/// values of omega and o. Keeps the global extremes exactly.
inline EnvelopedTrajectory downsample_envelope(const std::vector<double>& upper,
                                               const std::vector<double>& lower,
                                               const std::vector<double>& omega,
                                               const std::vector<double>& o, double f_m,
                                               double f_e, size_t window_w = 0) {
    if (upper.empty() || upper.size() != lower.size() || upper.size() != omega.size() ||
        upper.size() != o.size())
        throw ValidationError("downsample_envelope: sequence length mismatch");
    if (!(f_m > 0.0) || !(f_e > 0.0) || f_e > f_m)
        throw IncompatibleRates("downsample_envelope: need 0 < f_e <= f_m");
    const double ratio = f_m / f_e;
    const size_t stride = static_cast<size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(stride)) > 1e-9)
        throw IncompatibleRates("downsample_envelope: f_e must divide f_m");

    EnvelopedTrajectory out;
    out.f_e = f_e;
    out.window_w = window_w;
    const size_t n = upper.size();
    for (size_t b = 0; b < n; b += stride) {
        const size_t end = std::min(b + stride, n);
        double u = upper[b], l = lower[b];
        for (size_t i = b + 1; i < end; ++i) {
            u = std::max(u, upper[i]);
            l = std::min(l, lower[i]);
        }
        out.samples.push_back({omega[b], o[b], u, l});
    }
    return out;
}

/// Envelope + decimation of a measured trajectory in one call.
inline EnvelopedTrajectory envelope_trajectory(const MeasuredTrajectory& traj, double window_s,
                                               double f_e) {
    validate(traj);
    const size_t w = std::max<size_t>(1, static_cast<size_t>(std::llround(window_s * traj.f_m)));
    std::vector<double> s(traj.samples.size()), omega(traj.samples.size()), o(traj.samples.size());
    for (size_t i = 0; i < traj.samples.size(); ++i) {
        s[i] = traj.samples[i].s;
        omega[i] = traj.samples[i].omega;
        o[i] = traj.samples[i].o;
    }
    auto [upper, lower] = compute_envelope(s, w);
    return downsample_envelope(upper, lower, omega, o, traj.f_m, f_e, w);
}

/// Amplitude of the largest strain cycle: max - min over the whole startup.
inline double largest_cycle(const MeasuredTrajectory& traj) {
    if (traj.samples.empty()) throw ValidationError("largest_cycle: empty trajectory");
    double mx = traj.samples[0].s, mn = traj.samples[0].s;
    for (const auto& smp : traj.samples) {
        mx = std::max(mx, smp.s);
        mn = std::min(mn, smp.s);
    }
    return mx - mn;
}

/// Envelope form of the same quantity; equal to the measured value exactly.
inline double largest_cycle(const EnvelopedTrajectory& traj) {
    if (traj.samples.empty()) throw ValidationError("largest_cycle: empty trajectory");
    double mx = traj.samples[0].s_u, mn = traj.samples[0].s_l;
    for (const auto& smp : traj.samples) {
        mx = std::max(mx, smp.s_u);
        mn = std::min(mn, smp.s_l);
    }
    return mx - mn;
}

/// Decimates a raw measurement (e.g. 5000 Hz) down to f_m. Strain keeps the
/// per-block sample farthest from the signal's global midrange so both
/// global extremes survive; omega and o take the block-start sample.
inline MeasuredTrajectory resample_measured(const MeasuredTrajectory& raw, double f_m) {
    validate(raw);
    if (raw.f_m == f_m) return raw;
    const double ratio = raw.f_m / f_m;
    const size_t stride = static_cast<size_t>(std::llround(ratio));
    if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9)
        throw IncompatibleRates("resample_measured: f_m must divide the raw rate");

    double mx = raw.samples[0].s, mn = raw.samples[0].s;
    for (const auto& smp : raw.samples) {
        mx = std::max(mx, smp.s);
        mn = std::min(mn, smp.s);
    }
    const double midrange = 0.5 * (mx + mn);

    MeasuredTrajectory out;
    out.f_m = f_m;
    out.params = raw.params;
    const size_t n = raw.samples.size();
    for (size_t b = 0; b < n; b += stride) {
        const size_t end = std::min(b + stride, n);
        double s = raw.samples[b].s;
        for (size_t i = b + 1; i < end; ++i)
            if (std::abs(raw.samples[i].s - midrange) > std::abs(s - midrange))
                s = raw.samples[i].s;
        out.samples.push_back({raw.samples[b].omega, raw.samples[b].o, s});
    }
    out.t_st = static_cast<double>(out.samples.size() - 1) / f_m;
    return out;
}

/// CSV format: time_s, omega, opening, strain with a header row. Ingestion
/// resamples to f_m when the file carries a higher rate.
inline MeasuredTrajectory load_measured_csv(const std::string& path, double f_m) {
    auto t = csv::read(path);
    const size_t ct = t.col("time_s"), cw = t.col("omega"), co = t.col("opening"),
                 cs = t.col("strain");
    if (t.rows.size() < 2) throw ValidationError("measured trajectory needs >= 2 rows");

    MeasuredTrajectory raw;
    const double dt = t.rows[1][ct] - t.rows[0][ct];
    if (!(dt > 0.0)) throw ValidationError("time column must be increasing");
    raw.f_m = 1.0 / dt;
    for (size_t i = 0; i < t.rows.size(); ++i) {
        const double expected = t.rows[0][ct] + static_cast<double>(i) * dt;
        if (std::abs(t.rows[i][ct] - expected) > 0.25 * dt)
            throw ValidationError("measured trajectory is not uniformly sampled");
        raw.samples.push_back({t.rows[i][cw], t.rows[i][co], t.rows[i][cs]});
    }
    raw.t_st = static_cast<double>(raw.samples.size() - 1) / raw.f_m;
    validate(raw);
    // snap near-integer rates (500.000002 from float time stamps)
    if (std::abs(raw.f_m - std::round(raw.f_m)) < 1e-3) raw.f_m = std::round(raw.f_m);
    raw.t_st = static_cast<double>(raw.samples.size() - 1) / raw.f_m;
    return resample_measured(raw, f_m);
}

inline void save_measured_csv(const MeasuredTrajectory& traj, const std::string& path) {
    csv::Writer w(path);
    w.header({"time_s", "omega", "opening", "strain"});
    for (size_t i = 0; i < traj.samples.size(); ++i) {
        const auto& s = traj.samples[i];
        w.row({static_cast<double>(i) / traj.f_m, s.omega, s.o, s.s});
    }
    w.close();
}

}  // namespace hydrostart
