#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "hydrostart/governor.hpp"
#include "hydrostart/params.hpp"
#include "hydrostart/torque.hpp"

namespace hydrostart {

struct PlantPhysics {
    double inertia_j = 1.1e6;    // kg*m^2, total rotating inertia
    double omega_s = 31.41592653589793;  // rad/s, synchronous speed (normalization only)
    double t_st_max = 90.0;      // s, startup time constraint T_st
};

inline void validate(const PlantPhysics& p) {
    if (!(p.inertia_j > 0.0) || !(p.omega_s > 0.0) || !(p.t_st_max > 0.0))
        throw ValidationError("plant physics values must be strictly positive");
}

struct DynSample {
    double omega;  // fraction of synchronous speed
    double o;      // guide vane opening fraction
    double u;      // setpoint active on the interval starting at this sample
};

/// Dynamic trajectory tau_D at frequency f_D. If the startup synchronized,
/// t_st is the time at which the synchronization hold began and samples run
/// up to that instant; otherwise samples cover exactly [0, 2 T_st].
struct DynamicTrajectory {
    std::vector<DynSample> samples;
    double f_d = 10.0;
    std::optional<double> t_st;  // empty on timeout
    bool synchronized = false;

    double duration() const {
        return static_cast<double>(samples.size() - 1) / f_d;
    }
    // Timeout evaluates as 2 T_st for cost purposes.
    double t_st_or(double t_st_limit) const { return t_st ? *t_st : 2.0 * t_st_limit; }
};

struct RateOfChange {
    double domega_dt;
    double do_dt;
};

/// Torque balance and servo lag. omega is normalized, so the equation of
/// motion divides the interpolated torque by J * omega_S; the vanes track
/// the setpoint through a slew-limited first-order lag.
inline RateOfChange dynamics_rhs(double omega, double o, double u, const GovernorConfig& config,
                                 const PlantPhysics& physics, const TorqueSurface& surface) {
    const double w = std::clamp(omega, surface.omega_grid.front(), surface.omega_grid.back());
    const double v = std::clamp(o, surface.o_grid.front(), surface.o_grid.back());
    const double torque = torque_lookup_fast(surface, w, v);
    const double domega = torque / (physics.inertia_j * physics.omega_s);
    const double lag = (u - o) / config.servo_time_constant;
    const double do_dt = std::clamp(lag, -config.servo_rate_limit, config.servo_rate_limit);
    return {domega, do_dt};
}

/// One classical fourth-order Runge-Kutta step of an autonomous system.
template <size_t N, typename Rhs>
std::array<double, N> rk4_step(const std::array<double, N>& y, double h, Rhs&& rhs) {
    const auto k1 = rhs(y);
    std::array<double, N> tmp;
    for (size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    const auto k2 = rhs(tmp);
    for (size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    const auto k3 = rhs(tmp);
    for (size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * k3[i];
    const auto k4 = rhs(tmp);
    std::array<double, N> out;
    for (size_t i = 0; i < N; ++i)
        out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

/// Simulates one startup from standstill with fixed-step RK4 at 1/f_D.
///
/// The setpoint u is recomputed once per step from the sampled speed and held
/// constant across the step, so the Plateau2 discontinuity always falls on a
/// step boundary. The run stops once |omega - 1| <= sync_speed_tol and
/// |domega/dt| <= sync_accel_tol have held for sync_hold seconds, or at
/// simulated time 2 T_st, whichever comes first.
inline DynamicTrajectory simulate_startup(const StartupParams& params,
                                          const GovernorConfig& config,
                                          const PlantPhysics& physics,
                                          const TorqueSurface& surface) {
    validate(params);
    validate(config);
    validate(physics);
    validate(surface);

    const double h = 1.0 / config.f_d;
    const size_t max_steps = static_cast<size_t>(std::llround(2.0 * physics.t_st_max * config.f_d));
    const size_t hold_steps = static_cast<size_t>(std::llround(config.sync_hold * config.f_d));

    DynamicTrajectory traj;
    traj.f_d = config.f_d;
    traj.samples.reserve(max_steps + 1);

    GovernorState gov;
    double omega = 0.0, o = 0.0;
    traj.samples.push_back({omega, o, gov.u});

    // index of the first sample of the current synchronization hold window
    std::optional<size_t> hold_start;

    for (size_t n = 0; n < max_steps; ++n) {
        gov = setpoint_phase_step(gov, params, config, omega, h);
        const double u = gov.u;

        const auto state = rk4_step<2>(
            {omega, o}, h, [&](const std::array<double, 2>& q) -> std::array<double, 2> {
                const auto d = dynamics_rhs(q[0], q[1], u, config, physics, surface);
                return {d.domega_dt, d.do_dt};
            });
        omega = std::max(state[0], 0.0);
        o = std::clamp(state[1], 0.0, 1.0);
        if (!std::isfinite(omega) || !std::isfinite(o))
            throw NonFiniteState("simulate_startup: state became non-finite");

        traj.samples.push_back({omega, o, u});
        const size_t idx = traj.samples.size() - 1;

        const auto d = dynamics_rhs(omega, o, u, config, physics, surface);
        const bool in_tol = std::abs(omega - 1.0) <= config.sync_speed_tol &&
                            std::abs(d.domega_dt) <= config.sync_accel_tol;
        if (in_tol) {
            if (!hold_start) hold_start = idx;
            if (idx - *hold_start >= hold_steps) {
                traj.samples.resize(*hold_start + 1);
                traj.synchronized = true;
                traj.t_st = static_cast<double>(*hold_start) / config.f_d;
                return traj;
            }
        } else {
            hold_start.reset();
        }
    }
    traj.synchronized = false;
    traj.t_st.reset();
    return traj;
}

}  // namespace hydrostart
