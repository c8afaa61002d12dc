#pragma once

#include <algorithm>
#include <cmath>

#include "hydrostart/errors.hpp"
#include "hydrostart/params.hpp"

namespace hydrostart {

/// Speed-governor configuration. The guide vanes track the setpoint through
/// a first-order servo lag with a slew limit; the feedback phase runs a
/// sampled PID on the normalized speed error.
struct GovernorConfig {
    double servo_time_constant = 1.5;  // s
    double servo_rate_limit = 0.10;    // fraction of full opening per second
    double pid_kp = 3.0;
    double pid_ki = 0.5;
    double pid_kd = 0.0;
    double sync_speed_tol = 0.005;   // fraction of synchronous speed
    double sync_accel_tol = 0.002;   // fraction of synchronous speed per second
    double sync_hold = 2.0;          // seconds inside tolerance before declaring sync
    double f_d = 10.0;               // dynamic trajectory sampling rate, Hz
};

inline void validate(const GovernorConfig& c) {
    const double v[] = {c.servo_time_constant, c.servo_rate_limit, c.pid_kp, c.pid_ki,
                        c.sync_speed_tol,      c.sync_accel_tol,   c.sync_hold, c.f_d};
    for (double x : v)
        if (!std::isfinite(x) || x <= 0.0) {
            if (&x - v == 3 && x == 0.0) continue;  // ki may be zero
            throw ValidationError("governor config values must be finite and positive");
        }
    if (c.pid_kd < 0.0 || !std::isfinite(c.pid_kd))
        throw ValidationError("pid_kd must be finite and >= 0");
    if (c.sync_hold < 1.0 / c.f_d)
        throw ValidationError("sync_hold must cover at least one sample period");
}

enum class GovernorPhase { RampUp, Plateau1, Plateau2, Feedback };

inline const char* to_string(GovernorPhase p) {
    switch (p) {
        case GovernorPhase::RampUp: return "ramp_up";
        case GovernorPhase::Plateau1: return "plateau1";
        case GovernorPhase::Plateau2: return "plateau2";
        case GovernorPhase::Feedback: return "feedback";
    }
    return "?";
}

/// Setpoint-generator state. Phase transitions are monotone
/// RampUp -> Plateau1 -> Plateau2 -> Feedback.
struct GovernorState {
    GovernorPhase phase = GovernorPhase::RampUp;
    double u = 0.0;              // guide vane setpoint, fraction of full opening
    double pid_integrator = 0.0;
    double prev_error = 0.0;
    double hold_timer = 0.0;     // seconds spent inside the synchronization tolerance
};

/// Advances the setpoint generator by one sample period dt.
///
/// RampUp: u climbs at opening_rate until it reaches initial_opening.
/// Plateau1: u holds at initial_opening until omega reaches trigger_speed.
/// Plateau2: u steps (up or down) to trigger_opening until omega reaches 1.
/// Feedback: sampled PID drives omega back to 1, u clamped to [0, 1].
///
/// The setpoint is piecewise constant between samples, so the Plateau2 step
/// lands exactly on a sample boundary and the RK4 integrator never straddles
/// the discontinuity.
inline GovernorState setpoint_phase_step(GovernorState state, const StartupParams& params,
                                         const GovernorConfig& config, double omega, double dt) {
    if (!(dt > 0.0)) throw ValidationError("setpoint_phase_step: dt must be > 0");
    switch (state.phase) {
        case GovernorPhase::RampUp:
            state.u = std::min(state.u + params.opening_rate * dt, params.initial_opening);
            if (state.u >= params.initial_opening) {
                state.u = params.initial_opening;
                state.phase = GovernorPhase::Plateau1;
            }
            if (state.phase != GovernorPhase::Plateau1) break;
            [[fallthrough]];  // an empty ramp (u already at o_ini) checks the trigger immediately
        case GovernorPhase::Plateau1:
            state.u = params.initial_opening;
            if (omega >= params.trigger_speed) {
                state.phase = GovernorPhase::Plateau2;
                state.u = params.trigger_opening;
            }
            break;
        case GovernorPhase::Plateau2:
            state.u = params.trigger_opening;
            if (omega >= 1.0) {
                state.phase = GovernorPhase::Feedback;
                // the PID takes over from the trigger opening; seed the
                // integrator so the control signal is continuous at handover
                state.prev_error = 1.0 - omega;
                state.pid_integrator =
                    config.pid_ki > 0.0 ? params.trigger_opening / config.pid_ki : 0.0;
            }
            break;
        case GovernorPhase::Feedback: {
            const double error = 1.0 - omega;
            state.pid_integrator += error * dt;
            // anti-windup: keep the integral contribution inside the actuator range
            if (config.pid_ki > 0.0) {
                state.pid_integrator =
                    std::clamp(state.pid_integrator, -1.0 / config.pid_ki, 1.0 / config.pid_ki);
            }
            const double derivative = (error - state.prev_error) / dt;
            state.prev_error = error;
            const double raw = config.pid_kp * error + config.pid_ki * state.pid_integrator +
                               config.pid_kd * derivative;
            state.u = std::clamp(raw, 0.0, 1.0);
            break;
        }
    }
    state.u = std::clamp(state.u, 0.0, 1.0);
    return state;
}

}  // namespace hydrostart
