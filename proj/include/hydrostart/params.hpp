#pragma once

#include <array>
#include <cmath>
#include <string>

#include "hydrostart/errors.hpp"

namespace hydrostart {

/// The four tunable governor parameters shaping a startup sequence.
/// All fields are normalized: opening_rate is fraction of full opening per
/// second, openings are fractions of full opening, trigger_speed is a
/// fraction of synchronous speed.
struct StartupParams {
    double opening_rate = 0.0;   // r_o
    double initial_opening = 0.0;  // o_ini
    double trigger_speed = 0.0;  // omega_trigger
    double trigger_opening = 0.0;  // o_trigger

    std::array<double, 4> as_array() const {
        return {opening_rate, initial_opening, trigger_speed, trigger_opening};
    }

    static StartupParams from_array(const std::array<double, 4>& a) {
        return {a[0], a[1], a[2], a[3]};
    }

    bool operator==(const StartupParams& o) const {
        return opening_rate == o.opening_rate && initial_opening == o.initial_opening &&
               trigger_speed == o.trigger_speed && trigger_opening == o.trigger_opening;
    }
};

inline void validate(const StartupParams& p) {
    const auto a = p.as_array();
    for (double v : a)
        if (!std::isfinite(v) || v < 0.0)
            throw ValidationError("startup params must be finite and >= 0");
    if (p.initial_opening > 1.0 || p.trigger_opening > 1.0 || p.trigger_speed > 1.0)
        throw ValidationError("normalized startup params must be <= 1");
}

inline std::string to_string(const StartupParams& p) {
    return "(r_o=" + std::to_string(p.opening_rate) + "/s, o_ini=" +
           std::to_string(p.initial_opening) + ", w_trig=" + std::to_string(p.trigger_speed) +
           ", o_trig=" + std::to_string(p.trigger_opening) + ")";
}

/// The plant's usual startup parameterization (fast ramp, 24% initial
/// opening, late trigger down to 15%). Used as the first entry of the
/// default initial schedule and as the reference point for reported
/// strain reductions.
inline StartupParams standard_startup() { return {0.10, 0.24, 0.97, 0.15}; }

}  // namespace hydrostart
