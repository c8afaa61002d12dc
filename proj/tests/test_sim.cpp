#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hydrostart/rng.hpp"
#include "hydrostart/simulate.hpp"

using namespace hydrostart;

namespace {

// Two-stage oracle for bilinear interpolation: linear along omega at the two
// enclosing opening columns, then linear across opening.
double two_stage_lookup(const TorqueSurface& s, double omega, double o) {
    const double w = std::clamp(omega, s.omega_grid.front(), s.omega_grid.back());
    const double v = std::clamp(o, s.o_grid.front(), s.o_grid.back());
    size_t i = 0, j = 0;
    while (i + 2 < s.omega_grid.size() && s.omega_grid[i + 1] <= w) ++i;
    while (j + 2 < s.o_grid.size() && s.o_grid[j + 1] <= v) ++j;
    const double tw = (w - s.omega_grid[i]) / (s.omega_grid[i + 1] - s.omega_grid[i]);
    const double col0 = s.at(i, j) + tw * (s.at(i + 1, j) - s.at(i, j));
    const double col1 = s.at(i, j + 1) + tw * (s.at(i + 1, j + 1) - s.at(i, j + 1));
    const double tv = (v - s.o_grid[j]) / (s.o_grid[j + 1] - s.o_grid[j]);
    return col0 + tv * (col1 - col0);
}

TorqueSurface random_surface(Rng& rng, size_t n_w, size_t n_o) {
    TorqueSurface s;
    double acc = 0.0;
    for (size_t i = 0; i < n_w; ++i) {
        acc += 0.1 + rng.uniform();
        s.omega_grid.push_back(acc);
    }
    acc = 0.0;
    for (size_t j = 0; j < n_o; ++j) {
        acc += 0.1 + rng.uniform();
        s.o_grid.push_back(acc);
    }
    s.torque.resize(n_w * n_o);
    for (auto& t : s.torque) t = rng.uniform(-5.0, 5.0);
    return s;
}

}  // namespace

TEST_CASE("torque lookup reproduces node values exactly") {
    Rng rng(11);
    auto s = random_surface(rng, 6, 5);
    for (size_t i = 0; i < s.omega_grid.size(); ++i)
        for (size_t j = 0; j < s.o_grid.size(); ++j)
            REQUIRE(torque_lookup(s, s.omega_grid[i], s.o_grid[j]) == s.at(i, j));
}

TEST_CASE("bilinear midpoint equals corner mean") {
    TorqueSurface s;
    s.omega_grid = {0.0, 1.0};
    s.o_grid = {0.0, 1.0};
    s.torque = {0.0, 0.0, 0.0, 4.0};
    REQUIRE(torque_lookup(s, 0.5, 0.5) == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("bilinear matches two-stage oracle on random 5x5 surface") {
    Rng rng(13);
    auto s = random_surface(rng, 5, 5);
    for (int q = 0; q < 100; ++q) {
        const double w = rng.uniform(s.omega_grid.front() - 0.5, s.omega_grid.back() + 0.5);
        const double o = rng.uniform(s.o_grid.front() - 0.5, s.o_grid.back() + 0.5);
        REQUIRE(torque_lookup(s, w, o) ==
                Catch::Approx(two_stage_lookup(s, w, o)).margin(1e-12));
    }
}

TEST_CASE("out-of-box queries clamp to the edge") {
    Rng rng(17);
    auto s = random_surface(rng, 4, 4);
    REQUIRE(torque_lookup(s, -100.0, -100.0) == s.at(0, 0));
    REQUIRE(torque_lookup(s, 1e9, 1e9) == s.at(3, 3));
}

TEST_CASE("non-increasing grid rejected") {
    TorqueSurface s;
    s.omega_grid = {0.0, 1.0, 1.0};
    s.o_grid = {0.0, 1.0};
    s.torque.assign(6, 0.0);
    REQUIRE_THROWS_AS(torque_lookup(s, 0.5, 0.5), InvalidSurface);
}

TEST_CASE("surface csv round trip") {
    auto s = make_synthetic_surface();
    const auto path = std::filesystem::temp_directory_path() / "hydrostart_surface.csv";
    save_surface_csv(s, path.string());
    auto back = load_surface_csv(path.string());
    std::filesystem::remove(path);
    REQUIRE(back.omega_grid.size() == s.omega_grid.size());
    REQUIRE(back.o_grid.size() == s.o_grid.size());
    for (size_t i = 0; i < s.torque.size(); ++i)
        REQUIRE(back.torque[i] == Catch::Approx(s.torque[i]).epsilon(1e-12));
}

TEST_CASE("default surface satisfies the physical invariants") {
    auto s = make_synthetic_surface();
    validate(s);
    // torque non-increasing in omega at fixed opening
    for (size_t j = 0; j < s.o_grid.size(); ++j)
        for (size_t i = 1; i < s.omega_grid.size(); ++i)
            REQUIRE(s.at(i, j) <= s.at(i - 1, j));
    // torque non-decreasing in opening at fixed speed
    for (size_t i = 0; i < s.omega_grid.size(); ++i)
        for (size_t j = 1; j < s.o_grid.size(); ++j)
            REQUIRE(s.at(i, j) >= s.at(i, j - 1));
    // every positive opening has an equilibrium speed inside the grid
    for (size_t j = 1; j < s.o_grid.size(); ++j) {
        REQUIRE(s.at(0, j) > 0.0);
        REQUIRE(s.at(s.omega_grid.size() - 1, j) < 0.0);
    }
}

TEST_CASE("governor ramp step") {
    GovernorConfig gc;
    StartupParams p{0.10, 0.24, 0.97, 0.15};
    GovernorState g;
    g = setpoint_phase_step(g, p, gc, 0.0, 0.1);
    REQUIRE(g.u == Catch::Approx(0.01).margin(1e-15));
    REQUIRE(g.phase == GovernorPhase::RampUp);
}

TEST_CASE("plateau1 advances at the trigger speed") {
    GovernorConfig gc;
    StartupParams p{0.10, 0.24, 0.97, 0.15};
    GovernorState g;
    g.phase = GovernorPhase::Plateau1;
    g.u = 0.24;
    g = setpoint_phase_step(g, p, gc, 0.96, 0.1);
    REQUIRE(g.phase == GovernorPhase::Plateau1);
    REQUIRE(g.u == 0.24);
    g = setpoint_phase_step(g, p, gc, 0.97, 0.1);
    REQUIRE(g.phase == GovernorPhase::Plateau2);
    REQUIRE(g.u == 0.15);
}

TEST_CASE("plateau2 hands over to feedback at synchronous speed") {
    GovernorConfig gc;
    StartupParams p{0.10, 0.24, 0.97, 0.21};
    GovernorState g;
    g.phase = GovernorPhase::Plateau2;
    g.u = 0.21;
    g = setpoint_phase_step(g, p, gc, 0.999, 0.1);
    REQUIRE(g.phase == GovernorPhase::Plateau2);
    g = setpoint_phase_step(g, p, gc, 1.0, 0.1);
    REQUIRE(g.phase == GovernorPhase::Feedback);
}

TEST_CASE("feedback output stays inside the actuator range") {
    GovernorConfig gc;
    StartupParams p{0.10, 0.24, 0.97, 0.15};
    GovernorState g;
    g.phase = GovernorPhase::Feedback;
    for (double omega : {0.5, 0.9, 1.0, 1.1, 2.0}) {
        g = setpoint_phase_step(g, p, gc, omega, 0.1);
        REQUIRE(g.u >= 0.0);
        REQUIRE(g.u <= 1.0);
    }
}

TEST_CASE("dynamics rhs basics") {
    auto surf = make_synthetic_surface();
    GovernorConfig gc;
    PlantPhysics ph;
    // servo fixed point
    auto d = dynamics_rhs(0.5, 0.3, 0.3, gc, ph, surf);
    REQUIRE(d.do_dt == 0.0);
    // doubling inertia halves acceleration
    PlantPhysics ph2 = ph;
    ph2.inertia_j *= 2.0;
    auto d1 = dynamics_rhs(0.4, 0.3, 0.3, gc, ph, surf);
    auto d2 = dynamics_rhs(0.4, 0.3, 0.3, gc, ph2, surf);
    REQUIRE(d2.domega_dt == Catch::Approx(0.5 * d1.domega_dt).epsilon(1e-15));
    // servo slew limit
    auto d3 = dynamics_rhs(0.0, 0.0, 1.0, gc, ph, surf);
    REQUIRE(d3.do_dt == gc.servo_rate_limit);
}

TEST_CASE("zero net torque gives zero acceleration") {
    // bracket the equilibrium speed for a fixed opening, then query the rhs there
    auto surf = make_synthetic_surface();
    GovernorConfig gc;
    PlantPhysics ph;
    const double o = 0.3;
    double lo = 0.0, hi = surf.omega_grid.back();
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (torque_lookup(surf, mid, o) > 0.0 ? lo : hi) = mid;
    }
    auto d = dynamics_rhs(0.5 * (lo + hi), o, o, gc, ph, surf);
    REQUIRE(std::abs(d.domega_dt) < 1e-12);
}

TEST_CASE("zero-opening startup times out at exactly 2 T_st") {
    GovernorConfig gc;
    PlantPhysics ph;
    auto surf = make_synthetic_surface();
    auto tr = simulate_startup({0.05, 0.0, 0.5, 0.0}, gc, ph, surf);
    REQUIRE_FALSE(tr.synchronized);
    REQUIRE_FALSE(tr.t_st.has_value());
    REQUIRE(tr.duration() == Catch::Approx(2.0 * ph.t_st_max).margin(1e-12));
    for (const auto& s : tr.samples) {
        REQUIRE(s.omega == 0.0);
        REQUIRE(s.o == 0.0);
    }
}

TEST_CASE("standard startup synchronizes in the calibrated window") {
    GovernorConfig gc;
    PlantPhysics ph;
    auto surf = make_synthetic_surface();
    auto tr = simulate_startup(standard_startup(), gc, ph, surf);
    REQUIRE(tr.synchronized);
    REQUIRE(*tr.t_st > 45.0);
    REQUIRE(*tr.t_st < 60.0);
    REQUIRE(std::abs(tr.samples.back().omega - 1.0) <= gc.sync_speed_tol);
    REQUIRE(tr.samples.size() == static_cast<size_t>(*tr.t_st * gc.f_d) + 1);
}

TEST_CASE("slowest admissible startup violates the 90 s constraint") {
    GovernorConfig gc;
    PlantPhysics ph;
    auto surf = make_synthetic_surface();
    auto tr = simulate_startup({0.01, 0.15, 0.80, 0.15}, gc, ph, surf);
    REQUIRE(tr.t_st_or(ph.t_st_max) > ph.t_st_max);
}

TEST_CASE("simulation is bit-deterministic") {
    GovernorConfig gc;
    PlantPhysics ph;
    auto surf = make_synthetic_surface();
    auto a = simulate_startup({0.03, 0.2, 0.6, 0.18}, gc, ph, surf);
    auto b = simulate_startup({0.03, 0.2, 0.6, 0.18}, gc, ph, surf);
    REQUIRE(a.samples.size() == b.samples.size());
    for (size_t i = 0; i < a.samples.size(); ++i) {
        REQUIRE(a.samples[i].omega == b.samples[i].omega);
        REQUIRE(a.samples[i].o == b.samples[i].o);
    }
}

TEST_CASE("speed is non-decreasing before feedback and opening obeys limits") {
    GovernorConfig gc;
    PlantPhysics ph;
    auto surf = make_synthetic_surface();
    for (auto p : {StartupParams{0.10, 0.24, 0.97, 0.15}, StartupParams{0.025, 0.34, 0.8, 0.34},
                   StartupParams{0.01, 0.15, 0.37, 0.21}}) {
        auto tr = simulate_startup(p, gc, ph, surf);
        size_t first_sync = tr.samples.size();
        for (size_t i = 0; i < tr.samples.size(); ++i)
            if (tr.samples[i].omega >= 1.0) {
                first_sync = i;
                break;
            }
        for (size_t i = 1; i < tr.samples.size(); ++i) {
            if (i <= first_sync) REQUIRE(tr.samples[i].omega >= tr.samples[i - 1].omega);
            REQUIRE(tr.samples[i].o >= 0.0);
            REQUIRE(tr.samples[i].o <= 1.0);
            REQUIRE(std::abs(tr.samples[i].o - tr.samples[i - 1].o) <=
                    gc.servo_rate_limit / gc.f_d + 1e-12);
        }
    }
}

TEST_CASE("raising the initial opening never slows the startup") {
    GovernorConfig gc;
    PlantPhysics ph;
    auto surf = make_synthetic_surface();
    for (double ro : {0.02, 0.1}) {
        double prev = 1e18;
        for (double oini = 0.12; oini <= 0.35; oini += 0.055) {
            auto tr = simulate_startup({ro, oini, 0.8, 0.15}, gc, ph, surf);
            const double t = tr.t_st_or(ph.t_st_max);
            REQUIRE(t <= prev + 1e-9);
            prev = t;
        }
    }
}

TEST_CASE("rk4 reaches fourth order on the scalar relaxation problem") {
    // d omega/dt = a (1 - omega), exact solution 1 - exp(-a t)
    const double a = 0.7;
    auto rhs = [a](const std::array<double, 1>& y) -> std::array<double, 1> {
        return {a * (1.0 - y[0])};
    };
    auto global_error = [&](double h) {
        std::array<double, 1> y{0.0};
        const int n = static_cast<int>(std::llround(10.0 / h));
        for (int i = 0; i < n; ++i) y = rk4_step<1>(y, h, rhs);
        return std::abs(y[0] - (1.0 - std::exp(-a * 10.0)));
    };
    double prev = global_error(0.1);
    for (double h : {0.05, 0.025}) {
        const double err = global_error(h);
        const double factor = prev / err;
        REQUIRE(factor > 12.0);
        REQUIRE(factor < 20.0);
        prev = err;
    }
}

TEST_CASE("step-halving on a smooth plateau segment converges at order 4") {
    // Constant setpoint, servo out of its slew limit, and a torque law that
    // is globally bilinear so the gridded lookup introduces no cell kinks:
    // the dynamics along the path are smooth and RK4 shows its full order.
    TorqueSurface surf;
    surf.omega_grid = {0.0, 3.0};
    surf.o_grid = {0.0, 1.0};
    const double t_ref = 5.1e6, k = 0.30;
    auto torque = [&](double w, double o) { return t_ref * (o - k * w * (0.3 + o)); };
    surf.torque = {torque(0, 0), torque(0, 1), torque(3, 0), torque(3, 1)};

    GovernorConfig gc;
    PlantPhysics ph;
    const double u = 0.24;
    auto rhs = [&](const std::array<double, 2>& q) -> std::array<double, 2> {
        const auto d = dynamics_rhs(q[0], q[1], u, gc, ph, surf);
        return {d.domega_dt, d.do_dt};
    };
    auto run = [&](double h) {
        std::array<double, 2> q{0.0, 0.11};  // (u - o)/tau < rate limit from the start
        const int n = static_cast<int>(std::llround(20.0 / h));
        std::vector<double> omega_at_coarse;
        const int stride = static_cast<int>(std::llround(0.1 / h));
        for (int i = 0; i < n; ++i) {
            q = rk4_step<2>(q, h, rhs);
            if ((i + 1) % stride == 0) omega_at_coarse.push_back(q[0]);
        }
        return omega_at_coarse;
    };
    auto reference = run(0.1 / 128.0);
    auto err = [&](double h) {
        auto traj = run(h);
        double e = 0.0;
        for (size_t i = 0; i < traj.size(); ++i) e = std::max(e, std::abs(traj[i] - reference[i]));
        return e;
    };
    double prev = err(0.1);
    for (double h : {0.05, 0.025}) {
        const double e = err(h);
        const double factor = prev / e;
        REQUIRE(factor > 12.0);
        REQUIRE(factor < 20.0);
        prev = e;
    }
}
