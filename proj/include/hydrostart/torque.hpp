#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hydrostart/csv.hpp"
#include "hydrostart/errors.hpp"

namespace hydrostart {

/// Quasi-static net mechanical torque map T(omega, o) in N*m, sampled on a
/// rectangular grid. Speeds are fractions of synchronous speed, openings
/// fractions of full opening. Queries outside the grid clamp to the box edge.
struct TorqueSurface {
    std::vector<double> omega_grid;  // strictly increasing
    std::vector<double> o_grid;      // strictly increasing
    std::vector<double> torque;      // row-major [omega][o]

    double at(size_t i_omega, size_t i_o) const { return torque[i_omega * o_grid.size() + i_o]; }
    double& at(size_t i_omega, size_t i_o) { return torque[i_omega * o_grid.size() + i_o]; }
};

inline void validate(const TorqueSurface& s) {
    if (s.omega_grid.size() < 2 || s.o_grid.size() < 2)
        throw InvalidSurface("torque surface needs at least a 2x2 grid");
    if (s.torque.size() != s.omega_grid.size() * s.o_grid.size())
        throw InvalidSurface("torque matrix dimensions do not match grids");
    for (size_t i = 1; i < s.omega_grid.size(); ++i)
        if (!(s.omega_grid[i] > s.omega_grid[i - 1]))
            throw InvalidSurface("omega grid must be strictly increasing");
    for (size_t i = 1; i < s.o_grid.size(); ++i)
        if (!(s.o_grid[i] > s.o_grid[i - 1]))
            throw InvalidSurface("opening grid must be strictly increasing");
    for (double v : s.torque)
        if (!std::isfinite(v)) throw InvalidSurface("torque values must be finite");
}

namespace detail {
// index of the cell [grid[i], grid[i+1]] containing x, clamped to the grid
inline size_t cell_index(const std::vector<double>& grid, double x) {
    if (x <= grid.front()) return 0;
    if (x >= grid[grid.size() - 2]) return grid.size() - 2;
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    return static_cast<size_t>(it - grid.begin()) - 1;
}
}  // namespace detail

/// Bilinear interpolation of the four enclosing grid nodes; exact at nodes.
/// Out-of-box queries are clamped to the nearest edge.
inline double torque_lookup(const TorqueSurface& s, double omega, double o) {
    validate(s);
    const double w = std::clamp(omega, s.omega_grid.front(), s.omega_grid.back());
    const double v = std::clamp(o, s.o_grid.front(), s.o_grid.back());
    const size_t i = detail::cell_index(s.omega_grid, w);
    const size_t j = detail::cell_index(s.o_grid, v);
    const double tw = (w - s.omega_grid[i]) / (s.omega_grid[i + 1] - s.omega_grid[i]);
    const double tv = (v - s.o_grid[j]) / (s.o_grid[j + 1] - s.o_grid[j]);
    const double t00 = s.at(i, j), t01 = s.at(i, j + 1);
    const double t10 = s.at(i + 1, j), t11 = s.at(i + 1, j + 1);
    return (1.0 - tw) * ((1.0 - tv) * t00 + tv * t01) + tw * ((1.0 - tv) * t10 + tv * t11);
}

// Validation-free lookup for the integrator's inner loop. The surface must
// have been validated once up front and the query must already be clamped
// into the box by the caller.
inline double torque_lookup_fast(const TorqueSurface& s, double omega, double o) {
    const size_t i = detail::cell_index(s.omega_grid, omega);
    const size_t j = detail::cell_index(s.o_grid, o);
    const double tw = (omega - s.omega_grid[i]) / (s.omega_grid[i + 1] - s.omega_grid[i]);
    const double tv = (o - s.o_grid[j]) / (s.o_grid[j + 1] - s.o_grid[j]);
    const double t00 = s.at(i, j), t01 = s.at(i, j + 1);
    const double t10 = s.at(i + 1, j), t11 = s.at(i + 1, j + 1);
    return (1.0 - tw) * ((1.0 - tv) * t00 + tv * t01) + tw * ((1.0 - tv) * t10 + tv * t11);
}

/// Parameters of the built-in synthetic hill chart
///
///   T(omega, o) = t_ref * (g(o) - k * omega * (0.3 + g(o))),  g(o) = o + 0.5 o^2
///
/// The opening-gain factor g(o) also scales the speed-damping term so that
/// every opening has a runaway equilibrium inside the grid while torque stays
/// non-decreasing in o over the whole box. Defaults are calibrated so the
/// standard startup synchronizes in the low fifties of seconds and the
/// slowest admissible startup overshoots a 90 s limit.
struct SyntheticSurfaceParams {
    double t_ref = 5.1e6;  // N*m
    double k = 0.30;
    double omega_max = 3.2;  // grid upper speed; past every runaway equilibrium
    size_t n_omega = 25;
    size_t n_o = 25;
};

inline double synthetic_torque(const SyntheticSurfaceParams& p, double omega, double o) {
    const double gain = o * (1.0 + 0.5 * o);
    return p.t_ref * (gain - p.k * omega * (0.3 + gain));
}

inline TorqueSurface make_synthetic_surface(const SyntheticSurfaceParams& p = {}) {
    TorqueSurface s;
    s.omega_grid.resize(p.n_omega);
    s.o_grid.resize(p.n_o);
    for (size_t i = 0; i < p.n_omega; ++i)
        s.omega_grid[i] = p.omega_max * static_cast<double>(i) / static_cast<double>(p.n_omega - 1);
    for (size_t j = 0; j < p.n_o; ++j)
        s.o_grid[j] = static_cast<double>(j) / static_cast<double>(p.n_o - 1);
    s.torque.resize(p.n_omega * p.n_o);
    for (size_t i = 0; i < p.n_omega; ++i)
        for (size_t j = 0; j < p.n_o; ++j)
            s.at(i, j) = synthetic_torque(p, s.omega_grid[i], s.o_grid[j]);
    return s;
}

/// File format: header row = opening grid (first cell blank or "omega"),
/// first column = speed grid, body = torque in N*m.
inline TorqueSurface load_surface_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open torque surface '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw InvalidSurface("empty torque surface file");
    auto head = csv::split_line(line);
    if (head.size() < 3) throw InvalidSurface("torque surface header too short");
    TorqueSurface s;
    for (size_t i = 1; i < head.size(); ++i) {
        try {
            s.o_grid.push_back(std::stod(head[i]));
        } catch (const std::exception&) {
            throw InvalidSurface("non-numeric opening grid value '" + head[i] + "'");
        }
    }
    std::vector<double> body;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = csv::split_line(line);
        if (cells.size() != head.size())
            throw InvalidSurface("torque surface row width mismatch");
        try {
            s.omega_grid.push_back(std::stod(cells[0]));
            for (size_t i = 1; i < cells.size(); ++i) body.push_back(std::stod(cells[i]));
        } catch (const std::exception&) {
            throw InvalidSurface("non-numeric torque surface cell");
        }
    }
    s.torque = std::move(body);
    validate(s);
    return s;
}

inline void save_surface_csv(const TorqueSurface& s, const std::string& path) {
    validate(s);
    csv::Writer w(path);
    std::vector<std::string> head{"omega"};
    for (double o : s.o_grid) head.push_back(csv::fmt(o));
    w.header(head);
    for (size_t i = 0; i < s.omega_grid.size(); ++i) {
        std::vector<double> row{s.omega_grid[i]};
        for (size_t j = 0; j < s.o_grid.size(); ++j) row.push_back(s.at(i, j));
        w.row(row);
    }
    w.close();
}

}  // namespace hydrostart
