#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace jumplab {

// Sentinel index for "never within the horizon" (stopping time beyond the grid).
inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

// Uniform grid t_i = i * horizon / n_steps, i = 0..n_steps.  Every event time
// in the laboratory (jump times, dividend dates, stopping times) must sit
// exactly on a grid point; times that do not are rejected, never rounded.
struct TimeGrid {
    std::size_t n_steps = 0;
    double horizon = 1.0;

    TimeGrid() = default;
    TimeGrid(std::size_t steps, double h = 1.0) : n_steps(steps), horizon(h) {
        if (steps == 0) throw std::invalid_argument("time grid needs at least one step");
        if (!(h > 0.0)) throw std::invalid_argument("time grid horizon must be positive");
    }

    std::size_t size() const { return n_steps + 1; }
    double dt() const { return horizon / static_cast<double>(n_steps); }
    double time(std::size_t i) const { return horizon * static_cast<double>(i) / static_cast<double>(n_steps); }

    // Exact grid index of t, or nullopt if t is off-grid or outside [0, horizon].
    std::optional<std::size_t> index_of(double t) const {
        double x = t / horizon * static_cast<double>(n_steps);
        double r = std::nearbyint(x);
        if (r < 0.0 || r > static_cast<double>(n_steps)) return std::nullopt;
        double scale = x < 1.0 ? 1.0 : x;
        if (std::abs(x - r) > 1e-9 * scale) return std::nullopt;
        return static_cast<std::size_t>(r);
    }

    std::size_t require_index(double t, const std::string& what) const {
        auto i = index_of(t);
        if (!i) throw std::invalid_argument(what + " (" + std::to_string(t) + ") is not on the time grid");
        return *i;
    }

    // Largest grid index with time(i) <= t (clamped to the grid).
    std::size_t floor_index(double t) const {
        if (t <= 0.0) return 0;
        double x = t / horizon * static_cast<double>(n_steps);
        if (x >= static_cast<double>(n_steps)) return n_steps;
        auto i = static_cast<std::size_t>(x);
        // guard against x being a hair under an exact grid point
        if (static_cast<double>(i + 1) - x < 1e-9) ++i;
        return i;
    }
};

}  // namespace jumplab
