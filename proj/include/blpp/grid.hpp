#pragma once

#include <cmath>
#include <cstdint>

#include "blpp/errors.hpp"

namespace blpp {

// Horizontal coordinates live on the grid {x_min + j/G}. All core routines
// work with the integer index j; real x values appear only at the API edges.
struct GridSpec {
    int grid = 1;   // points per unit length (G)
    int x_min = 0;  // horizontal extent, in units
    int x_max = 1;
    int m_min = 0;  // line index range
    int m_max = 0;

    void validate() const {
        require(grid >= 1, "grid resolution must be >= 1");
        require(x_max > x_min, "x range must be nonempty");
        require(m_max >= m_min, "line range must be nonempty");
    }

    int units() const { return x_max - x_min; }
    int lines() const { return m_max - m_min + 1; }
    // number of grid points per line
    int width() const { return units() * grid + 1; }

    bool line_in_range(int m) const { return m >= m_min && m <= m_max; }
    bool index_in_range(int j) const { return j >= 0 && j < width(); }

    double x_of(int j) const { return x_min + static_cast<double>(j) / grid; }

    // exact index of a real coordinate; rejects off-grid input
    int index_of(double x) const {
        const double scaled = (x - x_min) * grid;
        const double rounded = std::nearbyint(scaled);
        require(std::abs(scaled - rounded) <= 1e-9 * (1.0 + std::abs(scaled)),
                "coordinate is not on the grid");
        const int j = static_cast<int>(rounded);
        require(index_in_range(j), "coordinate outside the grid range");
        return j;
    }

    // unit block containing grid index j, as a global unit index in [x_min, x_max)
    int unit_of_index(int j) const { return x_min + j / grid; }

    bool operator==(const GridSpec&) const = default;
};

// A point (x, m) with x stored as a grid index.
struct Point {
    int j = 0;  // grid index of x
    int m = 0;  // line

    bool operator==(const Point&) const = default;
};

// partial order: p <= q iff x_p <= x_q and m_p <= m_q
inline bool point_leq(const Point& p, const Point& q) { return p.j <= q.j && p.m <= q.m; }

}  // namespace blpp
