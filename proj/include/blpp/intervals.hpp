#pragma once

#include <map>
#include <utility>
#include <vector>

#include "blpp/grid.hpp"
#include "blpp/staircase.hpp"

namespace blpp {

// Closed interval of grid indices on one line; lo == hi is a single point.
struct GridInterval {
    int lo = 0;
    int hi = 0;
    bool operator==(const GridInterval&) const = default;
};

// A bounded planar set represented as per-line unions of closed intervals.
// Degenerate (single point) intervals are kept so that endpoints of vertical
// segments register on their lines; with that convention the row span of the
// set equals the vertical extent of the underlying planar set.
class LineIntervalSet {
public:
    void add(int line, int j_lo, int j_hi);
    bool empty() const { return rows_.empty(); }

    int min_line() const { return rows_.begin()->first; }
    int max_line() const { return rows_.rbegin()->first; }

    const std::map<int, std::vector<GridInterval>>& rows() const { return rows_; }

    // restrict to lines in [lo, hi]
    LineIntervalSet restrict_lines(int lo, int hi) const;

private:
    std::map<int, std::vector<GridInterval>> rows_;  // sorted, merged per line
};

struct ExtentMeasures {
    double vert = 0.0;  // minimal row-band height containing the set
    double hor = 0.0;   // summed horizontal section lengths
};

ExtentMeasures extent(const LineIntervalSet& set, const GridSpec& spec);

// The per-line interval form of a staircase (horizontal segments only; the
// verticals contribute no interior points on integer lines).
LineIntervalSet staircase_intervals(const Staircase& xi);

// Closure of xi_new \ xi_old as a per-line interval set. Both staircases must
// share endpoints. Endpoints of verticals present only in xi_new register as
// degenerate intervals on their lines.
LineIntervalSet staircase_diff(const Staircase& xi_new, const Staircase& xi_old);

}  // namespace blpp
