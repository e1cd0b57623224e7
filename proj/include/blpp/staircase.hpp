#pragma once

#include <vector>

#include "blpp/errors.hpp"
#include "blpp/field.hpp"
#include "blpp/grid.hpp"

namespace blpp {

// An up-right path from (jumps.front(), m_lo) to (jumps.back(), m_hi):
// a horizontal segment [z_{k-1}, z_k] on each line k and a vertical jump at
// z_k between consecutive lines. Jump positions are grid indices.
struct Staircase {
    int m_lo = 0;
    int m_hi = 0;
    std::vector<int> jumps;  // z_{m_lo - 1} .. z_{m_hi}, nondecreasing

    int lines() const { return m_hi - m_lo + 1; }
    // z_k, the rightmost grid index of the path on line k
    int jump(int k) const { return jumps[k - (m_lo - 1)]; }
    int& jump(int k) { return jumps[k - (m_lo - 1)]; }
    Point source() const { return {jumps.front(), m_lo}; }
    Point sink() const { return {jumps.back(), m_hi}; }

    void validate(const GridSpec& spec) const {
        require(m_hi >= m_lo, "staircase line range is empty");
        require(static_cast<int>(jumps.size()) == lines() + 1, "staircase jump count mismatch");
        require(spec.line_in_range(m_lo) && spec.line_in_range(m_hi),
                "staircase lines outside field range");
        for (size_t k = 0; k < jumps.size(); ++k) {
            require(spec.index_in_range(jumps[k]), "staircase jump off the grid");
            if (k > 0) require(jumps[k] >= jumps[k - 1], "staircase jumps must be nondecreasing");
        }
    }

    bool operator==(const Staircase&) const = default;
};

// Sum of the per-line increments W_k(z_k) - W_k(z_{k-1}).
double staircase_weight(const BrownianField& field, const Staircase& xi);

// whether the grid point (j, m) lies on a horizontal segment of the path
bool point_on_staircase(const Staircase& xi, int j, int m);

}  // namespace blpp
