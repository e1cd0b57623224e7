#include "blpp/intervals.hpp"

#include <algorithm>

#include "blpp/errors.hpp"

namespace blpp {

void LineIntervalSet::add(int line, int j_lo, int j_hi) {
    require(j_lo <= j_hi, "interval endpoints out of order");
    auto& ivs = rows_[line];
    ivs.push_back({j_lo, j_hi});
    std::sort(ivs.begin(), ivs.end(),
              [](const GridInterval& a, const GridInterval& b) { return a.lo < b.lo; });
    std::vector<GridInterval> merged;
    for (const auto& iv : ivs) {
        if (!merged.empty() && iv.lo <= merged.back().hi) {
            merged.back().hi = std::max(merged.back().hi, iv.hi);
        } else {
            merged.push_back(iv);
        }
    }
    ivs = std::move(merged);
}

LineIntervalSet LineIntervalSet::restrict_lines(int lo, int hi) const {
    LineIntervalSet out;
    for (const auto& [m, ivs] : rows_) {
        if (m < lo || m > hi) continue;
        for (const auto& iv : ivs) out.add(m, iv.lo, iv.hi);
    }
    return out;
}

ExtentMeasures extent(const LineIntervalSet& set, const GridSpec& spec) {
    ExtentMeasures out;
    if (set.empty()) return out;
    out.vert = set.max_line() - set.min_line();
    int64_t total = 0;
    for (const auto& [m, ivs] : set.rows())
        for (const auto& iv : ivs) total += iv.hi - iv.lo;
    out.hor = static_cast<double>(total) / spec.grid;
    return out;
}

LineIntervalSet staircase_intervals(const Staircase& xi) {
    LineIntervalSet out;
    for (int k = xi.m_lo; k <= xi.m_hi; ++k) out.add(k, xi.jump(k - 1), xi.jump(k));
    return out;
}

LineIntervalSet staircase_diff(const Staircase& xi_new, const Staircase& xi_old) {
    require(xi_new.m_lo == xi_old.m_lo && xi_new.m_hi == xi_old.m_hi &&
                xi_new.jumps.front() == xi_old.jumps.front() &&
                xi_new.jumps.back() == xi_old.jumps.back(),
            "staircase difference requires matching endpoints");
    LineIntervalSet out;
    // horizontal parts: closure of [a', b'] \ [a, b] per line
    for (int k = xi_new.m_lo; k <= xi_new.m_hi; ++k) {
        const int a_new = xi_new.jump(k - 1), b_new = xi_new.jump(k);
        const int a_old = xi_old.jump(k - 1), b_old = xi_old.jump(k);
        if (a_new < a_old) out.add(k, a_new, std::min(b_new, a_old));
        if (b_new > b_old) out.add(k, std::max(a_new, b_old), b_new);
    }
    // endpoints of verticals present only in the new path
    for (int k = xi_new.m_lo; k <= xi_new.m_hi - 1; ++k) {
        if (xi_new.jump(k) != xi_old.jump(k)) {
            out.add(k, xi_new.jump(k), xi_new.jump(k));
            out.add(k + 1, xi_new.jump(k), xi_new.jump(k));
        }
    }
    return out;
}

}  // namespace blpp
