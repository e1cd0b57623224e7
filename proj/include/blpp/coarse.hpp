#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "blpp/grid.hpp"
#include "blpp/intervals.hpp"
#include "blpp/staircase.hpp"

namespace blpp {

// Integer cell (i, m): the unit horizontal segment {m} x [i, i+1].
struct Cell {
    int i = 0;
    int m = 0;
    auto operator<=>(const Cell&) const = default;
};

// Optional row-band restriction [m_lo, m_hi].
struct RowBand {
    int m_lo = 0;
    int m_hi = 0;
    bool contains(int m) const { return m >= m_lo && m <= m_hi; }
};

// Sorted set of cells (lexicographic in (m, i)).
class CoarseSet {
public:
    CoarseSet() = default;
    explicit CoarseSet(std::vector<Cell> cells);

    const std::vector<Cell>& cells() const { return cells_; }
    size_t size() const { return cells_.size(); }
    bool contains(const Cell& c) const;
    bool subset_of(const CoarseSet& other) const;

    // |this \ other|
    size_t count_not_in(const CoarseSet& other) const;
    // this \ other
    CoarseSet minus(const CoarseSet& other) const;
    CoarseSet unioned(const CoarseSet& other) const;

    bool operator==(const CoarseSet&) const = default;

private:
    std::vector<Cell> cells_;
};

// Cells whose closed unit segment meets the staircase; a jump exactly at an
// integer coordinate contributes both adjacent cells.
CoarseSet coarse_set(const Staircase& xi, const GridSpec& spec,
                     std::optional<RowBand> band = std::nullopt);
CoarseSet coarse_set(const LineIntervalSet& set, const GridSpec& spec,
                     std::optional<RowBand> band = std::nullopt);

// Cells (i, m) admitting p <= w <= q with w on the cell segment: rows
// [m_p, m_q], i in [ceil(x_p) - 1, floor(x_q)].
CoarseSet mset_cells(const Point& p, const Point& q, const GridSpec& spec);

// Axis-aligned source/sink regions: the existential over p in K1, q in K2
// reduces to the lowest corner of K1 and the highest corner of K2.
struct GridBox {
    Point lo;  // smallest coordinates
    Point hi;  // largest coordinates
};
CoarseSet mset_cells(const GridBox& k1, const GridBox& k2, const GridSpec& spec);

// A union of per-pair msets with O(1) cardinality, membership and flat
// indexing; used to drive the Poisson clocks of a dynamical run.
class MSet {
public:
    void add_pair(const Point& p, const Point& q, const GridSpec& spec);
    void add_row_range(int m_lo, int m_hi, int i_lo, int i_hi);

    int64_t size() const { return total_; }
    bool contains(int unit, int line) const;
    Cell cell_at(int64_t flat_index) const;

    // iterate blocks in deterministic (row, unit) order
    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (const auto& [m, ivs] : rows_)
            for (const auto& iv : ivs)
                for (int i = iv.lo; i <= iv.hi; ++i) fn(i, m);
    }

private:
    std::map<int, std::vector<GridInterval>> rows_;  // unit-index intervals per row
    std::vector<std::pair<int64_t, std::pair<int, GridInterval>>> index_;  // prefix -> (m, iv)
    int64_t total_ = 0;
    void reindex();
};

}  // namespace blpp
