#include "blpp/coarse.hpp"

#include <algorithm>

#include "blpp/errors.hpp"

namespace blpp {

namespace {

int floor_div(int a, int b) {  // b > 0
    int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

int ceil_div(int a, int b) { return -floor_div(-a, b); }

struct CellCmp {
    bool operator()(const Cell& a, const Cell& b) const {
        return a.m != b.m ? a.m < b.m : a.i < b.i;
    }
};

// cells met by the closed segment [j_lo, j_hi] (grid indices) on one line:
// units [x_min + ceil(j_lo/G) - 1, x_min + floor(j_hi/G)]
void segment_cells(int line, int j_lo, int j_hi, const GridSpec& spec, std::vector<Cell>& out) {
    const int i_lo = spec.x_min + ceil_div(j_lo, spec.grid) - 1;
    const int i_hi = spec.x_min + floor_div(j_hi, spec.grid);
    for (int i = i_lo; i <= i_hi; ++i) out.push_back({i, line});
}

}  // namespace

CoarseSet::CoarseSet(std::vector<Cell> cells) : cells_(std::move(cells)) {
    std::sort(cells_.begin(), cells_.end(), CellCmp{});
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
}

bool CoarseSet::contains(const Cell& c) const {
    return std::binary_search(cells_.begin(), cells_.end(), c, CellCmp{});
}

bool CoarseSet::subset_of(const CoarseSet& other) const {
    return std::includes(other.cells_.begin(), other.cells_.end(), cells_.begin(), cells_.end(),
                         CellCmp{});
}

size_t CoarseSet::count_not_in(const CoarseSet& other) const {
    size_t count = 0;
    auto it = other.cells_.begin();
    for (const auto& c : cells_) {
        while (it != other.cells_.end() && CellCmp{}(*it, c)) ++it;
        if (it == other.cells_.end() || !(*it == c)) ++count;
    }
    return count;
}

CoarseSet CoarseSet::minus(const CoarseSet& other) const {
    std::vector<Cell> out;
    std::set_difference(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                        std::back_inserter(out), CellCmp{});
    return CoarseSet(std::move(out));
}

CoarseSet CoarseSet::unioned(const CoarseSet& other) const {
    std::vector<Cell> out;
    std::set_union(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                   std::back_inserter(out), CellCmp{});
    return CoarseSet(std::move(out));
}

CoarseSet coarse_set(const Staircase& xi, const GridSpec& spec, std::optional<RowBand> band) {
    std::vector<Cell> cells;
    for (int k = xi.m_lo; k <= xi.m_hi; ++k) {
        if (band && !band->contains(k)) continue;
        segment_cells(k, xi.jump(k - 1), xi.jump(k), spec, cells);
    }
    return CoarseSet(std::move(cells));
}

CoarseSet coarse_set(const LineIntervalSet& set, const GridSpec& spec, std::optional<RowBand> band) {
    std::vector<Cell> cells;
    for (const auto& [m, ivs] : set.rows()) {
        if (band && !band->contains(m)) continue;
        for (const auto& iv : ivs) segment_cells(m, iv.lo, iv.hi, spec, cells);
    }
    return CoarseSet(std::move(cells));
}

CoarseSet mset_cells(const Point& p, const Point& q, const GridSpec& spec) {
    std::vector<Cell> cells;
    if (point_leq(p, q)) {
        for (int m = p.m; m <= q.m; ++m) segment_cells(m, p.j, q.j, spec, cells);
    }
    return CoarseSet(std::move(cells));
}

CoarseSet mset_cells(const GridBox& k1, const GridBox& k2, const GridSpec& spec) {
    require(point_leq(k1.lo, k1.hi) && point_leq(k2.lo, k2.hi), "box corners out of order");
    return mset_cells(k1.lo, k2.hi, spec);
}

void MSet::add_pair(const Point& p, const Point& q, const GridSpec& spec) {
    if (!point_leq(p, q)) return;
    const int i_lo = spec.x_min + (p.j + spec.grid - 1) / spec.grid - 1;  // p.j >= 0
    const int i_hi = spec.x_min + q.j / spec.grid;
    add_row_range(p.m, q.m, i_lo, i_hi);
}

void MSet::add_row_range(int m_lo, int m_hi, int i_lo, int i_hi) {
    for (int m = m_lo; m <= m_hi; ++m) {
        auto& ivs = rows_[m];
        ivs.push_back({i_lo, i_hi});
        std::sort(ivs.begin(), ivs.end(),
                  [](const GridInterval& a, const GridInterval& b) { return a.lo < b.lo; });
        std::vector<GridInterval> merged;
        for (const auto& iv : ivs) {
            if (!merged.empty() && iv.lo <= merged.back().hi + 1)
                merged.back().hi = std::max(merged.back().hi, iv.hi);
            else
                merged.push_back(iv);
        }
        ivs = std::move(merged);
    }
    reindex();
}

void MSet::reindex() {
    index_.clear();
    total_ = 0;
    for (const auto& [m, ivs] : rows_) {
        for (const auto& iv : ivs) {
            index_.push_back({total_, {m, iv}});
            total_ += iv.hi - iv.lo + 1;
        }
    }
}

bool MSet::contains(int unit, int line) const {
    auto it = rows_.find(line);
    if (it == rows_.end()) return false;
    for (const auto& iv : it->second)
        if (unit >= iv.lo && unit <= iv.hi) return true;
    return false;
}

Cell MSet::cell_at(int64_t flat_index) const {
    require(flat_index >= 0 && flat_index < total_, "mset index out of range");
    auto it = std::upper_bound(index_.begin(), index_.end(), flat_index,
                               [](int64_t v, const auto& e) { return v < e.first; });
    --it;
    const auto& [base, entry] = *it;
    return {entry.second.lo + static_cast<int>(flat_index - base), entry.first};
}

}  // namespace blpp
