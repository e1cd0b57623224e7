#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "blpp/grid.hpp"
#include "blpp/rng.hpp"

namespace blpp {

// One unit Brownian block: the G increments of X_{i,m} at spacing 1/G,
// each Normal(0, 1/G).
struct BlockIncrements {
    int unit = 0;  // global unit index i (block covers [i, i+1])
    int line = 0;
    std::vector<double> increments;
};

// Record of one block resample; applying then reverting restores the field
// bit-exactly because line arrays are always rebuilt from block data by the
// same left-to-right summation.
struct FieldDelta {
    int unit = 0;
    int line = 0;
    std::vector<double> old_increments;
    std::vector<double> new_increments;
    double shift = 0.0;  // new X(1) - old X(1), the offset picked up for x > i+1
};

// The discretized Brownian environment at one dynamical instant: per line, a
// cumulative path W_m over the grid, anchored W_m(x_min) = 0, backed by the
// per-block increment arrays.
class BrownianField {
public:
    BrownianField(const GridSpec& spec, uint64_t seed);

    const GridSpec& spec() const { return spec_; }
    uint64_t seed() const { return seed_; }

    // W on line m over all grid indices
    std::span<const double> line(int m) const {
        return {lines_[line_slot(m)].data(), lines_[line_slot(m)].size()};
    }

    double value_at_index(int m, int j) const;
    double value_at(int m, double x) const;  // x must be on the grid

    std::span<const double> block_increments(int unit, int line) const;

    // Replace block (i, m) with a fresh draw keyed by `seed`. A nonzero
    // drift shifts every new increment mean by drift/G (test fixture for
    // the stationarity negative control).
    FieldDelta resample_block(int unit, int line, uint64_t seed, double drift = 0.0);

    void apply_delta(const FieldDelta& delta);   // install delta.new_increments
    void revert_delta(const FieldDelta& delta);  // restore delta.old_increments

    // Pathwise diffusive rescaling: the returned field W' satisfies
    // W'_m(beta * x) = sqrt(beta) * W_m(x) at every grid x, so passage times
    // between scaled endpoints are exactly sqrt(beta) times the originals.
    // Requires beta >= 1 and beta dividing the grid resolution.
    BrownianField scaled_copy(int beta) const;

    // range (max - min) of the cumulative block path including the 0 anchor
    double block_path_range(int unit, int line) const;

    void dump(std::ostream& os) const;
    static BrownianField load(std::istream& is);

    bool bitwise_equal(const BrownianField& other) const;

    // largest relative deviation between the stored line values and a fresh
    // summation of the block increments; exactly zero for sampled and
    // resampled fields, tiny for fields loaded from a snapshot
    double max_block_rebuild_deviation() const;

private:
    BrownianField() = default;

    int line_slot(int m) const { return m - spec_.m_min; }
    int unit_slot(int i) const { return i - spec_.x_min; }
    void rebuild_line_from(int line_slot_idx, int unit_slot_idx);
    void fill_block(int unit, int line, uint64_t seed, double drift, std::vector<double>& out) const;

    GridSpec spec_;
    uint64_t seed_ = 0;
    // blocks_[line_slot][unit_slot] -> G increments
    std::vector<std::vector<std::vector<double>>> blocks_;
    // lines_[line_slot][j] -> W_m(x_min + j/G)
    std::vector<std::vector<double>> lines_;
};

BrownianField sample_field(const GridSpec& spec, uint64_t seed);

// true when unit block [i, i+1] on `line` lies inside the field
bool line_in_block_range(int unit, int line, const GridSpec& spec);

}  // namespace blpp
