#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_set>
#include <utility>
#include <vector>

#include "blpp/coarse.hpp"
#include "blpp/field.hpp"
#include "blpp/intervals.hpp"
#include "blpp/lpp.hpp"
#include "blpp/staircase.hpp"

namespace blpp {

// One Poisson clock ring: block (unit, line) resampled at time r.
struct ClockEvent {
    double r = 0.0;
    int unit = 0;
    int line = 0;
};

// Merged clock rings of all blocks in the mset over (s, t), sorted by time
// (ties by block order). Each block's clock stream is keyed only by the block
// and the seed, so runs over nested windows or nested msets see the
// same rings on shared blocks.
std::vector<ClockEvent> sample_events(const MSet& mset, double s, double t, uint64_t seed);

// Accumulated switch counts: `total` restricted to the row band, and
// per-(scale, center) bucket counts of the unrestricted coarse deltas for
// events whose geodesic difference localizes at that dyadic scale.
struct SwitchLedger {
    int64_t total = 0;
    std::map<std::pair<int, int>, int64_t> buckets;  // (ell, center row) -> count
};

struct LocBucket {
    int ell = 0;  // dyadic scale 2^j
    int center = 0;
};

// Smallest dyadic scale ell with row span in [ell, 2*ell) and the lowest
// center on the ell-spaced row grid containing the set in [center - 2*ell,
// center + 2*ell]; nullopt for empty sets or single-row sets.
std::optional<LocBucket> loc_classify(const LineIntervalSet& diff);

// Monotone union of band-restricted coarse cells swept by tracked geodesics.
class HitSetAccumulator {
public:
    HitSetAccumulator() = default;
    explicit HitSetAccumulator(RowBand band) : band_(band) {}

    void add(const CoarseSet& cells);
    size_t size() const { return cells_.size(); }
    bool contains(const Cell& c) const;
    std::vector<Cell> sorted_cells() const;

private:
    std::optional<RowBand> band_;
    std::unordered_set<uint64_t> cells_;
};

// The decomposition of a one-resample geodesic change: either nothing
// changed, or the difference closure is a single excursion about the old
// path, or it is two excursions meeting the old path's crossing line.
struct ExcursionDecomposition {
    enum class Case { Unchanged, Single, Double };
    Case kind = Case::Unchanged;
    std::vector<Staircase> excursions;  // path order (lower first)
    int shared_line = 0;                // Double: top line of the lower excursion
};

// Decompose the difference of two same-endpoint staircases into excursions
// (maximal off-path arcs of the new path). Throws InvariantViolation when
// the structure is not the one a single block resample can produce.
ExcursionDecomposition excursion_decompose(const Staircase& old_path, const Staircase& new_path);

// Coarse cells gained by the new path inside the row band:
// |Coarse(K intersect new) \ Coarse(K intersect old)|.
int64_t switch_delta(const Staircase& old_path, const Staircase& new_path, const GridSpec& spec,
                     std::optional<RowBand> band = std::nullopt);

struct RunOptions {
    GridSpec spec;
    uint64_t seed = 0;
    RowBand band{0, 0};
    double t_begin = 0.0;
    double t_end = 0.0;
    // fraction of events on which the incremental tables are cross-checked
    // against a from-scratch rebuild (1.0 in test mode)
    double check_fraction = 0.0;
    bool structural_checks = true;
    double drift = 0.0;  // test fixture: mean shift injected into resampled blocks
    bool record_events = false;
    std::vector<double> checkpoints;  // snapshot times for ledger totals
    // when set, clocks also ring on these extra blocks (beyond the pair
    // msets); such events must never change any geodesic
    std::optional<MSet> extra_clock_blocks;
};

struct EventRecord {
    double r = 0.0;
    int unit = 0;
    int line = 0;
    bool changed = false;
    int64_t switch_delta = 0;
    int loc_ell = 0;  // 0 when the event feeds no bucket
    int loc_m = 0;
    int excursion_case = 0;  // 0 unchanged, 1 single, 2 double
    bool dt_bound_ok = true;
};

struct CheckpointStats {
    double t = 0.0;
    int64_t switch_total = 0;
    size_t hitset_size = 0;
};

struct RunResult {
    SwitchLedger ledger;
    HitSetAccumulator hitset;
    int64_t event_count = 0;
    int64_t changed_count = 0;
    std::vector<EventRecord> events;
    std::vector<CheckpointStats> checkpoints;
    // per tracked pair: cells at t_begin, cells over the whole window, and
    // switch total; the run asserts final <= initial + switches for each
    std::vector<size_t> initial_cells;
    std::vector<size_t> final_cells;
    std::vector<int64_t> pair_switch;
    std::vector<Staircase> final_geodesics;
    std::vector<double> final_passage;
};

namespace detail {
struct TrackedPair;
}

// One event-driven run: samples the field and the clock stream, tracks the
// geodesic of every listed pair, and accumulates ledgers as events are
// applied. Between events every tracked geodesic is constant.
class DynamicalRun {
public:
    DynamicalRun(const std::vector<std::pair<Point, Point>>& pairs, const RunOptions& options);
    ~DynamicalRun();
    DynamicalRun(const DynamicalRun&) = delete;
    DynamicalRun& operator=(const DynamicalRun&) = delete;

    const std::vector<ClockEvent>& pending_events() const { return events_; }
    const BrownianField& field() const { return field_; }
    size_t pair_count() const;
    const Staircase& pair_geodesic(size_t index) const;
    double pair_passage(size_t index) const;

    struct PairChange {
        size_t pair_index = 0;
        Staircase old_geodesic;
        Staircase new_geodesic;
    };

    // Resample the event's block and refresh every pair whose mset contains
    // it (rows below the block are reused, rows from it upward recomputed).
    // Returns the pairs whose geodesic changed. Events must arrive in time
    // order.
    std::vector<PairChange> apply_event(const ClockEvent& ev);

    // apply any remaining presampled events and close out the ledgers
    RunResult finish();

private:
    void snapshot_before(double time);

    RunOptions options_;
    BrownianField field_;
    std::vector<detail::TrackedPair> tracked_;
    std::vector<ClockEvent> events_;
    size_t next_event_ = 0;
    RunResult result_;
    Rng check_rng_;
    std::map<std::pair<int, int>, int64_t> firing_count_;
    size_t next_checkpoint_ = 0;
    double clock_;
    bool finished_ = false;
};

// Event-driven evolution of one sampled field under block resampling, with
// exact tracking of every listed pair's geodesic.
RunResult run_pair_dynamics(const std::vector<std::pair<Point, Point>>& pairs,
                            const RunOptions& options);

// Apply the same dynamics to a field without tracking geodesics (for
// observables that only need the start and end states). The field trajectory
// is identical to the tracked run with the same seed.
void evolve_field(BrownianField& field, const MSet& mset, double s, double t, uint64_t seed,
                  double drift = 0.0);

// All pairs of mesh points on the segments {-n} x [-n-r, -n+r] and
// {n} x [n-r, n+r], r the grid floor of n^(2/3); points sit at spacing sigma
// symmetric about the segment centers, so refining sigma extends the mesh.
std::vector<std::pair<Point, Point>> hitset_pairs_mesh(int n, double sigma, const GridSpec& spec);

inline uint64_t cell_key(const Cell& c) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(c.m)) << 32) |
           static_cast<uint64_t>(static_cast<uint32_t>(c.i));
}

}  // namespace blpp
