#include "blpp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <climits>
#include <cstring>

#include "blpp/rng.hpp"

namespace blpp {

std::vector<ClockEvent> sample_events(const MSet& mset, double s, double t, uint64_t seed) {
    require(t >= s, "time window endpoints out of order");
    std::vector<ClockEvent> events;
    if (t == s) return events;
    mset.for_each([&](int i, int m) {
        Rng rng(derive(seed, Stream::Clock, i, m));
        double r = s;
        for (;;) {
            r += rng.exponential(1.0);
            if (r >= t) break;
            events.push_back({r, i, m});
        }
    });
    std::sort(events.begin(), events.end(), [](const ClockEvent& a, const ClockEvent& b) {
        if (a.r != b.r) return a.r < b.r;
        if (a.unit != b.unit) return a.unit < b.unit;
        return a.line < b.line;
    });
    return events;
}

std::optional<LocBucket> loc_classify(const LineIntervalSet& diff) {
    if (diff.empty()) return std::nullopt;
    const int span = diff.max_line() - diff.min_line();
    if (span < 1) return std::nullopt;
    int ell = 1;
    while (2 * ell <= span) ell *= 2;
    // lowest multiple of ell with rows inside [center - 2*ell, center + 2*ell]
    const int lo_needed = diff.max_line() - 2 * ell;
    int center = ((lo_needed >= 0 ? (lo_needed + ell - 1) / ell : -((-lo_needed) / ell))) * ell;
    check_invariant(center - 2 * ell <= diff.min_line() && diff.max_line() <= center + 2 * ell,
                    "scale bucket center does not contain the set");
    return LocBucket{ell, center};
}

void HitSetAccumulator::add(const CoarseSet& cells) {
    for (const auto& c : cells.cells()) {
        if (band_ && !band_->contains(c.m)) continue;
        cells_.insert(cell_key(c));
    }
}

bool HitSetAccumulator::contains(const Cell& c) const { return cells_.count(cell_key(c)) > 0; }

std::vector<Cell> HitSetAccumulator::sorted_cells() const {
    std::vector<Cell> out;
    out.reserve(cells_.size());
    for (uint64_t key : cells_) {
        out.push_back({static_cast<int32_t>(key & 0xffffffffull),
                       static_cast<int32_t>(key >> 32)});
    }
    std::sort(out.begin(), out.end(), [](const Cell& a, const Cell& b) {
        return a.m != b.m ? a.m < b.m : a.i < b.i;
    });
    return out;
}

namespace {

struct PathPoint {
    int j = 0;
    int m = 0;
};

// Walk the new path in order, splitting it into on/off-old subpieces; arcs of
// consecutive off pieces are the excursions.
std::vector<Staircase> difference_arcs(const Staircase& old_path, const Staircase& new_path) {
    std::vector<Staircase> arcs;
    bool open = false;
    PathPoint start{}, end{};

    auto close_arc = [&]() {
        if (!open) return;
        Staircase ex;
        ex.m_lo = start.m;
        ex.m_hi = end.m;
        check_invariant(end.m > start.m, "excursion must span at least two lines");
        ex.jumps.resize(static_cast<size_t>(ex.lines()) + 1);
        ex.jump(start.m - 1) = start.j;
        for (int k = start.m; k <= end.m - 1; ++k) ex.jump(k) = new_path.jump(k);
        ex.jump(end.m) = end.j;
        for (size_t idx = 1; idx < ex.jumps.size(); ++idx)
            check_invariant(ex.jumps[idx] >= ex.jumps[idx - 1],
                            "excursion jumps must be nondecreasing");
        check_invariant(point_on_staircase(old_path, start.j, start.m) &&
                            point_on_staircase(old_path, end.j, end.m),
                        "excursion endpoints must lie on the old path");
        arcs.push_back(std::move(ex));
        open = false;
    };
    auto emit_off = [&](PathPoint a, PathPoint b) {
        if (!open) {
            start = a;
            open = true;
        }
        end = b;
    };
    auto emit_on = [&]() { close_arc(); };

    for (int k = new_path.m_lo; k <= new_path.m_hi; ++k) {
        const int a = new_path.jump(k - 1), b = new_path.jump(k);
        const int c = old_path.jump(k - 1), d = old_path.jump(k);
        const int ilo = std::max(a, c), ihi = std::min(b, d);
        if (ilo > ihi) {
            emit_off({a, k}, {b, k});
        } else {
            if (a < ilo) emit_off({a, k}, {ilo, k});
            emit_on();
            if (b > ihi) emit_off({ihi, k}, {b, k});
        }
        if (k <= new_path.m_hi - 1) {
            if (new_path.jump(k) != old_path.jump(k)) {
                emit_off({new_path.jump(k), k}, {new_path.jump(k), k + 1});
            } else {
                emit_on();
            }
        }
    }
    check_invariant(!open, "difference arc extends past the shared endpoint");
    return arcs;
}

}  // namespace

ExcursionDecomposition excursion_decompose(const Staircase& old_path, const Staircase& new_path) {
    require(old_path.m_lo == new_path.m_lo && old_path.m_hi == new_path.m_hi &&
                old_path.jumps.front() == new_path.jumps.front() &&
                old_path.jumps.back() == new_path.jumps.back(),
            "excursion decomposition requires matching endpoints");
    ExcursionDecomposition out;
    if (old_path.jumps == new_path.jumps) {
        out.kind = ExcursionDecomposition::Case::Unchanged;
        return out;
    }
    out.excursions = difference_arcs(old_path, new_path);
    check_invariant(!out.excursions.empty(), "changed path with no difference arcs");
    if (out.excursions.size() == 1) {
        out.kind = ExcursionDecomposition::Case::Single;
    } else if (out.excursions.size() == 2) {
        out.kind = ExcursionDecomposition::Case::Double;
        check_invariant(out.excursions[0].m_hi == out.excursions[1].m_lo,
                        "double excursions must meet the old path on a shared line");
        out.shared_line = out.excursions[0].m_hi;
    } else {
        throw InvariantViolation(
            "one-resample geodesic change decomposed into more than two excursions");
    }
    return out;
}

namespace {

double increments_range(const std::vector<double>& inc) {
    double acc = 0.0, lo = 0.0, hi = 0.0;
    for (double v : inc) {
        acc += v;
        lo = std::min(lo, acc);
        hi = std::max(hi, acc);
    }
    return hi - lo;
}

}  // namespace

int64_t switch_delta(const Staircase& old_path, const Staircase& new_path, const GridSpec& spec,
                     std::optional<RowBand> band) {
    require(old_path.m_lo == new_path.m_lo && old_path.m_hi == new_path.m_hi &&
                old_path.jumps.front() == new_path.jumps.front() &&
                old_path.jumps.back() == new_path.jumps.back(),
            "switch delta requires matching endpoints");
    const CoarseSet now = coarse_set(new_path, spec, band);
    const CoarseSet before = coarse_set(old_path, spec, band);
    return static_cast<int64_t>(now.count_not_in(before));
}

namespace detail {

struct TrackedPair {
    Point p, q;
    MSet mset;
    DpForward dp;
    Staircase geod;
    double passage = 0.0;
    CoarseSet coarse_band;
    HitSetAccumulator cells;  // band-restricted, per pair
    int64_t switches = 0;
    size_t initial_cells = 0;
    // lowest row whose visible values were shifted by a resample strictly
    // left of the window (the geodesic cannot move, but cached table rows
    // from here up are bit-stale until the next rebuild)
    int stale_row = INT_MAX;
};

}  // namespace detail

DynamicalRun::DynamicalRun(const std::vector<std::pair<Point, Point>>& pairs,
                           const RunOptions& options)
    : options_(options),
      field_(options.spec, options.seed),
      check_rng_(derive(options.seed, Stream::Sample, 7)),
      clock_(options.t_begin) {
    require(!pairs.empty(), "dynamics needs at least one tracked pair");
    require(options.t_end >= options.t_begin, "time window endpoints out of order");

    tracked_.reserve(pairs.size());
    MSet clock_set;
    for (const auto& [p, q] : pairs) {
        require(point_leq(p, q), "tracked pair endpoints are not ordered");
        detail::TrackedPair tp;
        tp.p = p;
        tp.q = q;
        tp.mset.add_pair(p, q, options_.spec);
        clock_set.add_pair(p, q, options_.spec);
        auto [t0, dp] = passage_time(field_, p, q);
        tp.passage = t0;
        tp.dp = std::move(dp);
        tp.geod = backtrack_geodesic(tp.dp, p, q);
        tp.coarse_band = coarse_set(tp.geod, options_.spec, options_.band);
        tp.cells = HitSetAccumulator(options_.band);
        tp.cells.add(tp.coarse_band);
        tp.initial_cells = tp.cells.size();
        tracked_.push_back(std::move(tp));
    }
    if (options_.extra_clock_blocks) {
        options_.extra_clock_blocks->for_each(
            [&](int i, int m) { clock_set.add_row_range(m, m, i, i); });
    }

    result_.hitset = HitSetAccumulator(options_.band);
    for (const auto& tp : tracked_) result_.hitset.add(tp.coarse_band);
    events_ = sample_events(clock_set, options_.t_begin, options_.t_end, options_.seed);
}

DynamicalRun::~DynamicalRun() = default;

size_t DynamicalRun::pair_count() const { return tracked_.size(); }

const Staircase& DynamicalRun::pair_geodesic(size_t index) const {
    return tracked_.at(index).geod;
}

double DynamicalRun::pair_passage(size_t index) const { return tracked_.at(index).passage; }

void DynamicalRun::snapshot_before(double time) {
    // a checkpoint at exactly an event time sees the state after the event
    while (next_checkpoint_ < options_.checkpoints.size() &&
           options_.checkpoints[next_checkpoint_] < time) {
        result_.checkpoints.push_back({options_.checkpoints[next_checkpoint_],
                                       result_.ledger.total, result_.hitset.size()});
        ++next_checkpoint_;
    }
}

std::vector<DynamicalRun::PairChange> DynamicalRun::apply_event(const ClockEvent& ev) {
    require(ev.r >= clock_, "out-of-order event");
    clock_ = ev.r;
    // consume the presampled stream as its events are applied, so finish()
    // only runs what is still pending
    if (next_event_ < events_.size() && events_[next_event_].r == ev.r &&
        events_[next_event_].unit == ev.unit && events_[next_event_].line == ev.line)
        ++next_event_;
    snapshot_before(ev.r);
    ++result_.event_count;

    const int64_t firing = firing_count_[{ev.unit, ev.line}]++;
    const uint64_t rseed = derive(options_.seed, Stream::Resample, ev.unit, ev.line, firing);
    const FieldDelta delta = field_.resample_block(ev.unit, ev.line, rseed, options_.drift);
    const double range_bound =
        increments_range(delta.old_increments) + increments_range(delta.new_increments);

    EventRecord rec;
    rec.r = ev.r;
    rec.unit = ev.unit;
    rec.line = ev.line;

    const bool do_check =
        options_.check_fraction > 0.0 &&
        (options_.check_fraction >= 1.0 || check_rng_.uniform() < options_.check_fraction);

    std::vector<PairChange> changes;
    DpForward scratch;
    bool first_change_seen = false;
    for (size_t index = 0; index < tracked_.size(); ++index) {
        auto& tp = tracked_[index];
        if (!tp.mset.contains(ev.unit, ev.line)) {
            // locality: a block outside the pair's mset never moves the
            // geodesic; cross-check against a full rebuild when sampled
            if (do_check) {
                scratch = make_dp_geometry(tp.p, tp.q);
                dp_fill_rows(scratch, FieldAccess{&field_}, scratch.m_lo);
                const Staircase full = backtrack_geodesic(scratch, tp.p, tp.q);
                check_invariant(full.jumps == tp.geod.jumps,
                                "resample outside the pair mset moved the geodesic");
            }
            // a block strictly left of the window shifts this row's visible
            // values by a constant: remember for the next rebuild
            if (ev.line >= tp.p.m && ev.line <= tp.q.m &&
                (ev.unit + 1 - options_.spec.x_min) * options_.spec.grid <= tp.p.j)
                tp.stale_row = std::min(tp.stale_row, ev.line);
            continue;
        }

        const double t_old = tp.passage;
        const Staircase old_geod = tp.geod;

        dp_fill_rows(tp.dp, FieldAccess{&field_},
                     std::max(std::min(ev.line, tp.stale_row), tp.dp.m_lo));
        tp.stale_row = INT_MAX;
        const double t_new = tp.dp.value(tp.q.m, tp.q.j);
        Staircase new_geod = backtrack_geodesic(tp.dp, tp.p, tp.q);

        if (do_check) {
            scratch = make_dp_geometry(tp.p, tp.q);
            dp_fill_rows(scratch, FieldAccess{&field_}, scratch.m_lo);
            check_invariant(std::memcmp(scratch.val.data(), tp.dp.val.data(),
                                        scratch.val.size() * sizeof(double)) == 0 &&
                                std::memcmp(scratch.arg.data(), tp.dp.arg.data(),
                                            scratch.arg.size() * sizeof(int32_t)) == 0,
                            "incremental table differs from a full rebuild");
        }

        if (options_.structural_checks) {
            check_invariant(
                std::abs(t_new - t_old) <= range_bound + 1e-9 * (1.0 + std::abs(t_old)),
                "passage time moved more than the resampled path ranges allow");
        }

        const bool changed = new_geod.jumps != old_geod.jumps;
        if (changed) {
            const LineIntervalSet diff = staircase_diff(new_geod, old_geod);
            const auto loc = loc_classify(diff);
            int exc_case = 0;
            if (options_.structural_checks) {
                const auto decomposition = excursion_decompose(old_geod, new_geod);
                exc_case = decomposition.kind == ExcursionDecomposition::Case::Single ? 1 : 2;
                if (loc) {
                    // when the difference localizes at scale ell, one of its
                    // excursions localizes at scale ceil(ell/2) in the window
                    bool some_half_scale = false;
                    for (const auto& ex : decomposition.excursions) {
                        const int vert = ex.m_hi - ex.m_lo;
                        if (vert >= (loc->ell + 1) / 2 &&
                            ex.m_lo >= loc->center - 2 * loc->ell &&
                            ex.m_hi <= loc->center + 2 * loc->ell)
                            some_half_scale = true;
                    }
                    check_invariant(some_half_scale,
                                    "no excursion localizes at half the difference scale");
                }
            }
            const CoarseSet new_band = coarse_set(new_geod, options_.spec, options_.band);
            const int64_t delta_band =
                static_cast<int64_t>(new_band.count_not_in(tp.coarse_band));
            result_.ledger.total += delta_band;
            tp.switches += delta_band;
            if (loc) {
                result_.ledger.buckets[{loc->ell, loc->center}] +=
                    switch_delta(old_geod, new_geod, options_.spec);
            }
            tp.cells.add(new_band);
            result_.hitset.add(new_band);
            tp.coarse_band = new_band;
            if (!first_change_seen) {
                first_change_seen = true;
                rec.changed = true;
                rec.excursion_case = exc_case;
                if (loc) {
                    rec.loc_ell = loc->ell;
                    rec.loc_m = loc->center;
                }
            }
            rec.switch_delta += delta_band;
            ++result_.changed_count;
            changes.push_back({index, old_geod, new_geod});
        }
        tp.passage = t_new;
        tp.geod = std::move(new_geod);
    }
    if (options_.record_events) result_.events.push_back(rec);
    return changes;
}

RunResult DynamicalRun::finish() {
    check_invariant(!finished_, "run already finished");
    finished_ = true;
    // apply_event consumes the stream position itself
    while (next_event_ < events_.size()) apply_event(events_[next_event_]);
    while (next_checkpoint_ < options_.checkpoints.size()) {
        result_.checkpoints.push_back({options_.checkpoints[next_checkpoint_],
                                       result_.ledger.total, result_.hitset.size()});
        ++next_checkpoint_;
    }

    for (auto& tp : tracked_) {
        // refresh pairs whose cached rows are bit-stale from window-external
        // shifts so the reported values match a fresh pass over the field
        if (tp.stale_row != INT_MAX) {
            dp_fill_rows(tp.dp, FieldAccess{&field_}, std::max(tp.stale_row, tp.dp.m_lo));
            tp.passage = tp.dp.value(tp.q.m, tp.q.j);
            tp.geod = backtrack_geodesic(tp.dp, tp.p, tp.q);
        }
        result_.initial_cells.push_back(tp.initial_cells);
        result_.final_cells.push_back(tp.cells.size());
        result_.pair_switch.push_back(tp.switches);
        if (options_.structural_checks) {
            check_invariant(static_cast<int64_t>(tp.cells.size()) <=
                                static_cast<int64_t>(tp.initial_cells) + tp.switches,
                            "hitset exceeded initial coverage plus accumulated switches");
        }
        result_.final_geodesics.push_back(std::move(tp.geod));
        result_.final_passage.push_back(tp.passage);
    }
    return std::move(result_);
}

RunResult run_pair_dynamics(const std::vector<std::pair<Point, Point>>& pairs,
                            const RunOptions& options) {
    DynamicalRun run(pairs, options);
    return run.finish();
}

void evolve_field(BrownianField& field, const MSet& mset, double s, double t, uint64_t seed,
                  double drift) {
    const auto events = sample_events(mset, s, t, seed);
    std::map<std::pair<int, int>, int64_t> firing_count;
    for (const auto& ev : events) {
        const int64_t firing = firing_count[{ev.unit, ev.line}]++;
        field.resample_block(ev.unit, ev.line,
                             derive(seed, Stream::Resample, ev.unit, ev.line, firing), drift);
    }
}

std::vector<std::pair<Point, Point>> hitset_pairs_mesh(int n, double sigma, const GridSpec& spec) {
    require(n >= 1, "mesh needs n >= 1");
    require(sigma > 0.0, "mesh spacing must be positive");
    const int G = spec.grid;
    const double sigma_scaled = sigma * G;
    const int sigma_idx = static_cast<int>(std::nearbyint(sigma_scaled));
    require(sigma_idx >= 1 && std::abs(sigma_scaled - sigma_idx) <= 1e-9 * (1.0 + sigma_scaled),
            "mesh spacing must be a positive multiple of 1/G");
    const int r_idx = static_cast<int>(std::floor(std::pow(n, 2.0 / 3.0) * G + 1e-9));
    const int k_max = r_idx / sigma_idx;

    const Point lo_center{spec.index_of(-static_cast<double>(n)), -n};
    const Point hi_center{spec.index_of(static_cast<double>(n)), n};
    require(spec.index_in_range(lo_center.j - k_max * sigma_idx) &&
                spec.index_in_range(hi_center.j + k_max * sigma_idx),
            "field range does not contain the mesh segments");

    std::vector<std::pair<Point, Point>> out;
    for (int a = -k_max; a <= k_max; ++a) {
        for (int b = -k_max; b <= k_max; ++b) {
            out.push_back({Point{lo_center.j + a * sigma_idx, -n},
                           Point{hi_center.j + b * sigma_idx, n}});
        }
    }
    return out;
}

}  // namespace blpp
