#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "blpp/coarse.hpp"
#include "blpp/errors.hpp"
#include "blpp/field.hpp"
#include "blpp/staircase.hpp"

namespace blpp {

// Forward best-weight table for a point pair: for each line k and grid index
// j in the window, val holds the best weight from the source to (j, k), and
// arg the (leftmost) prefix-argmax position used by line k's recurrence.
// Rows depend only on rows below them, so after a block resample at line m
// only rows >= m need refilling.
struct DpForward {
    int m_lo = 0, m_hi = 0;
    int j_lo = 0, j_hi = 0;
    std::vector<double> val;
    std::vector<int32_t> arg;

    int width() const { return j_hi - j_lo + 1; }
    int rows() const { return m_hi - m_lo + 1; }
    void resize() {
        val.assign(static_cast<size_t>(rows()) * width(), 0.0);
        arg.assign(static_cast<size_t>(rows()) * width(), 0);
    }
    double* row_val(int k) { return val.data() + static_cast<size_t>(k - m_lo) * width(); }
    const double* row_val(int k) const {
        return val.data() + static_cast<size_t>(k - m_lo) * width();
    }
    int32_t* row_arg(int k) { return arg.data() + static_cast<size_t>(k - m_lo) * width(); }
    const int32_t* row_arg(int k) const {
        return arg.data() + static_cast<size_t>(k - m_lo) * width();
    }
    double value(int k, int j) const { return row_val(k)[j - j_lo]; }
};

// Fill rows >= from_row. wfn(k, j) must return W_k at grid index j.
template <typename WFn>
void dp_fill_rows(DpForward& dp, const WFn& wfn, int from_row) {
    const int W = dp.width();
    int k = from_row;
    if (k <= dp.m_lo) {
        double* v = dp.row_val(dp.m_lo);
        const double base = wfn(dp.m_lo, dp.j_lo);
        for (int c = 0; c < W; ++c) v[c] = wfn(dp.m_lo, dp.j_lo + c) - base;
        k = dp.m_lo + 1;
    }
    for (; k <= dp.m_hi; ++k) {
        const double* prev = dp.row_val(k - 1);
        double* cur = dp.row_val(k);
        int32_t* carg = dp.row_arg(k);
        double best = -std::numeric_limits<double>::infinity();
        int32_t barg = 0;
        for (int c = 0; c < W; ++c) {
            const double w = wfn(k, dp.j_lo + c);
            const double cand = prev[c] - w;
            if (cand > best) {
                best = cand;
                barg = static_cast<int32_t>(c);
            }
            cur[c] = best + w;
            carg[c] = barg;
        }
    }
}

// W accessor on the field itself
struct FieldAccess {
    const BrownianField* field;
    double operator()(int k, int j) const { return field->line(k)[j]; }
};

// W accessor on the point-reflected field; a forward pass through this view
// computes best weights *to* the original sink. Reflection reverses every
// increment, so the values are negated to keep staircase weights intact.
struct ReflectedAccess {
    const BrownianField* field;
    int refl_m = 0;  // p.m + q.m
    int refl_j = 0;  // p.j + q.j
    double operator()(int k, int j) const { return -field->line(refl_m - k)[refl_j - j]; }
};

DpForward make_dp_geometry(const Point& p, const Point& q);

// Last passage time over grid staircases from p to q, with the filled table.
std::pair<double, DpForward> passage_time(const BrownianField& field, const Point& p,
                                          const Point& q);

double passage_time_value(const BrownianField& field, const Point& p, const Point& q);

// The optimal staircase; float ties are broken by the leftmost prefix-argmax
// at every backtrack step.
Staircase geodesic(const BrownianField& field, const Point& p, const Point& q);
Staircase backtrack_geodesic(const DpForward& dp, const Point& p, const Point& q);

// Best weights from (j, k) to q for every window position, via a forward
// pass on the reflected field.
class BackwardTable {
public:
    BackwardTable() = default;
    BackwardTable(const BrownianField& field, const Point& p, const Point& q);
    double value(int k, int j) const { return dp_.value(refl_m_ - k, refl_j_ - j); }

private:
    DpForward dp_;
    int refl_m_ = 0;
    int refl_j_ = 0;
};

enum class ProfileKind { Plain, Split };

// Weight profile of paths routed through line m: Plain forces the path
// through (x, m); Split concatenates a path into (x, m) with one out of
// (x, m+1), which makes the profile locally Brownian in x.
struct RoutedProfile {
    int m = 0;
    ProfileKind kind = ProfileKind::Plain;
    int j_lo = 0;
    std::vector<double> values;

    double at_index(int j) const { return values[j - j_lo]; }
    double max_value() const;
    int argmax_index() const;  // leftmost
};

RoutedProfile routed_profile(const BrownianField& field, const Point& p1, const Point& p2, int m,
                             ProfileKind kind);
RoutedProfile routed_profile(const DpForward& fwd, const BackwardTable& bwd, const Point& p1,
                             const Point& p2, int m, ProfileKind kind);

// Cells on line m whose gap to the row maximum of the plain routed profile is
// at most alpha. The per-row cell count is bounded by the window size plus
// two, which is asserted on every call.
CoarseSet peak_set(const BrownianField& field, const Point& p1, const Point& p2, int m,
                   double alpha);
CoarseSet peak_set_from_profile(const RoutedProfile& profile, const GridSpec& spec,
                                const Point& p1, const Point& p2, double alpha);

// True when the split profile admits a near-maximizer at distance at least
// l^(2/3 - delta) from the geodesic's crossing position, with gap at most
// l^delta.
bool twin_peak_event(const BrownianField& field, int n, int m, int l, double delta);
bool twin_peak_event_from_profile(const RoutedProfile& split_profile, double passage,
                                  int geodesic_crossing_j, const GridSpec& spec, int l,
                                  double delta);

// Maximal total weight of k staircases from p to q that are pairwise disjoint
// inside the open vertical strip between the endpoints. k = 1 is the plain
// passage time; k = 2 runs a pair DP; larger k is not implemented.
double disjoint_passage(const BrownianField& field, const Point& p, const Point& q, int k);

// Scaled line-ensemble value: with y = n + 2 n^{2/3} x_scaled on the grid,
// returns n^{-1/3} (P_{k,n}(y) - 2n - 2 n^{2/3} x_scaled) where P_{k,n} is the
// k-th disjoint passage difference from (0,0) to (y,n).
double line_ensemble_point(const BrownianField& field, int n, int k, double x_scaled);

// First-order passage time approximation 2(t - s) + (y - x) for p = (x,s),
// q = (y,t).
double q_linear(const Point& p, const Point& q, const GridSpec& spec);

}  // namespace blpp
