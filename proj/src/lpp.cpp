#include "blpp/lpp.hpp"

#include <algorithm>
#include <cmath>

namespace blpp {

namespace {

void check_pair(const BrownianField& field, const Point& p, const Point& q) {
    const auto& spec = field.spec();
    require(spec.line_in_range(p.m) && spec.line_in_range(q.m) && spec.index_in_range(p.j) &&
                spec.index_in_range(q.j),
            "endpoints outside field range");
    require(point_leq(p, q), "endpoints are not ordered: need p <= q");
}

}  // namespace

DpForward make_dp_geometry(const Point& p, const Point& q) {
    DpForward dp;
    dp.m_lo = p.m;
    dp.m_hi = q.m;
    dp.j_lo = p.j;
    dp.j_hi = q.j;
    dp.resize();
    return dp;
}

std::pair<double, DpForward> passage_time(const BrownianField& field, const Point& p,
                                          const Point& q) {
    check_pair(field, p, q);
    DpForward dp = make_dp_geometry(p, q);
    dp_fill_rows(dp, FieldAccess{&field}, dp.m_lo);
    return {dp.value(q.m, q.j), std::move(dp)};
}

double passage_time_value(const BrownianField& field, const Point& p, const Point& q) {
    return passage_time(field, p, q).first;
}

Staircase backtrack_geodesic(const DpForward& dp, const Point& p, const Point& q) {
    Staircase xi;
    xi.m_lo = p.m;
    xi.m_hi = q.m;
    xi.jumps.assign(static_cast<size_t>(xi.lines()) + 1, p.j);
    xi.jump(q.m) = q.j;
    for (int k = q.m; k >= p.m + 1; --k) {
        const int32_t* carg = dp.row_arg(k);
        xi.jump(k - 1) = dp.j_lo + carg[xi.jump(k) - dp.j_lo];
    }
    xi.jump(p.m - 1) = p.j;
    return xi;
}

Staircase geodesic(const BrownianField& field, const Point& p, const Point& q) {
    auto [t, dp] = passage_time(field, p, q);
    (void)t;
    return backtrack_geodesic(dp, p, q);
}

BackwardTable::BackwardTable(const BrownianField& field, const Point& p, const Point& q) {
    check_pair(field, p, q);
    refl_m_ = p.m + q.m;
    refl_j_ = p.j + q.j;
    dp_ = make_dp_geometry(p, q);  // reflected window coincides with the original
    dp_fill_rows(dp_, ReflectedAccess{&field, refl_m_, refl_j_}, dp_.m_lo);
}

double RoutedProfile::max_value() const {
    double best = -std::numeric_limits<double>::infinity();
    for (double v : values) best = std::max(best, v);
    return best;
}

int RoutedProfile::argmax_index() const {
    int best_c = 0;
    for (int c = 1; c < static_cast<int>(values.size()); ++c)
        if (values[c] > values[best_c]) best_c = c;
    return j_lo + best_c;
}

RoutedProfile routed_profile(const DpForward& fwd, const BackwardTable& bwd, const Point& p1,
                             const Point& p2, int m, ProfileKind kind) {
    const int via_top = kind == ProfileKind::Split ? m + 1 : m;
    require(m >= p1.m && via_top <= p2.m, "profile line outside the feasible row range");
    RoutedProfile out;
    out.m = m;
    out.kind = kind;
    out.j_lo = p1.j;
    const int W = p2.j - p1.j + 1;
    out.values.resize(W);
    for (int c = 0; c < W; ++c)
        out.values[c] = fwd.value(m, p1.j + c) + bwd.value(via_top, p1.j + c);
    return out;
}

RoutedProfile routed_profile(const BrownianField& field, const Point& p1, const Point& p2, int m,
                             ProfileKind kind) {
    check_pair(field, p1, p2);
    auto [t, fwd] = passage_time(field, p1, p2);
    (void)t;
    BackwardTable bwd(field, p1, p2);
    return routed_profile(fwd, bwd, p1, p2, m, kind);
}

CoarseSet peak_set_from_profile(const RoutedProfile& profile, const GridSpec& spec,
                                const Point& p1, const Point& p2, double alpha) {
    const int G = spec.grid;
    const double row_max = profile.max_value();
    // cells i with [i, i+1] meeting [x_{p1}, x_{p2}]
    const int i_lo = spec.x_min + (p1.j + G - 1) / G - 1;
    const int i_hi = spec.x_min + p2.j / G;
    std::vector<Cell> cells;
    for (int i = i_lo; i <= i_hi; ++i) {
        const int j_from = std::max((i - spec.x_min) * G, p1.j);
        const int j_to = std::min((i + 1 - spec.x_min) * G, p2.j);
        double min_gap = std::numeric_limits<double>::infinity();
        for (int j = j_from; j <= j_to; ++j)
            min_gap = std::min(min_gap, row_max - profile.at_index(j));
        if (min_gap <= alpha) cells.push_back({i, profile.m});
    }
    check_invariant(static_cast<int>(cells.size()) <= i_hi - i_lo + 1,
                    "peak cell count exceeds the per-row bound");
    return CoarseSet(std::move(cells));
}

CoarseSet peak_set(const BrownianField& field, const Point& p1, const Point& p2, int m,
                   double alpha) {
    require(alpha >= 0.0, "peak threshold must be nonnegative");
    const auto profile = routed_profile(field, p1, p2, m, ProfileKind::Plain);
    return peak_set_from_profile(profile, field.spec(), p1, p2, alpha);
}

bool twin_peak_event_from_profile(const RoutedProfile& split_profile, double passage,
                                  int geodesic_crossing_j, const GridSpec& spec, int l,
                                  double delta) {
    require(split_profile.kind == ProfileKind::Split, "twin peak events use the split profile");
    const double min_dist = std::pow(static_cast<double>(l), 2.0 / 3.0 - delta);
    const double gap_max = std::pow(static_cast<double>(l), delta);
    const int W = static_cast<int>(split_profile.values.size());
    for (int c = 0; c < W; ++c) {
        const int j = split_profile.j_lo + c;
        const double dist = std::abs(j - geodesic_crossing_j) / static_cast<double>(spec.grid);
        if (dist < min_dist) continue;
        if (passage - split_profile.values[c] <= gap_max) return true;
    }
    return false;
}

bool twin_peak_event(const BrownianField& field, int n, int m, int l, double delta) {
    require(l >= 1 && l <= n, "twin peak scale outside [1, n]");
    require(delta > 0.0, "twin peak exponent must be positive");
    const auto& spec = field.spec();
    const Point p{spec.index_of(0.0), 0};
    const Point q{spec.index_of(static_cast<double>(n)), n};
    require(m >= p.m && m + 1 <= q.m, "profile line infeasible for the split profile");
    auto [t, fwd] = passage_time(field, p, q);
    BackwardTable bwd(field, p, q);
    const auto profile = routed_profile(fwd, bwd, p, q, m, ProfileKind::Split);
    const Staircase gamma = backtrack_geodesic(fwd, p, q);
    return twin_peak_event_from_profile(profile, t, gamma.jump(m), spec, l, delta);
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Pair DP over sorted position pairs (left <= right), with sharing allowed
// only in the boundary columns of the window.
double disjoint_pair_value(const BrownianField& field, const Point& p, const Point& q) {
    const int W = q.j - p.j + 1;
    const auto w_at = [&](int k, int c) { return field.line(k)[p.j + c]; };
    const int last = W - 1;

    std::vector<double> D(static_cast<size_t>(W) * W, kNegInf);
    std::vector<double> H(static_cast<size_t>(W) * W, kNegInf);
    std::vector<double> Dn(static_cast<size_t>(W) * W, kNegInf);

    // first line: the left path must stay at the left edge
    for (int w = 0; w < W; ++w) D[0 * W + w] = w_at(p.m, w) - w_at(p.m, 0);

    for (int k = p.m + 1; k <= q.m; ++k) {
        // G(v', w') = D(v', w') - W_k(v') - W_k(w')
        // H(v, w') = max_{v' <= v} G(v', w')
        for (int wp = 0; wp < W; ++wp) {
            double run = kNegInf;
            for (int v = 0; v < W; ++v) {
                run = std::max(run, D[static_cast<size_t>(v) * W + wp] - w_at(k, v) - w_at(k, wp));
                H[static_cast<size_t>(v) * W + wp] = run;
            }
        }
        const double g_corner = D[0] - 2.0 * w_at(k, 0);
        for (auto& x : Dn) x = kNegInf;
        for (int v = 0; v < W; ++v) {
            // case A: right path entered strictly right of v
            double run = kNegInf;
            for (int w = v; w < W; ++w) {
                if (w > v) run = std::max(run, H[static_cast<size_t>(v) * W + w]);
                double best = run;
                if (v == 0) best = std::max(best, g_corner);  // both at the left edge
                if (v == last && w == last)
                    best = std::max(best, H[static_cast<size_t>(last) * W + last]);
                if (best == kNegInf) continue;
                // verticals after this line: a shared interior column is not allowed
                if (k < q.m && v == w && v != 0 && v != last) continue;
                Dn[static_cast<size_t>(v) * W + w] = best + w_at(k, v) + w_at(k, w);
            }
        }
        std::swap(D, Dn);
    }
    return D[static_cast<size_t>(last) * W + last];
}

}  // namespace

double disjoint_passage(const BrownianField& field, const Point& p, const Point& q, int k) {
    check_pair(field, p, q);
    require(k == 1 || k == 2, "disjoint passage implemented for k in {1, 2} only");
    if (k == 1) return passage_time_value(field, p, q);
    return disjoint_pair_value(field, p, q);
}

double line_ensemble_point(const BrownianField& field, int n, int k, double x_scaled) {
    const auto& spec = field.spec();
    require(n >= 1, "line ensemble needs n >= 1");
    require(k == 1 || k == 2, "line ensemble implemented for k in {1, 2} only");
    const double n13 = std::cbrt(static_cast<double>(n));
    require(x_scaled > -0.5 * n13, "scaled coordinate below the feasible range");
    const double y = n + 2.0 * n13 * n13 * x_scaled;
    const Point p{spec.index_of(0.0), 0};
    const Point q{spec.index_of(y), n};
    const double pk = k == 1 ? passage_time_value(field, p, q)
                             : disjoint_passage(field, p, q, 2) - passage_time_value(field, p, q);
    return (pk - 2.0 * n - 2.0 * n13 * n13 * x_scaled) / n13;
}

double q_linear(const Point& p, const Point& q, const GridSpec& spec) {
    return 2.0 * (q.m - p.m) + (spec.x_of(q.j) - spec.x_of(p.j));
}

}  // namespace blpp
