#include "blpp/oracle.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "blpp/errors.hpp"

namespace blpp {

int64_t staircase_count(const Point& p, const Point& q) {
    // nondecreasing sequences of length L in a window of V values:
    // C(V + L - 1, L)
    const int64_t V = q.j - p.j + 1;
    const int64_t L = q.m - p.m;
    long double acc = 1.0L;
    for (int64_t k = 1; k <= L; ++k) acc = acc * (V - 1 + k) / k;
    const long double cap = 4.0e18L;
    return acc > cap ? std::numeric_limits<int64_t>::max() : static_cast<int64_t>(acc + 0.5L);
}

void enumerate_staircases(const GridSpec& spec, const Point& p, const Point& q,
                          const EnumerationBudget& budget,
                          const std::function<void(const Staircase&)>& fn) {
    require(point_leq(p, q), "endpoints are not ordered: need p <= q");
    require(spec.line_in_range(p.m) && spec.line_in_range(q.m) && spec.index_in_range(p.j) &&
                spec.index_in_range(q.j),
            "endpoints outside grid range");
    require(staircase_count(p, q) <= budget.max_staircases, "enumeration budget exceeded");

    Staircase xi;
    xi.m_lo = p.m;
    xi.m_hi = q.m;
    xi.jumps.assign(static_cast<size_t>(xi.lines()) + 1, p.j);
    xi.jumps.back() = q.j;
    const int L = q.m - p.m;  // free jump slots: indices 1..L of xi.jumps
    if (L == 0) {
        fn(xi);
        return;
    }
    // odometer over nondecreasing interior jumps
    for (;;) {
        fn(xi);
        int k = L;
        while (k >= 1 && xi.jumps[k] == q.j) --k;
        if (k < 1) break;
        const int next = xi.jumps[k] + 1;
        for (int idx = k; idx <= L; ++idx) xi.jumps[idx] = next;
    }
}

namespace {

// true when `cand` precedes `best` in the DP backtrack order: smaller jump
// positions compared from the top line downwards
bool backtrack_less(const Staircase& cand, const Staircase& best) {
    for (size_t idx = cand.jumps.size(); idx-- > 0;) {
        if (cand.jumps[idx] != best.jumps[idx]) return cand.jumps[idx] < best.jumps[idx];
    }
    return false;
}

// all shared points of two staircases must sit in the boundary columns
bool strip_disjoint(const Staircase& a, const Staircase& b, int j_lo, int j_hi) {
    const auto interior = [&](int j) { return j > j_lo && j < j_hi; };
    for (int k = a.m_lo; k <= a.m_hi; ++k) {
        // horizontal overlap on line k: as an interval, it avoids the open
        // strip only when it is a single boundary point
        const int lo = std::max(a.jump(k - 1), b.jump(k - 1));
        const int hi = std::min(a.jump(k), b.jump(k));
        if (lo <= hi) {
            const bool boundary_point = lo == hi && (lo == j_lo || lo == j_hi);
            if (!boundary_point && j_lo != j_hi) return false;
        }
        if (k <= a.m_hi - 1) {
            // coinciding verticals between lines k and k+1
            if (a.jump(k) == b.jump(k) && interior(a.jump(k))) return false;
            // vertical of one path crossing a horizontal of the other
            if (interior(a.jump(k)) &&
                (point_on_staircase(b, a.jump(k), k) || point_on_staircase(b, a.jump(k), k + 1)))
                return false;
            if (interior(b.jump(k)) &&
                (point_on_staircase(a, b.jump(k), k) || point_on_staircase(a, b.jump(k), k + 1)))
                return false;
        }
    }
    return true;
}

}  // namespace

BruteResult brute_passage(const BrownianField& field, const Point& p, const Point& q,
                          const EnumerationBudget& budget) {
    BruteResult best;
    best.value = -std::numeric_limits<double>::infinity();
    enumerate_staircases(field.spec(), p, q, budget, [&](const Staircase& xi) {
        const double w = staircase_weight(field, xi);
        if (w > best.value || (w == best.value && backtrack_less(xi, best.maximizer))) {
            best.value = w;
            best.maximizer = xi;
        }
    });
    return best;
}

double brute_disjoint(const BrownianField& field, const Point& p, const Point& q,
                      const EnumerationBudget& budget) {
    std::vector<Staircase> all;
    std::vector<double> weights;
    {
        // stay within budget for the pair enumeration as well
        const int64_t count = staircase_count(p, q);
        require(count <= 100'000 && count * count <= budget.max_staircases,
                "enumeration budget exceeded");
    }
    enumerate_staircases(field.spec(), p, q, budget, [&](const Staircase& xi) {
        all.push_back(xi);
        weights.push_back(staircase_weight(field, xi));
    });
    double best = -std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < all.size(); ++a) {
        for (size_t b = 0; b < all.size(); ++b) {
            if (!strip_disjoint(all[a], all[b], p.j, q.j)) continue;
            best = std::max(best, weights[a] + weights[b]);
        }
    }
    return best;
}

}  // namespace blpp
