#pragma once

#include <cstdint>
#include <functional>

#include "blpp/field.hpp"
#include "blpp/staircase.hpp"

namespace blpp {

// Exhaustive reference implementations for tiny instances. They share the
// leftmost tie rule with the DP code so comparisons are exact contracts.

struct EnumerationBudget {
    int64_t max_staircases = 10'000'000;
};

// Closed-form count of grid staircases from p to q.
int64_t staircase_count(const Point& p, const Point& q);

// Visit every nondecreasing jump vector exactly once. Throws when the count
// exceeds the budget.
void enumerate_staircases(const GridSpec& spec, const Point& p, const Point& q,
                          const EnumerationBudget& budget,
                          const std::function<void(const Staircase&)>& fn);

struct BruteResult {
    double value = 0.0;
    Staircase maximizer;
};

// Max staircase weight by enumeration; among exact ties the maximizer the DP
// backtrack would pick (smallest jump positions from the top line down).
BruteResult brute_passage(const BrownianField& field, const Point& p, const Point& q,
                          const EnumerationBudget& budget = {});

// Max total weight over ordered pairs of staircases that are disjoint inside
// the open vertical strip between the endpoints; -inf when no pair qualifies.
double brute_disjoint(const BrownianField& field, const Point& p, const Point& q,
                      const EnumerationBudget& budget = {});

}  // namespace blpp
