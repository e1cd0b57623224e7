#include "blpp/staircase.hpp"

namespace blpp {

double staircase_weight(const BrownianField& field, const Staircase& xi) {
    xi.validate(field.spec());
    double total = 0.0;
    for (int k = xi.m_lo; k <= xi.m_hi; ++k) {
        const auto w = field.line(k);
        total += w[xi.jump(k)] - w[xi.jump(k - 1)];
    }
    return total;
}

bool point_on_staircase(const Staircase& xi, int j, int m) {
    if (m < xi.m_lo || m > xi.m_hi) return false;
    return j >= xi.jump(m - 1) && j <= xi.jump(m);
}

}  // namespace blpp
