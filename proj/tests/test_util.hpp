#pragma once

#include <sstream>
#include <vector>

#include "blpp/field.hpp"

namespace blpp::testutil {

// Build a field with prescribed cumulative line values through the snapshot
// format (each inner vector is one line over all grid points, anchored at 0).
inline BrownianField field_from_lines(const GridSpec& spec,
                                      const std::vector<std::vector<double>>& lines) {
    std::stringstream ss;
    ss << "BLPPFIELD v1 G=" << spec.grid << " x=" << spec.x_min << ":" << spec.x_max
       << " m=" << spec.m_min << ":" << spec.m_max << "\n";
    for (const auto& vals : lines) {
        ss.write(reinterpret_cast<const char*>(vals.data()),
                 static_cast<std::streamsize>(vals.size() * sizeof(double)));
    }
    ss.seekg(0);
    return BrownianField::load(ss);
}

inline BrownianField zero_field(const GridSpec& spec) {
    return field_from_lines(
        spec, std::vector<std::vector<double>>(spec.lines(),
                                               std::vector<double>(spec.width(), 0.0)));
}

}  // namespace blpp::testutil
