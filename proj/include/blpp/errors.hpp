#pragma once

#include <stdexcept>
#include <string>

namespace blpp {

// Thrown when a runtime structural check fails (these are bugs or corrupted
// state, not usage errors). The CLI maps this to exit code 2.
class InvariantViolation : public std::runtime_error {
public:
    explicit InvariantViolation(const std::string& what) : std::runtime_error(what) {}
};

inline void check_invariant(bool ok, const std::string& what) {
    if (!ok) throw InvariantViolation(what);
}

inline void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace blpp
