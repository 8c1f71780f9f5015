#pragma once

// =============================================================================
// gridbatch - common scalar/index types and error categories
// =============================================================================

#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gridbatch {

using real_t = double;
using index_t = std::int32_t;
using count_t = std::int64_t;

/// Sentinel for entries removed by row/column subsetting (ScatterLookup).
inline constexpr index_t kDropped = -1;

/// 32-bit indices cap matrix dimensions and nnz; validated at construction.
inline constexpr count_t kMaxIndex = std::numeric_limits<index_t>::max();

inline constexpr real_t deg_to_rad(real_t deg) {
    return deg * std::numbers::pi_v<real_t> / 180.0;
}
inline constexpr real_t rad_to_deg(real_t rad) {
    return rad * 180.0 / std::numbers::pi_v<real_t>;
}

// -----------------------------------------------------------------------------
// Error categories. Configuration and structural problems throw; per-task
// numerical trouble inside a batch never does (it is reported in TaskResult).
// -----------------------------------------------------------------------------

/// Malformed input file. Carries a line number when one is known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, long line = -1)
        : std::runtime_error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

/// Inconsistent matrix/grid structure (bad index, missing slack, ...).
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid job/solver configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The one-time pivoting factorization met a matrix it cannot factor.
class SingularError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gridbatch
