#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ggs {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = kPi / 2.0;
inline constexpr double kQuarterPi = kPi / 4.0;

// Tolerance for canonical-range boundary decisions (radians).
inline constexpr double kAngleTol = 1e-9;

// Edge/fusion angles live in [-pi/4, pi/4] after canonicalization.
inline bool is_canonical_theta(double theta) {
    return theta >= -kQuarterPi - kAngleTol && theta <= kQuarterPi + kAngleTol;
}

// Vertex tilts live in the open interval (0, pi/2); pi/4 is a proper vertex.
inline bool is_valid_tilt(double alpha) {
    return alpha > 0.0 && alpha < kHalfPi;
}

inline bool is_proper_tilt(double alpha) {
    return std::abs(alpha - kQuarterPi) <= kAngleTol;
}

inline void require_tilt(double alpha, const char* what) {
    if (!is_valid_tilt(alpha)) {
        throw std::invalid_argument(std::string(what) + ": tilt must lie in (0, pi/2)");
    }
}

} // namespace ggs
