#pragma once

#include <numbers>

namespace ionfab::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Exact SI Planck constant; hbar derived from it.
inline constexpr double kPlanck = 6.62607015e-34;  // J s
inline constexpr double kHbar = kPlanck / kTwoPi;  // J s

inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg

inline constexpr double hz_to_angular(double hz) { return hz * kTwoPi; }
inline constexpr double angular_to_hz(double rad_per_s) { return rad_per_s / kTwoPi; }

}  // namespace ionfab::units
