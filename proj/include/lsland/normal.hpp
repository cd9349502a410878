#pragma once

#include <cmath>
#include <numbers>

namespace lsland {

inline double normal_pdf(double z) noexcept {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double z) noexcept {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// Upper tail 1 - Phi(z), accurate for large positive z.
inline double normal_sf(double z) noexcept {
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

// Phi(hi) - Phi(lo), evaluated on whichever side of zero avoids cancellation.
double normal_mass(double lo, double hi) noexcept;

// Inverse of normal_cdf on (0, 1); +-inf at the endpoints.
double normal_quantile(double p) noexcept;

}  // namespace lsland
