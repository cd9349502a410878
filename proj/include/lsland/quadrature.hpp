#pragma once

// Composite quadrature on a fixed uniform grid.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lsland {

enum class QuadratureRule { Trapezoid, Simpson };

QuadratureRule parse_rule(const std::string& name);
std::string to_string(QuadratureRule rule);

class Grid {
public:
    // `points` nodes from lo to hi inclusive; points >= 4.
    Grid(double lo, double hi, std::size_t points, QuadratureRule rule);

    std::size_t size() const noexcept { return xs_.size(); }
    double lo() const noexcept { return xs_.front(); }
    double hi() const noexcept { return xs_.back(); }
    double step() const noexcept { return h_; }
    double x(std::size_t i) const { return xs_[i]; }
    const std::vector<double>& nodes() const noexcept { return xs_; }
    QuadratureRule rule() const noexcept { return rule_; }

    // Integral over [x_i, hi] of the function sampled as f (length size()).
    // An odd number of Simpson intervals closes with a three-point formula on
    // the first interval.
    double integrate_from(std::size_t i, std::span<const double> f) const;
    double integrate(std::span<const double> f) const { return integrate_from(0, f); }

    // C[i] = integral over [lo, x_i].
    std::vector<double> cumulative(std::span<const double> f) const;

    // Cubic Hermite interpolation of the cumulative integral at x, using f as
    // the derivative at the nodes. x is clamped into [lo, hi].
    static double hermite(const Grid& grid, std::span<const double> cum, std::span<const double> f,
                          double x);

    // Four-point Lagrange interpolation of samples f at x.
    double interpolate(std::span<const double> f, double x) const;

private:
    std::vector<double> xs_;
    double h_;
    QuadratureRule rule_;
};

}  // namespace lsland
