#include "lsland/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "lsland/error.hpp"

namespace lsland {

QuadratureRule parse_rule(const std::string& name) {
    if (name == "trapezoid") {
        return QuadratureRule::Trapezoid;
    }
    if (name == "simpson") {
        return QuadratureRule::Simpson;
    }
    throw ArgumentError("unknown quadrature rule '" + name + "' (trapezoid or simpson)");
}

std::string to_string(QuadratureRule rule) {
    return rule == QuadratureRule::Simpson ? "simpson" : "trapezoid";
}

Grid::Grid(double lo, double hi, std::size_t points, QuadratureRule rule) : rule_(rule) {
    if (points < 4) {
        throw ArgumentError("quadrature grid needs at least 4 points");
    }
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw ArgumentError("quadrature grid needs lo < hi");
    }
    h_ = (hi - lo) / static_cast<double>(points - 1);
    xs_.resize(points);
    for (std::size_t i = 0; i < points; ++i) {
        xs_[i] = lo + h_ * static_cast<double>(i);
    }
    xs_.back() = hi;
}

double Grid::integrate_from(std::size_t i, std::span<const double> f) const {
    const std::size_t last = xs_.size() - 1;
    if (i >= last) {
        return 0.0;
    }
    const std::size_t m = last - i;
    if (rule_ == QuadratureRule::Trapezoid || m == 1) {
        double sum = 0.5 * (f[i] + f[last]);
        for (std::size_t j = i + 1; j < last; ++j) {
            sum += f[j];
        }
        return sum * h_;
    }
    double total = 0.0;
    std::size_t start = i;
    if (m % 2 == 1) {
        total += h_ / 12.0 * (5.0 * f[i] + 8.0 * f[i + 1] - f[i + 2]);
        start = i + 1;
    }
    double sum = f[start] + f[last];
    for (std::size_t j = start + 1; j < last; ++j) {
        sum += (((j - start) % 2 == 1) ? 4.0 : 2.0) * f[j];
    }
    return total + sum * h_ / 3.0;
}

std::vector<double> Grid::cumulative(std::span<const double> f) const {
    const std::size_t n = xs_.size();
    std::vector<double> c(n, 0.0);
    if (rule_ == QuadratureRule::Trapezoid) {
        for (std::size_t i = 1; i < n; ++i) {
            c[i] = c[i - 1] + 0.5 * h_ * (f[i - 1] + f[i]);
        }
        return c;
    }
    c[1] = h_ / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
    for (std::size_t i = 2; i < n; ++i) {
        if (i % 2 == 0) {
            c[i] = c[i - 2] + h_ / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
        } else {
            c[i] = c[i - 1] + h_ / 12.0 * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]);
        }
    }
    return c;
}

double Grid::hermite(const Grid& grid, std::span<const double> cum, std::span<const double> f,
                     double x) {
    const double h = grid.h_;
    x = std::clamp(x, grid.lo(), grid.hi());
    auto j = static_cast<std::size_t>(std::floor((x - grid.lo()) / h));
    j = std::min(j, grid.size() - 2);
    const double t = (x - grid.xs_[j]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * cum[j] + h10 * h * f[j] + h01 * cum[j + 1] + h11 * h * f[j + 1];
}

double Grid::interpolate(std::span<const double> f, double x) const {
    x = std::clamp(x, lo(), hi());
    const double pos = (x - lo()) / h_;
    auto j = static_cast<std::ptrdiff_t>(std::floor(pos)) - 1;
    j = std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(xs_.size()) - 4);
    double out = 0.0;
    for (std::ptrdiff_t a = 0; a < 4; ++a) {
        double w = 1.0;
        const double xa = xs_[static_cast<std::size_t>(j + a)];
        for (std::ptrdiff_t b = 0; b < 4; ++b) {
            if (a != b) {
                const double xb = xs_[static_cast<std::size_t>(j + b)];
                w *= (x - xb) / (xa - xb);
            }
        }
        out += w * f[static_cast<std::size_t>(j + a)];
    }
    return out;
}

}  // namespace lsland
