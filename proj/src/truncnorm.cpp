#include "lsland/truncnorm.hpp"

#include <algorithm>
#include <cmath>

#include "lsland/error.hpp"
#include "lsland/normal.hpp"

namespace lsland {

namespace {

void check_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ArgumentError("truncated normal: sigma must be positive and finite");
    }
}

struct Standardized {
    double lo;    // (0 - center) / sigma
    double hi;    // (1 - center) / sigma
    double mass;  // probability of [0, 1] under the untruncated normal
};

Standardized standardize(double center, double sigma) {
    check_sigma(sigma);
    Standardized s{(0.0 - center) / sigma, (1.0 - center) / sigma, 0.0};
    s.mass = normal_mass(s.lo, s.hi);
    if (!(s.mass > 0.0)) {
        throw ArgumentError("truncated normal: no probability mass on [0,1] for this center");
    }
    return s;
}

}  // namespace

double truncnorm_pdf(double u, double center, double sigma) {
    const Standardized s = standardize(center, sigma);
    if (u < 0.0 || u > 1.0) {
        return 0.0;
    }
    return normal_pdf((u - center) / sigma) / (sigma * s.mass);
}

double truncnorm_cdf(double u, double center, double sigma) {
    const Standardized s = standardize(center, sigma);
    if (u <= 0.0) {
        return 0.0;
    }
    if (u >= 1.0) {
        return 1.0;
    }
    return std::clamp(normal_mass(s.lo, (u - center) / sigma) / s.mass, 0.0, 1.0);
}

double truncnorm_tail(double x, double center, double sigma) {
    const Standardized s = standardize(center, sigma);
    if (x <= 0.0) {
        return 1.0;
    }
    if (x >= 1.0) {
        return 0.0;
    }
    return std::clamp(normal_mass((x - center) / sigma, s.hi) / s.mass, 0.0, 1.0);
}

double truncnorm_quantile(double p, double center, double sigma) {
    check_sigma(sigma);
    p = std::clamp(p, 0.0, 1.0);
    const double lo = (0.0 - center) / sigma;
    const double hi = (1.0 - center) / sigma;
    double z = 0.0;
    if (lo >= 0.0) {
        // Interval lies in the upper tail: invert the survival function.
        const double qa = normal_sf(lo);
        const double qb = normal_sf(hi);
        if (!(qa > qb)) {
            return 0.0;
        }
        z = -normal_quantile(qa - p * (qa - qb));
    } else {
        const double pa = normal_cdf(lo);
        const double pb = normal_cdf(hi);
        if (!(pb > pa)) {
            return std::clamp(center, 0.0, 1.0);
        }
        z = normal_quantile(pa + p * (pb - pa));
    }
    return std::clamp(center + sigma * z, 0.0, 1.0);
}

double sample_truncnorm(double center, double sigma, Rng& rng) {
    return truncnorm_quantile(rng.uniform(), center, sigma);
}

}  // namespace lsland
