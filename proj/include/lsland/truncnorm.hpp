#pragma once

// Normal distribution with center `center` and scale `sigma`, truncated and
// renormalised to the unit interval [0, 1].

#include "lsland/rng.hpp"

namespace lsland {

// Density on [0, 1]; zero outside. Throws ArgumentError if sigma <= 0.
double truncnorm_pdf(double u, double center, double sigma);

double truncnorm_cdf(double u, double center, double sigma);

// Integral of the density over [x, 1].
double truncnorm_tail(double x, double center, double sigma);

// Inverse CDF. p is clamped into (0, 1).
double truncnorm_quantile(double p, double center, double sigma);

double sample_truncnorm(double center, double sigma, Rng& rng);

}  // namespace lsland
