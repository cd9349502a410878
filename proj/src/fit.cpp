#include "lsland/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lsland/error.hpp"
#include "lsland/landscape.hpp"
#include "lsland/truncnorm.hpp"
#include "lsland/view.hpp"

namespace lsland {

namespace {

constexpr std::size_t kBins = 50;
constexpr std::size_t kMinPoints = 100;

}  // namespace

GlobalFit fit_global_truncnorm(std::span<const double> losses) {
    if (losses.size() < kMinPoints) {
        throw DataError("insufficient data: histogram fit needs at least " +
                        std::to_string(kMinPoints) + " losses, got " +
                        std::to_string(losses.size()));
    }
    const double width = 1.0 / kBins;
    std::vector<double> hist(kBins, 0.0);
    for (double x : losses) {
        if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
            throw DataError("histogram fit needs losses in [0, 1]");
        }
        const auto bin = std::min(kBins - 1, static_cast<std::size_t>(x / width));
        hist[bin] += 1.0;
    }
    for (double& h : hist) {
        h /= static_cast<double>(losses.size()) * width;
    }

    GlobalFit best{0.0, 0.0, std::numeric_limits<double>::infinity()};
    for (int si = 2; si <= 100; ++si) {
        const double sigma = si / 100.0;
        for (int vi = 0; vi <= 20; ++vi) {
            const double center = vi / 20.0;
            double obj = 0.0;
            double prev = 0.0;
            for (std::size_t b = 0; b < kBins; ++b) {
                const double next = truncnorm_cdf(static_cast<double>(b + 1) * width, center, sigma);
                const double model = (next - prev) / width;
                prev = next;
                obj += (hist[b] - model) * (hist[b] - model);
            }
            if (obj < best.objective) {
                best = {sigma, center, obj};
            }
        }
    }
    return best;
}

LocalFit fit_local_sigma_via_rwa(const std::vector<RwaPoint>& observed,
                                 std::shared_ptr<const Topology> topology,
                                 std::vector<double> candidates, std::uint64_t seed,
                                 const RwaFitOptions& opts) {
    if (candidates.empty()) {
        throw ArgumentError("need at least one candidate sigma");
    }
    for (double c : candidates) {
        if (!(c > 0.0) || !std::isfinite(c)) {
            throw ArgumentError("candidate sigmas must be positive");
        }
    }
    if (observed.size() < 2) {
        throw DataError("observed RWA curve needs lags 0..L with L >= 1");
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    const std::size_t max_lag = observed.back().lag;
    std::vector<std::size_t> lags;
    for (const auto& p : observed) {
        if (p.lag >= 1 && p.rho > 0.05) {
            lags.push_back(p.lag);
        }
    }
    if (lags.empty()) {
        for (const auto& p : observed) {
            if (p.lag >= 1) {
                lags.push_back(p.lag);
            }
        }
    }
    std::vector<double> target(max_lag + 1, 0.0);
    for (const auto& p : observed) {
        if (p.lag > max_lag) {
            throw DataError("observed RWA lags must be ascending");
        }
        target[p.lag] = p.rho;
    }

    LocalFit fit{candidates.front(), std::numeric_limits<double>::infinity(), {}, candidates};
    for (double sigma : candidates) {
        auto land = std::make_shared<const Landscape>(
            sample_markov_truncnorm(topology, sigma, opts.root_center, opts.root_sigma, seed));
        LandscapeView view(land, noise::None{}, seed);
        const auto curve = rwa(view, opts.walk_len, max_lag, seed);
        double obj = 0.0;
        for (std::size_t t : lags) {
            const double d = curve[t].rho - target[t];
            obj += d * d;
        }
        fit.objectives.push_back(obj);
        if (obj < fit.objective) {
            fit.objective = obj;
            fit.sigma = sigma;
        }
    }
    return fit;
}

}  // namespace lsland
