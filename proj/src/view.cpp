#include "lsland/view.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "lsland/csv.hpp"
#include "lsland/error.hpp"
#include "lsland/normal.hpp"

namespace lsland {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::uint64_t kShuffleStream = 0x5EA4C4ULL;
constexpr std::uint64_t kFreshStream = 0xF4E5ULL;

double frozen_normal(std::uint64_t seed, NodeId v, std::uint64_t j) {
    return normal_quantile(to_unit_open(mix64(mix64(seed, v), j)));
}

void check_nonneg(double x, const char* what) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw ArgumentError(std::string(what) + " must be finite and >= 0");
    }
}

double parse_number(const std::string& text, const std::string& spec) {
    const auto v = parse_double(text);
    if (!v) {
        throw ArgumentError("bad number '" + text + "' in noise spec '" + spec + "'");
    }
    return *v;
}

}  // namespace

bool is_frozen(const NoiseSpec& spec) noexcept {
    return !std::holds_alternative<noise::GaussianFresh>(spec);
}

void validate_noise(const NoiseSpec& spec, std::size_t n) {
    std::visit(overloaded{
                   [](const noise::None&) {},
                   [](const noise::UniformReplace&) {},
                   [](const noise::GaussianFrozen& g) { check_nonneg(g.sigma, "noise sigma"); },
                   [](const noise::GaussianFresh& g) { check_nonneg(g.sigma, "noise sigma"); },
                   [](const noise::SeedAverage& a) {
                       check_nonneg(a.sigma, "noise sigma");
                       if (a.k < 1) {
                           throw ArgumentError("seed-average needs k >= 1");
                       }
                   },
                   [n](const noise::Scaled& s) {
                       check_nonneg(s.x, "noise scale x");
                       if (s.sigma_base.size() != 1 && s.sigma_base.size() != n) {
                           throw ArgumentError("scaled noise needs 1 or n base sigmas");
                       }
                       for (double b : s.sigma_base) {
                           check_nonneg(b, "base sigma");
                       }
                   },
               },
               spec);
}

NoiseSpec parse_noise_spec(const std::string& text) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    std::vector<std::string> args;
    if (colon != std::string::npos) {
        args = split_fields(std::string_view(text).substr(colon + 1));
    }
    auto want = [&](std::size_t count) {
        if (args.size() != count) {
            throw ArgumentError("noise spec '" + text + "' expects " + std::to_string(count) +
                                " parameter(s)");
        }
    };
    NoiseSpec spec;
    if (kind == "none") {
        want(0);
        spec = noise::None{};
    } else if (kind == "gaussian") {
        want(1);
        spec = noise::GaussianFrozen{parse_number(args[0], text)};
    } else if (kind == "gaussian-fresh") {
        want(1);
        spec = noise::GaussianFresh{parse_number(args[0], text)};
    } else if (kind == "seed-average") {
        want(2);
        const double k = parse_number(args[1], text);
        if (k < 1 || k != std::floor(k) || k > 1e9) {
            throw ArgumentError("seed-average k must be a positive integer");
        }
        spec = noise::SeedAverage{parse_number(args[0], text), static_cast<unsigned>(k)};
    } else if (kind == "uniform-replace") {
        want(0);
        spec = noise::UniformReplace{};
    } else if (kind == "scaled") {
        want(2);
        spec = noise::Scaled{{parse_number(args[1], text)}, parse_number(args[0], text)};
    } else {
        throw ArgumentError("unknown noise mode '" + text + "'");
    }
    validate_noise(spec, 1);
    return spec;
}

std::string describe(const NoiseSpec& spec) {
    return std::visit(
        overloaded{
            [](const noise::None&) { return std::string("none"); },
            [](const noise::UniformReplace&) { return std::string("uniform-replace"); },
            [](const noise::GaussianFrozen& g) { return "gaussian:" + format_double(g.sigma); },
            [](const noise::GaussianFresh& g) {
                return "gaussian-fresh:" + format_double(g.sigma);
            },
            [](const noise::SeedAverage& a) {
                return "seed-average:" + format_double(a.sigma) + "," + std::to_string(a.k);
            },
            [](const noise::Scaled& s) {
                std::string base = s.sigma_base.size() == 1
                                       ? format_double(s.sigma_base[0])
                                       : "per-node(" + std::to_string(s.sigma_base.size()) + ")";
                return "scaled:" + format_double(s.x) + "," + base;
            },
        },
        spec);
}

LandscapeView::LandscapeView(std::shared_ptr<const Landscape> landscape, NoiseSpec noise,
                             std::uint64_t seed)
    : landscape_(std::move(landscape)),
      noise_(std::move(noise)),
      seed_(seed),
      rng_(mix64(seed, kShuffleStream)),
      fresh_(mix64(seed, kFreshStream)) {
    if (!landscape_) {
        throw ArgumentError("view needs a landscape");
    }
    landscape_->validate();
    validate_noise(noise_, landscape_->size());
    cache_.assign(landscape_->size(), std::numeric_limits<double>::quiet_NaN());
}

double LandscapeView::draw(NodeId v) {
    const double base = landscape_->val_loss[v];
    return std::visit(
        overloaded{
            [&](const noise::None&) { return base; },
            [&](const noise::GaussianFrozen& g) {
                return g.sigma == 0.0 ? base : base + g.sigma * frozen_normal(seed_, v, 0);
            },
            [&](const noise::GaussianFresh& g) {
                return g.sigma == 0.0 ? base : base + g.sigma * fresh_.normal();
            },
            [&](const noise::SeedAverage& a) {
                if (a.sigma == 0.0) {
                    return base;
                }
                double sum = 0.0;
                for (unsigned j = 0; j < a.k; ++j) {
                    sum += frozen_normal(seed_, v, j);
                }
                return base + a.sigma * (sum / a.k);
            },
            [&](const noise::UniformReplace&) { return to_unit_open(mix64(mix64(seed_, v), 0)); },
            [&](const noise::Scaled& s) {
                const double sb = s.sigma_base.size() == 1 ? s.sigma_base[0] : s.sigma_base[v];
                if (s.x == 0.0 || sb == 0.0) {
                    return base;
                }
                return base + s.x * sb * frozen_normal(seed_, v, 0);
            },
        },
        noise_);
}

double LandscapeView::observe(NodeId v) {
    if (v >= cache_.size()) {
        throw RangeError("node id " + std::to_string(v) + " out of range for n = " +
                         std::to_string(cache_.size()));
    }
    double& slot = cache_[v];
    if (std::isnan(slot)) {
        slot = draw(v);
        log_.push_back(v);
    }
    return slot;
}

bool LandscapeView::is_cached(NodeId v) const {
    return v < cache_.size() && !std::isnan(cache_[v]);
}

double LandscapeView::peek(NodeId v) const {
    if (v >= cache_.size()) {
        throw RangeError("node id " + std::to_string(v) + " out of range");
    }
    return cache_[v];
}

const std::vector<double>& LandscapeView::observe_all() {
    for (std::size_t v = 0; v < cache_.size(); ++v) {
        observe(static_cast<NodeId>(v));
    }
    return cache_;
}

}  // namespace lsland
