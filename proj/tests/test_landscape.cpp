#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "lsland/analysis.hpp"
#include "lsland/error.hpp"
#include "lsland/landscape.hpp"
#include "lsland/normal.hpp"
#include "lsland/truncnorm.hpp"
#include "lsland/view.hpp"

using namespace lsland;

namespace {

// Oracle: untruncated normal cdf through std::erf, not the library's helpers.
double phi_cdf(double z) { return 0.5 * (1.0 + std::erf(z / std::sqrt(2.0))); }

double oracle_pdf(double u, double c, double s) {
    const double z = (u - c) / s;
    const double Z = phi_cdf((1 - c) / s) - phi_cdf((0 - c) / s);
    return std::exp(-0.5 * z * z) / std::sqrt(2 * M_PI) / (s * Z);
}

double oracle_cdf(double u, double c, double s) {
    const double Z = phi_cdf((1 - c) / s) - phi_cdf((0 - c) / s);
    return (phi_cdf((u - c) / s) - phi_cdf(-c / s)) / Z;
}

std::shared_ptr<const Topology> share(Topology t) {
    return std::make_shared<const Topology>(std::move(t));
}

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("lsland_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("landscape") {

TEST_CASE("uniform landscape is deterministic and in range") {
    auto t = share(Topology::clique_power(5, 6));
    const auto a = sample_uniform(t, 7);
    const auto b = sample_uniform(t, 7);
    CHECK(a.val_loss == b.val_loss);
    CHECK(std::all_of(a.val_loss.begin(), a.val_loss.end(),
                      [](double x) { return x >= 0 && x <= 1; }));
    for (std::uint64_t seed : {1u, 2u, 3u, 42u}) {
        const auto l = sample_uniform(t, seed);
        const double mean =
            std::accumulate(l.val_loss.begin(), l.val_loss.end(), 0.0) / l.size();
        CHECK(mean >= 0.49);
        CHECK(mean <= 0.51);
    }
    CHECK(sample_uniform(t, 8).val_loss != a.val_loss);
}

TEST_CASE("truncnorm density against erf oracle") {
    for (double u : {0.0, 0.1, 0.3, 0.77, 1.0}) {
        CHECK(truncnorm_pdf(u, 0.25, 0.18) == doctest::Approx(oracle_pdf(u, 0.25, 0.18)).epsilon(1e-12));
        CHECK(truncnorm_cdf(u, 0.25, 0.18) == doctest::Approx(oracle_cdf(u, 0.25, 0.18)).epsilon(1e-12));
    }
    CHECK(truncnorm_pdf(-0.1, 0.25, 0.18) == 0.0);
    CHECK(truncnorm_pdf(1.1, 0.25, 0.18) == 0.0);
    CHECK_THROWS_AS(truncnorm_pdf(0.5, 0.5, 0.0), ArgumentError);
    CHECK_THROWS_AS(truncnorm_pdf(0.5, 0.5, -1.0), ArgumentError);

    // Fine midpoint rule as an independent normalisation check.
    const int m = 200000;
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        total += truncnorm_pdf((i + 0.5) / m, 0.25, 0.18);
    }
    CHECK(total / m == doctest::Approx(1.0).epsilon(1e-8));

    double best_u = 0.0;
    double best = -1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double u = i / 1000.0;
        if (truncnorm_pdf(u, 0.5, 0.1) > best) {
            best = truncnorm_pdf(u, 0.5, 0.1);
            best_u = u;
        }
    }
    CHECK(best_u == doctest::Approx(0.5));
}

TEST_CASE("truncnorm quantile inverts the cdf, including far tails") {
    for (double c : {-2.0, 0.0, 0.25, 0.9, 3.0}) {
        for (double s : {0.01, 0.18, 1.0, 50.0}) {
            for (double p : {1e-9, 0.01, 0.3, 0.5, 0.8, 0.999}) {
                const double q = truncnorm_quantile(p, c, s);
                CHECK(q >= 0.0);
                CHECK(q <= 1.0);
                if (c >= 0 && c <= 1) {
                    CHECK(truncnorm_cdf(q, c, s) == doctest::Approx(p).epsilon(1e-7));
                }
            }
        }
    }
}

TEST_CASE("sampled truncnorm passes KS against the analytic cdf") {
    Rng rng(123);
    std::vector<double> xs(100000);
    for (double& x : xs) {
        x = sample_truncnorm(0.25, 0.18, rng);
        REQUIRE(x >= 0.0);
        REQUIRE(x <= 1.0);
    }
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = oracle_cdf(xs[i], 0.25, 0.18);
        ks = std::max({ks, std::abs(f - double(i) / xs.size()), std::abs(f - double(i + 1) / xs.size())});
    }
    CHECK(ks < 0.02);

    Rng tight(5);
    for (int i = 0; i < 100; ++i) {
        CHECK(std::abs(sample_truncnorm(0.5, 1e-6, tight) - 0.5) < 1e-4);
    }
}

TEST_CASE("markov truncnorm generator") {
    auto t = share(Topology::clique_power(5, 6));
    const auto frozen = sample_markov_truncnorm(t, 1e-6, 0.25, 0.18, 3);
    for (double x : frozen.val_loss) {
        CHECK(std::abs(x - frozen.val_loss[0]) < 1e-3);
    }
    const auto flat = sample_markov_truncnorm(t, 100.0, 0.25, 0.18, 3);
    const double mean = std::accumulate(flat.val_loss.begin(), flat.val_loss.end(), 0.0) / flat.size();
    double var = 0.0;
    for (double x : flat.val_loss) {
        var += (x - mean) * (x - mean);
    }
    CHECK(var / flat.size() > 0.05);
    CHECK(sample_markov_truncnorm(t, 0.35, 0.25, 0.18, 9).val_loss ==
          sample_markov_truncnorm(t, 0.35, 0.25, 0.18, 9).val_loss);

    std::istringstream in("n 4\n0 1\n2 3\n");
    auto split = share(load_adjacency(in));
    CHECK_THROWS_AS(sample_markov_truncnorm(split, 0.35, 0.25, 0.18, 1), DataError);
    CHECK_THROWS_AS(sample_markov_truncnorm(t, 0.0, 0.25, 0.18, 1), ArgumentError);
}

TEST_CASE("tabular ingestion") {
    auto t = share(Topology::complete(3));
    std::istringstream two("id,val_loss\n2,0.3\n0,0.1\n1,0.2\n");
    const auto l = load_tabular(two, t);
    CHECK(l.val_loss == std::vector<double>{0.1, 0.2, 0.3});
    CHECK_FALSE(l.test_loss.has_value());

    std::istringstream three("id,val_loss,test_loss\n0,0.1,0.5\n1,0.2,0.6\n2,0.3,0.7\n");
    const auto m = load_tabular(three, t);
    REQUIRE(m.test_loss.has_value());
    CHECK(*m.test_loss == std::vector<double>{0.5, 0.6, 0.7});

    std::istringstream dup("id,val_loss\n0,0.1\n0,0.2\n2,0.3\n");
    CHECK_THROWS_WITH_AS(load_tabular(dup, t), doctest::Contains("duplicate or missing id"), DataError);
    std::istringstream short_rows("id,val_loss\n0,0.1\n1,0.2\n");
    CHECK_THROWS_AS(load_tabular(short_rows, t), DataError);
    std::istringstream nonfinite("id,val_loss\n0,0.1\n1,nan\n2,0.3\n");
    CHECK_THROWS_AS(load_tabular(nonfinite, t), DataError);
    std::istringstream inf("id,val_loss\n0,0.1\n1,inf\n2,0.3\n");
    CHECK_THROWS_AS(load_tabular(inf, t), DataError);

    auto eight = share(Topology::clique_power(2, 3));
    std::ostringstream csv;
    csv << "id,val_loss\n";
    for (int v = 0; v < 9; ++v) {
        if (v != 7) {
            csv << v << ",0.5\n";
        }
    }
    std::istringstream missing(csv.str());
    CHECK_THROWS_WITH_AS(load_tabular(missing, eight), doctest::Contains("duplicate or missing id"),
                         DataError);
}

TEST_CASE("save and load round trip") {
    const auto dir = temp_dir("roundtrip");
    auto t = share(Topology::clique_power(5, 6));
    auto l = sample_markov_truncnorm(t, 0.35, 0.25, 0.18, 11);
    l.test_loss = sample_uniform(t, 12).val_loss;
    const auto path = dir / "land.csv";
    save_landscape(l, path);
    CHECK(std::filesystem::exists(dir / "land.meta.json"));
    const auto back = load_landscape(path);
    CHECK(back.val_loss == l.val_loss);
    CHECK(back.test_loss == l.test_loss);
    CHECK(back.meta == l.meta);
    CHECK(back.topology->describe() == "clique-power:5,6");

    std::ifstream in(path);
    std::string line;
    std::size_t rows = 0;
    std::getline(in, line);
    CHECK(line == "id,val_loss,test_loss");
    while (std::getline(in, line)) {
        CHECK_FALSE(line.empty());
        ++rows;
    }
    CHECK(rows == 15625);

    auto side = nlohmann::json::parse(std::ifstream(dir / "land.meta.json"));
    side["format_version"] = 99;
    std::ofstream(dir / "land.meta.json") << side.dump();
    CHECK_THROWS_AS(load_landscape(path), FormatVersionError);
}

}  // TEST_SUITE

TEST_SUITE("view") {

TEST_CASE("no noise returns base losses and counts distinct queries") {
    auto t = share(Topology::complete(5));
    auto l = std::make_shared<const Landscape>(sample_uniform(t, 1));
    LandscapeView view(l, noise::None{}, 0);
    for (NodeId v : {0u, 3u, 3u, 0u, 4u, 3u}) {
        CHECK(view.observe(v) == l->val_loss[v]);
    }
    CHECK(view.queries() == 3);
    CHECK(view.log() == std::vector<NodeId>{0, 3, 4});
    CHECK_THROWS_AS(view.observe(5), RangeError);
}

TEST_CASE("zero sigma and x = 0 reproduce the base losses") {
    auto t = share(Topology::clique_power(3, 3));
    auto l = std::make_shared<const Landscape>(sample_uniform(t, 4));
    for (NoiseSpec spec : {NoiseSpec{noise::GaussianFrozen{0.0}}, NoiseSpec{noise::Scaled{{0.3}, 0.0}},
                           NoiseSpec{noise::SeedAverage{0.0, 3}}}) {
        LandscapeView view(l, spec, 99);
        CHECK(view.observe_all() == l->val_loss);
    }
    LandscapeView base(l, noise::None{}, 1);
    LandscapeView zero(l, noise::GaussianFrozen{0.0}, 2);
    CHECK(find_local_minima(base) == find_local_minima(zero));
}

TEST_CASE("frozen observations do not depend on query order") {
    auto t = share(Topology::clique_power(3, 3));
    auto l = std::make_shared<const Landscape>(sample_uniform(t, 4));
    for (NoiseSpec spec : {NoiseSpec{noise::GaussianFrozen{0.1}}, NoiseSpec{noise::SeedAverage{0.1, 3}},
                           NoiseSpec{noise::UniformReplace{}}, NoiseSpec{noise::Scaled{{0.2}, 2.0}}}) {
        LandscapeView fwd(l, spec, 17);
        LandscapeView rev(l, spec, 17);
        std::vector<double> a(27), b(27);
        for (NodeId v = 0; v < 27; ++v) {
            a[v] = fwd.observe(v);
        }
        for (NodeId v = 27; v-- > 0;) {
            b[v] = rev.observe(v);
        }
        CHECK(a == b);
        CHECK(fwd.observe(5) == a[5]);
    }
}

TEST_CASE("fresh noise is cached at first observation") {
    auto t = share(Topology::complete(4));
    auto l = std::make_shared<const Landscape>(sample_uniform(t, 4));
    LandscapeView view(l, noise::GaussianFresh{0.5}, 3);
    const double first = view.observe(2);
    CHECK(view.observe(2) == first);
    CHECK(view.queries() == 1);
    CHECK_FALSE(view.frozen());
    CHECK_THROWS_AS(successor_map(view), NotFrozenError);
}

TEST_CASE("seed average has variance sigma^2 / k") {
    auto t = share(Topology::complete(2));
    auto l = std::make_shared<const Landscape>(sample_uniform(t, 4));
    const double sigma = 0.2;
    double ss = 0.0;
    double sum = 0.0;
    const int views = 10000;
    for (int i = 0; i < views; ++i) {
        LandscapeView view(l, noise::SeedAverage{sigma, 3}, static_cast<std::uint64_t>(i));
        const double d = view.observe(1) - l->val_loss[1];
        sum += d;
        ss += d * d;
    }
    const double mean = sum / views;
    const double sd = std::sqrt(ss / views - mean * mean);
    CHECK(sd == doctest::Approx(sigma / std::sqrt(3.0)).epsilon(0.05));
}

TEST_CASE("seed average converges to the base losses") {
    auto t = share(Topology::complete(100));
    auto l = std::make_shared<const Landscape>(sample_uniform(t, 4));
    const double sigma = 0.3;
    const unsigned k = 10000;
    LandscapeView view(l, noise::SeedAverage{sigma, k}, 8);
    for (NodeId v = 0; v < 100; ++v) {
        CHECK(std::abs(view.observe(v) - l->val_loss[v]) < 4 * sigma / std::sqrt(double(k)));
    }
}

TEST_CASE("uniform replacement matches uniform sampling in minima counts") {
    auto t = share(Topology::clique_power(3, 3));
    auto base = std::make_shared<const Landscape>(sample_markov_truncnorm(t, 0.05, 0.5, 0.1, 2));
    const int seeds = 400;
    std::vector<double> a, b;
    for (int i = 0; i < seeds; ++i) {
        LandscapeView ur(base, noise::UniformReplace{}, static_cast<std::uint64_t>(i));
        a.push_back(static_cast<double>(find_local_minima(ur).size()));
        auto fresh = std::make_shared<const Landscape>(sample_uniform(t, 100000 + i));
        LandscapeView plain(fresh, noise::None{}, 0);
        b.push_back(static_cast<double>(find_local_minima(plain).size()));
    }
    auto mean_se = [](const std::vector<double>& xs) {
        const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
        double v = 0.0;
        for (double x : xs) {
            v += (x - m) * (x - m);
        }
        return std::pair{m, std::sqrt(v / (xs.size() - 1) / xs.size())};
    };
    const auto [ma, sa] = mean_se(a);
    const auto [mb, sb] = mean_se(b);
    CHECK(std::abs(ma - mb) < 3 * std::sqrt(sa * sa + sb * sb));
}

TEST_CASE("noise spec parsing and validation") {
    CHECK(std::holds_alternative<noise::None>(parse_noise_spec("none")));
    CHECK(std::get<noise::GaussianFrozen>(parse_noise_spec("gaussian:0.1")).sigma == 0.1);
    CHECK(std::get<noise::SeedAverage>(parse_noise_spec("seed-average:0.1,3")).k == 3);
    CHECK(std::get<noise::Scaled>(parse_noise_spec("scaled:2,0.05")).x == 2.0);
    CHECK(describe(parse_noise_spec("gaussian-fresh:0.25")) == "gaussian-fresh:0.25");
    CHECK_THROWS_AS(parse_noise_spec("gaussian:-1"), ArgumentError);
    CHECK_THROWS_AS(parse_noise_spec("seed-average:0.1,0"), ArgumentError);
    CHECK_THROWS_AS(parse_noise_spec("laplace:1"), ArgumentError);
    CHECK_THROWS_AS(parse_noise_spec("gaussian"), ArgumentError);
}

}  // TEST_SUITE
