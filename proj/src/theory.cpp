#include "lsland/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lsland/error.hpp"

namespace lsland {

namespace {

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw DataError(std::string("quadrature failure: non-finite ") + what);
    }
}

Grid make_grid(double ell_star, const QuadratureOptions& opts) {
    if (!(ell_star >= 0.0) || !(ell_star < 1.0)) {
        throw ArgumentError("ell_star must lie in [0, 1)");
    }
    return Grid(ell_star, 1.0, opts.points, opts.rule);
}

// Integral of f over [lo, hi] clipped to [knots.front(), knots.back()], split
// at the knots so that every piece is smooth. Each piece gets grid points in
// proportion to its length on the unit interval.
template <class F>
double integrate_pieces(F&& f, double lo, double hi, const std::vector<double>& knots,
                        const QuadratureOptions& opts) {
    lo = std::max(lo, knots.front());
    hi = std::min(hi, knots.back());
    if (!(hi > lo)) {
        return 0.0;
    }
    std::vector<double> cuts{lo};
    for (double k : knots) {
        if (k > lo && k < hi) {
            cuts.push_back(k);
        }
    }
    cuts.push_back(hi);
    std::vector<double> samples;
    double total = 0.0;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        const double a = cuts[p];
        const double b = cuts[p + 1];
        if (!(b > a)) {
            continue;
        }
        const auto share = static_cast<std::size_t>(static_cast<double>(opts.points) * (b - a));
        const Grid grid(a, b, std::max<std::size_t>(33, share | 1), opts.rule);
        samples.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            samples[i] = f(grid.x(i));
        }
        total += grid.integrate(samples);
    }
    return total;
}

void check_epsilons(const std::vector<double>& eps) {
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] >= 0.0) || (i > 0 && eps[i] < eps[i - 1])) {
            throw ArgumentError("epsilon grid must be ascending and non-negative");
        }
    }
}

}  // namespace

void TheoryParams::validate() const {
    if (s < 1) {
        throw ArgumentError("degree s must be >= 1");
    }
    if (b.empty()) {
        throw ArgumentError("branching fractions must start with b_0");
    }
    for (std::size_t k = 0; k < b.size(); ++k) {
        if (!(b[k] >= 0.0 && b[k] <= 1.0)) {
            throw ArgumentError("branching fraction b_" + std::to_string(k) +
                                " must lie in [0, 1]");
        }
    }
    if (!(b_beyond >= 0.0 && b_beyond <= 1.0)) {
        throw ArgumentError("b_beyond must lie in [0, 1]");
    }
    if (!(ell_star >= 0.0 && ell_star < 1.0)) {
        throw ArgumentError("ell_star must lie in [0, 1)");
    }
}

TheoryParams TheoryParams::from_topology(const Topology& topology, NodeId reference) {
    TheoryParams p;
    p.n = topology.size();
    p.s = topology.degree(reference);
    const auto shells = topology.shell_sizes(reference);
    for (std::size_t k = 1; k < shells.size(); ++k) {
        p.b.push_back(topology.branching_fraction(k, reference));
    }
    return p;
}

TheoryParams TheoryParams::clique_power(unsigned m, unsigned d) {
    TheoryParams p;
    p.n = static_cast<std::size_t>(std::llround(std::pow(m, d)));
    p.s = static_cast<std::size_t>(d) * (m - 1);
    for (unsigned k = 1; k <= d; ++k) {
        p.b.push_back(static_cast<double>(d - k + 1) / static_cast<double>(d * k));
    }
    return p;
}

TheoryParams TheoryParams::tree(std::size_t s, std::size_t n) {
    TheoryParams p;
    p.n = n;
    p.s = s;
    p.b_beyond = 1.0;
    return p;
}

double expected_minima_fraction(const PdfSpec& pdf_n, const LocalPdfSpec& pdf_e, std::size_t s,
                                const QuadratureOptions& opts, double ell_star) {
    const Grid grid = make_grid(ell_star, opts);
    std::vector<double> f(grid.size());
    const double sd = static_cast<double>(s);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x(i);
        f[i] = pdf_n.pdf(x) * std::pow(pdf_e.tail(x, x), sd);
    }
    const double out = grid.integrate(f);
    check_finite(out, "minima fraction");
    return out;
}

PreimageTable::PreimageTable(const LocalPdfSpec& pdf_e, const TheoryParams& params,
                             const QuadratureOptions& opts)
    : grid_(make_grid(params.ell_star, opts)) {
    params.validate();
    if (opts.max_k < 1) {
        throw ArgumentError("max_k must be >= 1");
    }
    const std::size_t N = grid_.size();
    const double sd = static_cast<double>(params.s);
    table_.assign(opts.max_k, std::vector<double>(N, 0.0));
    std::vector<double> dens(N);
    std::vector<double> f(N);

    for (std::size_t i = N; i-- > 0;) {
        const double x = grid_.x(i);
        for (std::size_t j = i; j < N; ++j) {
            dens[j] = pdf_e.density(x, grid_.x(j));
        }
        for (std::size_t j = i; j < N; ++j) {
            f[j] = dens[j] * std::pow(pdf_e.tail(grid_.x(j), x), sd - 1.0);
        }
        const double e1 = sd * grid_.integrate_from(i, f);
        check_finite(e1, "first preimage");
        table_[0][i] = e1;
        const double denom = pdf_e.tail(x, x);
        for (std::size_t k = 2; k <= opts.max_k; ++k) {
            const double bk = params.b_at(k - 1);
            if (bk == 0.0 || !(denom > 0.0) || e1 == 0.0) {
                table_[k - 1][i] = 0.0;
                continue;
            }
            const auto& prev = table_[k - 2];
            for (std::size_t j = i; j < N; ++j) {
                f[j] = dens[j] * prev[j];
            }
            const double ek = bk * e1 * grid_.integrate_from(i, f) / denom;
            check_finite(ek, "preimage recursion");
            table_[k - 1][i] = ek;
        }
    }
}

const std::vector<double>& PreimageTable::samples(std::size_t k) const {
    if (k < 1 || k > table_.size()) {
        throw RangeError("preimage depth " + std::to_string(k) + " outside 1.." +
                         std::to_string(table_.size()));
    }
    return table_[k - 1];
}

double PreimageTable::value(double x, std::size_t k) const {
    const auto& f = samples(k);
    if (x >= 1.0) {
        return 0.0;
    }
    return std::max(0.0, grid_.interpolate(f, x));
}

double preimage_recursion(const LocalPdfSpec& pdf_e, const TheoryParams& params, double x,
                          std::size_t k, const QuadratureOptions& opts) {
    if (k < 1 || k > opts.max_k) {
        throw RangeError("preimage depth " + std::to_string(k) + " outside 1.." +
                         std::to_string(opts.max_k));
    }
    return PreimageTable(pdf_e, params, opts).value(x, k);
}

double independent_closed_form(const PdfSpec& g, const TheoryParams& params, double x,
                               std::size_t k) {
    if (k < 1) {
        throw RangeError("preimage depth must be >= 1");
    }
    const double sd = static_cast<double>(params.s);
    const double G = g.tail(x);
    double out = std::pow(sd * std::pow(G, sd), static_cast<double>(k));
    for (std::size_t i = 0; i < k; ++i) {
        out *= params.b_at(i) / (static_cast<double>(i) * sd + 1.0);
    }
    return out;
}

double full_preimage_series(const PdfSpec& g, const TheoryParams& params, double x) {
    const double sd = static_cast<double>(params.s);
    const double base = sd * std::pow(g.tail(x), sd);
    if (base == 0.0) {
        return 0.0;
    }
    double sum = 0.0;
    double term = 1.0;
    for (std::size_t m = 1; m < 100000; ++m) {
        term *= base * params.b_at(m - 1) / (static_cast<double>(m - 1) * sd + 1.0);
        if (term == 0.0) {
            break;
        }
        sum += term;
        if (term < 1e-12 * sum) {
            break;
        }
    }
    return sum;
}

PreimageBounds full_preimage_bounds(double g_val, std::size_t s) {
    if (!(g_val >= 0.0 && g_val <= 1.0)) {
        throw ArgumentError("G value must lie in [0, 1]");
    }
    const double sd = static_cast<double>(s);
    const double gs = std::pow(g_val, sd);
    return {sd * gs * std::exp(sd * gs / (sd + 1.0)), sd * gs * std::exp(gs)};
}

std::vector<CurvePoint> success_curve(const PdfSpec& pdf_n, const LocalPdfSpec& pdf_e,
                                      const TheoryParams& params,
                                      const std::vector<double>& epsilons,
                                      const QuadratureOptions& opts) {
    check_epsilons(epsilons);
    const PreimageTable table(pdf_e, params, opts);
    const Grid& grid = table.grid();
    const double sd = static_cast<double>(params.s);
    std::vector<double> f(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x(i);
        double pre = 1.0;
        for (std::size_t k = 1; k <= table.max_k(); ++k) {
            pre += table.samples(k)[i];
        }
        f[i] = pdf_n.pdf(x) * std::pow(pdf_e.tail(x, x), sd) * pre;
    }
    const auto cum = grid.cumulative(f);
    std::vector<CurvePoint> out;
    out.reserve(epsilons.size());
    for (double eps : epsilons) {
        const double v = eps == 0.0 ? 0.0 : Grid::hermite(grid, cum, f, params.ell_star + eps);
        check_finite(v, "success curve");
        out.push_back({eps, v});
    }
    return out;
}

double uniform_closed_form_minima(std::size_t n, std::size_t s) {
    if (n < 1 || s < 1) {
        throw ArgumentError("n and s must be >= 1");
    }
    return static_cast<double>(n) / static_cast<double>(s + 1);
}

std::vector<CurvePoint> uniform_closed_form_curve(const TheoryParams& params,
                                                  const std::vector<double>& epsilons) {
    check_epsilons(epsilons);
    const double sd = static_cast<double>(params.s);
    std::vector<CurvePoint> out;
    out.reserve(epsilons.size());
    for (double eps : epsilons) {
        const double keep = 1.0 - std::min(eps, 1.0);
        double sum = 0.0;
        double coeff = 1.0;  // s^i prod_{j<i} b_j / (j s + 1)
        for (std::size_t i = 0; i < 100000; ++i) {
            if (i > 0) {
                coeff *= sd * params.b_at(i - 1) / (static_cast<double>(i - 1) * sd + 1.0);
            }
            if (coeff == 0.0) {
                break;
            }
            const double e = static_cast<double>(i + 1) * sd + 1.0;
            const double term = coeff * (1.0 - std::pow(keep, e)) / e;
            sum += term;
            if (term < 1e-15 * sum) {
                break;
            }
        }
        out.push_back({eps, sum});
    }
    return out;
}

ChebyshevBound chebyshev_minima_bound(const PdfSpec& pdf_n, const LocalPdfSpec& pdf_e,
                                      std::size_t s, double sigma, std::size_t n, double delta,
                                      const QuadratureOptions& opts) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw ArgumentError("sigma must be finite and >= 0");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw ArgumentError("diagonal band delta must lie in (0, 1)");
    }
    const double sd = static_cast<double>(s);
    const auto outer_knots = pdf_n.knots();
    const auto inner_knots = pdf_e.knots();

    auto integral = [&](double band) {
        auto outer = [&](double x) {
            const double px = pdf_n.pdf(x);
            if (px == 0.0) {
                return 0.0;
            }
            auto integrand = [&](double y) {
                const double d = pdf_e.density(x, y);
                return d == 0.0 ? 0.0 : d * std::pow(2.0 * (x - y) * (x - y), -sd);
            };
            return px * (integrate_pieces(integrand, 0.0, x - band, inner_knots, opts) +
                         integrate_pieces(integrand, x + band, 1.0, inner_knots, opts));
        };
        return integrate_pieces(outer, 0.0, 1.0, outer_knots, opts);
    };

    const double full = integral(delta);
    if (sigma == 0.0 && std::isfinite(full)) {
        return {0.0, full, delta, false};
    }
    const double half = integral(0.5 * delta);
    const bool diverges = !std::isfinite(full) || !std::isfinite(half) ||
                          half > full * (1.0 + 1e-6);
    const double value = std::pow(sigma, 2.0 * sd) * static_cast<double>(n) * full;
    if (diverges || !std::isfinite(value)) {
        return {std::numeric_limits<double>::infinity(), full, delta, true};
    }
    return {value, full, delta, false};
}

}  // namespace lsland
