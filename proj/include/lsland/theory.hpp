#pragma once

// Expected-performance formulas for local search on random landscapes.
//
// Loss support is [0, 1]; integrals run over [ell_star, 1] on a shared grid.

#include <cstddef>
#include <utility>
#include <vector>

#include "lsland/analysis.hpp"
#include "lsland/pdf.hpp"
#include "lsland/quadrature.hpp"
#include "lsland/topology.hpp"

namespace lsland {

struct TheoryParams {
    std::size_t n = 0;
    std::size_t s = 0;
    // b[0] = 1 by convention, b[k] the branching fraction at distance k.
    std::vector<double> b{1.0};
    // Value used for k >= b.size(): 0 for finite graphs, 1 for an idealised
    // infinite tree.
    double b_beyond = 0.0;
    double ell_star = 0.0;

    double b_at(std::size_t k) const noexcept { return k < b.size() ? b[k] : b_beyond; }
    void validate() const;

    // n, s and b_1..b_diameter measured from `reference`.
    static TheoryParams from_topology(const Topology& topology, NodeId reference = 0);
    // Clique-power b's: (d - k + 1) / (d k).
    static TheoryParams clique_power(unsigned m, unsigned d);
    // b == 1 at every distance.
    static TheoryParams tree(std::size_t s, std::size_t n = 0);
};

struct QuadratureOptions {
    std::size_t points = 2048;
    QuadratureRule rule = QuadratureRule::Simpson;
    std::size_t max_k = 5;
};

// (1/n) E|{v : LS*(v) = v}| = integral of pdf_n(x) * tail_e(x, x)^s.
double expected_minima_fraction(const PdfSpec& pdf_n, const LocalPdfSpec& pdf_e, std::size_t s,
                                const QuadratureOptions& opts = {}, double ell_star = 0.0);

// E|LS^-k(v)| for l(v) = x, tabulated for k = 1..max_k on the grid:
//   E_1(x) = s * int_x pdf_e(x, y) * tail_e(y, x)^(s-1) dy
//   E_k(x) = b_{k-1} E_1(x) * int_x pdf_e(x, y) E_{k-1}(y) dy / tail_e(x, x)
class PreimageTable {
public:
    PreimageTable(const LocalPdfSpec& pdf_e, const TheoryParams& params,
                  const QuadratureOptions& opts = {});

    const Grid& grid() const noexcept { return grid_; }
    std::size_t max_k() const noexcept { return table_.size(); }
    // Grid samples of E_k, k in 1..max_k.
    const std::vector<double>& samples(std::size_t k) const;
    // Interpolated E_k(x). Throws RangeError for k = 0 or k > max_k.
    double value(double x, std::size_t k) const;

private:
    Grid grid_;
    std::vector<std::vector<double>> table_;
};

double preimage_recursion(const LocalPdfSpec& pdf_e, const TheoryParams& params, double x,
                          std::size_t k, const QuadratureOptions& opts = {});

// s^k G(x)^(sk) prod_{i<k} b_i / (i s + 1), G(x) = int_x^1 g.
double independent_closed_form(const PdfSpec& g, const TheoryParams& params, double x,
                               std::size_t k);

// Sum over m >= 1 of independent_closed_form; stops when b hits 0 or a term
// drops below 1e-12 of the partial sum.
double full_preimage_series(const PdfSpec& g, const TheoryParams& params, double x);

struct PreimageBounds {
    double lower;
    double upper;
};

// Preimage-only part (v itself excluded):
//   lower = s G^s exp(s G^s / (s+1)), upper = s G^s exp(G^s).
PreimageBounds full_preimage_bounds(double g_val, std::size_t s);

// integral from ell* to ell*+eps of pdf_n(x) tail_e(x,x)^s (1 + sum_k E_k(x)).
std::vector<CurvePoint> success_curve(const PdfSpec& pdf_n, const LocalPdfSpec& pdf_e,
                                      const TheoryParams& params,
                                      const std::vector<double>& epsilons,
                                      const QuadratureOptions& opts = {});

double uniform_closed_form_minima(std::size_t n, std::size_t s);

// sum_i s^i (1 - (1-eps)^((i+1)s+1)) / ((i+1)s+1) * prod_{j<i} b_j / (j s + 1)
std::vector<CurvePoint> uniform_closed_form_curve(const TheoryParams& params,
                                                  const std::vector<double>& epsilons);

struct ChebyshevBound {
    double value;      // +inf when vacuous
    double integral;   // the double integral with the band removed
    double delta;      // band |x - y| < delta excluded
    bool vacuous;
};

// sigma^(2s) n int int pdf_n(x) pdf_e(x, y) (2 (x - y)^2)^(-s) dy dx, with the
// diagonal band excluded. Vacuous when halving the band changes the integral
// (mass near the diagonal) or the value is not finite.
ChebyshevBound chebyshev_minima_bound(const PdfSpec& pdf_n, const LocalPdfSpec& pdf_e,
                                      std::size_t s, double sigma, std::size_t n,
                                      double delta = 1e-3, const QuadratureOptions& opts = {});

}  // namespace lsland
