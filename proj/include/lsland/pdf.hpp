#pragma once

// Densities on [0, 1] used by the theory module: a global density pdf_n for a
// node's loss and a local density pdf_e(x, y) for a neighbor's loss y given
// the node's loss x.

#include <string>
#include <vector>

#include <json.hpp>

namespace lsland {

class PdfSpec {
public:
    enum class Kind { Uniform01, TruncNorm, Tabulated };

    static PdfSpec uniform();
    static PdfSpec truncnorm(double center, double sigma);
    // Piecewise-linear density through (xs[i], density[i]); zero outside
    // [xs.front(), xs.back()]. xs strictly ascending inside [0, 1], densities
    // >= 0, total mass 1 within 1e-6.
    static PdfSpec tabulated(std::vector<double> xs, std::vector<double> density);

    Kind kind() const noexcept { return kind_; }
    double center() const noexcept { return center_; }
    double sigma() const noexcept { return sigma_; }

    double pdf(double x) const;
    double cdf(double x) const;
    // Mass of [x, 1], computed analytically.
    double tail(double x) const;
    // Smallest x with positive density nearby.
    double support_lo() const;
    double support_hi() const;
    // Points where the density may fail to be smooth: the tabulated x values,
    // or {0, 1}.
    std::vector<double> knots() const;

    nlohmann::json to_json() const;
    std::string describe() const;

private:
    PdfSpec() = default;

    Kind kind_ = Kind::Uniform01;
    double center_ = 0.0;
    double sigma_ = 0.0;
    std::vector<double> xs_;
    std::vector<double> ds_;
    std::vector<double> cum_;  // mass of [xs_[0], xs_[i]]
};

class LocalPdfSpec {
public:
    enum class Kind { IndependentOfCenter, TruncNormCentered };

    static LocalPdfSpec independent(PdfSpec g);
    // pdf_e(x, y) = truncnorm_pdf(y, x, sigma)
    static LocalPdfSpec centered(double sigma);

    Kind kind() const noexcept { return kind_; }
    bool is_independent() const noexcept { return kind_ == Kind::IndependentOfCenter; }
    const PdfSpec& g() const noexcept { return g_; }
    double sigma() const noexcept { return sigma_; }

    double density(double x, double y) const;
    // Integral of pdf_e(x, y) over y in [from, 1].
    double tail(double x, double from) const;
    // Non-smooth points of y -> pdf_e(x, y) (independent of x).
    std::vector<double> knots() const;

    nlohmann::json to_json() const;
    std::string describe() const;

private:
    LocalPdfSpec() : g_(PdfSpec::uniform()) {}

    Kind kind_ = Kind::IndependentOfCenter;
    PdfSpec g_;
    double sigma_ = 0.0;
};

// "uniform", "truncnorm:CENTER,SIGMA", "tabulated:PATH" (CSV `x,density`).
PdfSpec parse_pdf_spec(const std::string& text);
// "uniform", "truncnorm-local:SIGMA", "independent:<pdf spec>".
LocalPdfSpec parse_local_pdf_spec(const std::string& text);

}  // namespace lsland
