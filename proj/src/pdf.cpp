#include "lsland/pdf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "lsland/csv.hpp"
#include "lsland/error.hpp"
#include "lsland/truncnorm.hpp"

namespace lsland {

namespace {

std::vector<double> parse_params(const std::string& text, std::size_t colon, std::size_t count) {
    std::vector<double> out;
    if (colon == std::string::npos) {
        if (count != 0) {
            throw ArgumentError("'" + text + "' needs " + std::to_string(count) + " parameter(s)");
        }
        return out;
    }
    for (const auto& field : split_fields(std::string_view(text).substr(colon + 1))) {
        const auto v = parse_double(field);
        if (!v) {
            throw ArgumentError("bad number '" + field + "' in '" + text + "'");
        }
        out.push_back(*v);
    }
    if (out.size() != count) {
        throw ArgumentError("'" + text + "' needs " + std::to_string(count) + " parameter(s)");
    }
    return out;
}

}  // namespace

PdfSpec PdfSpec::uniform() { return PdfSpec{}; }

PdfSpec PdfSpec::truncnorm(double center, double sigma) {
    if (!std::isfinite(center)) {
        throw ArgumentError("truncnorm center must be finite");
    }
    truncnorm_pdf(0.5, center, sigma);  // validates sigma and the mass on [0, 1]
    PdfSpec p;
    p.kind_ = Kind::TruncNorm;
    p.center_ = center;
    p.sigma_ = sigma;
    return p;
}

PdfSpec PdfSpec::tabulated(std::vector<double> xs, std::vector<double> density) {
    if (xs.size() < 2 || xs.size() != density.size()) {
        throw ArgumentError("tabulated pdf needs at least two (x, density) pairs");
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || xs[i] < 0.0 || xs[i] > 1.0) {
            throw ArgumentError("tabulated pdf: x values must lie in [0, 1]");
        }
        if (i > 0 && !(xs[i] > xs[i - 1])) {
            throw ArgumentError("tabulated pdf: x values must be strictly ascending");
        }
        if (!std::isfinite(density[i]) || density[i] < 0.0) {
            throw ArgumentError("tabulated pdf: densities must be finite and >= 0");
        }
    }
    PdfSpec p;
    p.kind_ = Kind::Tabulated;
    p.cum_.assign(xs.size(), 0.0);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        p.cum_[i] = p.cum_[i - 1] + 0.5 * (density[i] + density[i - 1]) * (xs[i] - xs[i - 1]);
    }
    if (std::abs(p.cum_.back() - 1.0) > 1e-6) {
        throw ArgumentError("tabulated pdf integrates to " + format_double(p.cum_.back()) +
                            ", not 1");
    }
    p.xs_ = std::move(xs);
    p.ds_ = std::move(density);
    return p;
}

double PdfSpec::pdf(double x) const {
    switch (kind_) {
        case Kind::Uniform01:
            return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0;
        case Kind::TruncNorm:
            return truncnorm_pdf(x, center_, sigma_);
        case Kind::Tabulated:
            break;
    }
    if (x < xs_.front() || x > xs_.back()) {
        return 0.0;
    }
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    if (it == xs_.end()) {
        return ds_.back();
    }
    const auto j = static_cast<std::size_t>(it - xs_.begin());
    const double t = (x - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
    return ds_[j - 1] + t * (ds_[j] - ds_[j - 1]);
}

double PdfSpec::cdf(double x) const {
    switch (kind_) {
        case Kind::Uniform01:
            return std::clamp(x, 0.0, 1.0);
        case Kind::TruncNorm:
            return truncnorm_cdf(x, center_, sigma_);
        case Kind::Tabulated:
            break;
    }
    if (x <= xs_.front()) {
        return 0.0;
    }
    if (x >= xs_.back()) {
        return cum_.back();
    }
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const auto j = static_cast<std::size_t>(it - xs_.begin());
    const double dx = x - xs_[j - 1];
    return cum_[j - 1] + 0.5 * (ds_[j - 1] + pdf(x)) * dx;
}

double PdfSpec::tail(double x) const {
    switch (kind_) {
        case Kind::Uniform01:
            return 1.0 - std::clamp(x, 0.0, 1.0);
        case Kind::TruncNorm:
            return truncnorm_tail(x, center_, sigma_);
        case Kind::Tabulated:
            break;
    }
    if (x <= xs_.front()) {
        return cum_.back();
    }
    if (x >= xs_.back()) {
        return 0.0;
    }
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const auto j = static_cast<std::size_t>(it - xs_.begin());
    const double dx = xs_[j] - x;
    return cum_.back() - cum_[j] + 0.5 * (pdf(x) + ds_[j]) * dx;
}

double PdfSpec::support_lo() const {
    if (kind_ != Kind::Tabulated) {
        return 0.0;
    }
    for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
        if (ds_[i] > 0.0 || ds_[i + 1] > 0.0) {
            return xs_[i];
        }
    }
    return xs_.front();
}

double PdfSpec::support_hi() const {
    if (kind_ != Kind::Tabulated) {
        return 1.0;
    }
    for (std::size_t i = xs_.size() - 1; i > 0; --i) {
        if (ds_[i] > 0.0 || ds_[i - 1] > 0.0) {
            return xs_[i];
        }
    }
    return xs_.back();
}

std::vector<double> PdfSpec::knots() const {
    return kind_ == Kind::Tabulated ? xs_ : std::vector<double>{0.0, 1.0};
}

nlohmann::json PdfSpec::to_json() const {
    switch (kind_) {
        case Kind::Uniform01:
            return {{"kind", "uniform"}};
        case Kind::TruncNorm:
            return {{"kind", "truncnorm"}, {"center", center_}, {"sigma", sigma_}};
        case Kind::Tabulated:
            break;
    }
    return {{"kind", "tabulated"}, {"x", xs_}, {"density", ds_}};
}

std::string PdfSpec::describe() const {
    switch (kind_) {
        case Kind::Uniform01:
            return "uniform";
        case Kind::TruncNorm:
            return "truncnorm:" + format_double(center_) + "," + format_double(sigma_);
        case Kind::Tabulated:
            break;
    }
    return "tabulated(" + std::to_string(xs_.size()) + " points)";
}

LocalPdfSpec LocalPdfSpec::independent(PdfSpec g) {
    LocalPdfSpec p;
    p.kind_ = Kind::IndependentOfCenter;
    p.g_ = std::move(g);
    return p;
}

LocalPdfSpec LocalPdfSpec::centered(double sigma) {
    truncnorm_pdf(0.5, 0.5, sigma);
    LocalPdfSpec p;
    p.kind_ = Kind::TruncNormCentered;
    p.sigma_ = sigma;
    return p;
}

double LocalPdfSpec::density(double x, double y) const {
    return is_independent() ? g_.pdf(y) : truncnorm_pdf(y, x, sigma_);
}

double LocalPdfSpec::tail(double x, double from) const {
    return is_independent() ? g_.tail(from) : truncnorm_tail(from, x, sigma_);
}

std::vector<double> LocalPdfSpec::knots() const {
    return is_independent() ? g_.knots() : std::vector<double>{0.0, 1.0};
}

nlohmann::json LocalPdfSpec::to_json() const {
    if (is_independent()) {
        return {{"kind", "independent"}, {"g", g_.to_json()}};
    }
    return {{"kind", "truncnorm-local"}, {"sigma", sigma_}};
}

std::string LocalPdfSpec::describe() const {
    if (is_independent()) {
        return g_.kind() == PdfSpec::Kind::Uniform01 ? "uniform" : "independent:" + g_.describe();
    }
    return "truncnorm-local:" + format_double(sigma_);
}

PdfSpec parse_pdf_spec(const std::string& text) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    if (kind == "uniform") {
        parse_params(text, colon, 0);
        return PdfSpec::uniform();
    }
    if (kind == "truncnorm") {
        const auto p = parse_params(text, colon, 2);
        return PdfSpec::truncnorm(p[0], p[1]);
    }
    if (kind == "tabulated" && colon != std::string::npos) {
        const std::string path = text.substr(colon + 1);
        std::ifstream in(path);
        if (!in) {
            throw DataError("cannot open tabulated pdf '" + path + "'");
        }
        const CsvTable table = read_csv(in);
        const auto xc = table.column("x");
        const auto dc = table.column("density");
        if (!xc || !dc) {
            throw DataError(path + ": header must contain 'x' and 'density'");
        }
        std::vector<double> xs;
        std::vector<double> ds;
        for (const auto& row : table.rows) {
            const auto x = parse_double(row[*xc]);
            const auto d = parse_double(row[*dc]);
            if (!x || !d) {
                throw DataError(path + ": non-numeric entry");
            }
            xs.push_back(*x);
            ds.push_back(*d);
        }
        return PdfSpec::tabulated(std::move(xs), std::move(ds));
    }
    throw ArgumentError("unknown pdf spec '" + text + "'");
}

LocalPdfSpec parse_local_pdf_spec(const std::string& text) {
    if (text == "uniform") {
        return LocalPdfSpec::independent(PdfSpec::uniform());
    }
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    if (kind == "truncnorm-local") {
        return LocalPdfSpec::centered(parse_params(text, colon, 1)[0]);
    }
    if (kind == "independent" && colon != std::string::npos) {
        return LocalPdfSpec::independent(parse_pdf_spec(text.substr(colon + 1)));
    }
    throw ArgumentError("unknown local pdf spec '" + text + "'");
}

}  // namespace lsland
