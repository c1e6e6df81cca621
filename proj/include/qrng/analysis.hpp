#pragma once

// Analytic parameter sweeps over mu*eta and the search for the operating
// point with the highest generation probability. Loss is folded into the
// source (mu -> mu*eta), so the detectors are taken as perfect unless an
// explicit DetectorPair is given.

#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qrng/detection.hpp"
#include "qrng/errors.hpp"
#include "qrng/fock_optics.hpp"

namespace qrng::analysis {

using fock::SourceModel;

enum class Spacing { Linear, Logarithmic };

struct SweepSpec {
    double mu_eta_min = 0.05;
    double mu_eta_max = 20.0;
    unsigned points = 60;
    Spacing spacing = Spacing::Logarithmic;
    std::vector<SourceModel> sources{SourceModel::single(), SourceModel::indistinguishable()};
    detection::DetectorPair detectors{};

    void validate() const {
        if (!(mu_eta_min > 0.0) || !(mu_eta_min < mu_eta_max)) {
            throw DomainError("sweep range must satisfy 0 < min < max");
        }
        if (points < 2) {
            throw DomainError("sweep needs at least 2 points");
        }
        if (sources.empty()) {
            throw DomainError("sweep needs at least one source model");
        }
        for (const auto& s : sources) s.validate();
        detectors.validate();
    }

    std::vector<double> grid() const {
        std::vector<double> g(points);
        for (unsigned i = 0; i < points; ++i) {
            const double f = static_cast<double>(i) / static_cast<double>(points - 1);
            g[i] = spacing == Spacing::Linear ? mu_eta_min + f * (mu_eta_max - mu_eta_min)
                                              : mu_eta_min * std::pow(mu_eta_max / mu_eta_min, f);
        }
        g.front() = mu_eta_min;
        g.back() = mu_eta_max;
        return g;
    }
};

struct SweepRow {
    double mu_eta = 0.0;
    SourceModel source;
    double p_gen = std::numeric_limits<double>::quiet_NaN();
    double p_disc = std::numeric_limits<double>::quiet_NaN();
    double p_none = std::numeric_limits<double>::quiet_NaN();
    double contrast = std::numeric_limits<double>::quiet_NaN();
    std::optional<std::string> error;  // set when this point could not be evaluated
};

/// Generation probability for one source at one mu*eta.
inline detection::OutcomeProbabilities evaluate(const SourceModel& source, double mu_eta,
                                                const detection::DetectorPair& det = {},
                                                fock::TruncationPolicy policy = {}) {
    return detection::outcome_probabilities(fock::output_joint_distribution(source, mu_eta, policy), det);
}

inline SweepRow evaluate_row(const SourceModel& source, double mu_eta, const detection::DetectorPair& det) {
    SweepRow row;
    row.mu_eta = mu_eta;
    row.source = source;
    try {
        const auto out = evaluate(source, mu_eta, det);
        row.p_gen = out.p_gen;
        row.p_disc = out.p_disc;
        row.p_none = out.p_none;
        row.contrast = fock::coincidence_contrast(mu_eta, source, det);
    } catch (const TruncationError& e) {
        row.error = e.what();
    } catch (const RangeError& e) {
        row.error = e.what();
    }
    return row;
}

/// One row per (grid point, source), grid-major.
inline std::vector<SweepRow> sweep(const SweepSpec& spec) {
    spec.validate();
    std::vector<SweepRow> rows;
    for (double x : spec.grid()) {
        for (const auto& s : spec.sources) {
            rows.push_back(evaluate_row(s, x, spec.detectors));
        }
    }
    return rows;
}

inline std::string format_number(double v) {
    std::ostringstream os;
    os << std::setprecision(9) << v;
    return os.str();
}

/// Header plus one line per row; failed rows carry nan values followed by
/// a '#' comment line naming the error.
inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "mu_eta,source,p_gen,p_disc,p_none,contrast\n";
    for (const auto& r : rows) {
        os << format_number(r.mu_eta) << ',' << r.source.name() << ',' << format_number(r.p_gen) << ','
           << format_number(r.p_disc) << ',' << format_number(r.p_none) << ',' << format_number(r.contrast) << '\n';
        if (r.error) {
            os << "# error at mu_eta=" << format_number(r.mu_eta) << " source=" << r.source.name() << ": "
               << *r.error << '\n';
        }
    }
    return os.str();
}

/// Parses the output of sweep_to_csv; '#' lines are skipped.
inline std::vector<SweepRow> sweep_from_csv(std::string_view text) {
    std::vector<SweepRow> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "mu_eta,source,p_gen,p_disc,p_none,contrast") {
                throw FormatError("sweep CSV: unexpected header '" + line + "'");
            }
            header_seen = true;
            continue;
        }
        std::istringstream fields(line);
        std::string cell[6];
        for (auto& c : cell) {
            if (!std::getline(fields, c, ',')) throw FormatError("sweep CSV: malformed row '" + line + "'");
        }
        SweepRow row;
        try {
            row.mu_eta = std::stod(cell[0]);
            row.source = SourceModel::parse(cell[1]);
            row.p_gen = std::stod(cell[2]);
            row.p_disc = std::stod(cell[3]);
            row.p_none = std::stod(cell[4]);
            row.contrast = std::stod(cell[5]);
        } catch (const DomainError&) {
            throw FormatError("sweep CSV: unknown source in row '" + line + "'");
        } catch (const std::exception&) {
            throw FormatError("sweep CSV: malformed number in row '" + line + "'");
        }
        rows.push_back(row);
    }
    if (!header_seen) throw FormatError("sweep CSV: missing header row");
    return rows;
}

inline std::string sweep_to_text(const std::vector<SweepRow>& rows) {
    // Widths fit 9 significant digits with a 3-digit exponent, plus a gap.
    constexpr int num = 17;
    constexpr int src = 12;
    std::ostringstream os;
    os << std::left << std::setw(num) << "mu_eta" << std::setw(src) << "source" << ' ' << std::setw(num) << "p_gen"
       << std::setw(num) << "p_disc" << std::setw(num) << "p_none"
       << "contrast\n";
    for (const auto& r : rows) {
        os << std::left << std::setw(num) << format_number(r.mu_eta) << std::setw(src) << r.source.name() << ' '
           << std::setw(num) << format_number(r.p_gen) << std::setw(num) << format_number(r.p_disc)
           << std::setw(num) << format_number(r.p_none) << format_number(r.contrast);
        if (r.error) os << "  ! " << *r.error;
        os << '\n';
    }
    return os.str();
}

struct Optimum {
    double mu_eta = 0.0;
    double p_gen = 0.0;
};

struct OptimumOptions {
    double tolerance = 1e-4;
    unsigned prescan_points = 41;
    detection::DetectorPair detectors{};
    fock::TruncationPolicy policy{};
};

/// Maximises P_gen over mu*eta in [lo, hi]. A log-spaced prescan checks that
/// P_gen rises then falls inside the bracket (unimodal, interior peak);
/// golden-section search then narrows the prescan's best cell to `tolerance`.
inline Optimum find_optimum(const SourceModel& source, double lo, double hi, OptimumOptions opt = {}) {
    if (!(lo > 0.0) || !(lo < hi)) {
        throw DomainError("find_optimum: bracket must satisfy 0 < lo < hi");
    }
    if (opt.prescan_points < 5) opt.prescan_points = 5;
    auto p_gen = [&](double x) { return evaluate(source, x, opt.detectors, opt.policy).p_gen; };

    std::vector<double> xs(opt.prescan_points), ys(opt.prescan_points);
    std::size_t best = 0;
    for (unsigned i = 0; i < opt.prescan_points; ++i) {
        xs[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (opt.prescan_points - 1));
        ys[i] = p_gen(xs[i]);
        if (ys[i] > ys[best]) best = i;
    }
    if (best == 0 || best + 1 == xs.size()) {
        std::ostringstream os;
        os << "find_optimum: bracket [" << lo << ", " << hi << "] does not straddle the peak of P_gen for "
           << source.name();
        throw RangeError(os.str());
    }
    // Truncation perturbs P_gen by at most the discarded tail mass.
    const double slack = opt.policy.tail_mass;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const bool rising = i <= best;
        if ((rising && ys[i] < ys[i - 1] - slack) || (!rising && ys[i] > ys[i - 1] + slack)) {
            std::ostringstream os;
            os << "find_optimum: P_gen is not unimodal over [" << lo << ", " << hi << "] for " << source.name();
            throw RangeError(os.str());
        }
    }

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = xs[best - 1];
    double b = xs[best + 1];
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = p_gen(c);
    double fd = p_gen(d);
    while (b - a > opt.tolerance) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = p_gen(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = p_gen(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, p_gen(x)};
}

}  // namespace qrng::analysis
