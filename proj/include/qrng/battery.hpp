#pragma once

// Block-wise application of the randomness tests and the report formats.
//
// CSV report: comment lines "# block_size=<n>", "# significance=<alpha>",
// then the header "test,block,p_value,pass" and one row per test per block.
// p-values are printed with 9 significant digits; pass is 1 or 0.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "qrng/errors.hpp"
#include "qrng/postproc.hpp"
#include "qrng/randtests.hpp"

namespace qrng::randtests {

struct BatteryConfig {
    std::size_t block_size = 1'000'000;
    double significance = 0.01;
    std::size_t block_frequency_len = 128;
    unsigned apen_m = 0;    // 0: largest recommended value for the block size, at most 10
    unsigned serial_m = 0;  // 0: largest recommended value for the block size, at most 16
    unsigned workers = 1;

    unsigned effective_apen_m() const {
        if (apen_m != 0) return apen_m;
        const int limit = static_cast<int>(detail::floor_log2(block_size)) - 6;
        return static_cast<unsigned>(std::clamp(limit, 1, 10));
    }
    unsigned effective_serial_m() const {
        if (serial_m != 0) return serial_m;
        const int limit = static_cast<int>(detail::floor_log2(block_size)) - 3;
        return static_cast<unsigned>(std::clamp(limit, 2, 16));
    }
};

/// p-values of one statistic across all blocks.
struct TestSeries {
    std::string name;
    std::vector<double> p_values;

    std::size_t passes(double significance) const {
        return static_cast<std::size_t>(
            std::count_if(p_values.begin(), p_values.end(), [&](double p) { return p >= significance; }));
    }
};

/// Statistic names in report order. Cumulative sums and serial contribute two each.
inline const std::vector<std::string>& series_names() {
    static const std::vector<std::string> names{"monobit",
                                                "block_frequency",
                                                "runs",
                                                "longest_run",
                                                "cumulative_sums_forward",
                                                "cumulative_sums_reverse",
                                                "approximate_entropy",
                                                "serial_1",
                                                "serial_2"};
    return names;
}

/// Tests of the full suite that this battery does not implement.
inline const std::vector<std::string>& not_run_tests() {
    static const std::vector<std::string> names{"rank",
                                                "discrete_fourier_transform",
                                                "non_overlapping_template",
                                                "overlapping_template",
                                                "universal",
                                                "linear_complexity",
                                                "random_excursions",
                                                "random_excursions_variant"};
    return names;
}

struct TestReport {
    std::size_t block_size = 0;
    std::size_t block_count = 0;
    double significance = 0.01;
    std::vector<TestSeries> series;

    const TestSeries& find(std::string_view name) const {
        for (const auto& s : series) {
            if (s.name == name) return s;
        }
        throw DomainError("no test named '" + std::string(name) + "' in report");
    }

    double pass_fraction(std::string_view name) const {
        const auto& s = find(name);
        return s.p_values.empty() ? 0.0
                                  : static_cast<double>(s.passes(significance)) / static_cast<double>(s.p_values.size());
    }

    /// One row per statistic per block.
    std::string to_csv() const {
        std::ostringstream os;
        os << "# block_size=" << block_size << '\n' << "# significance=" << std::setprecision(9) << significance << '\n';
        os << "test,block,p_value,pass\n";
        for (const auto& s : series) {
            for (std::size_t b = 0; b < s.p_values.size(); ++b) {
                os << s.name << ',' << b << ',' << std::setprecision(9) << s.p_values[b] << ','
                   << (s.p_values[b] >= significance ? 1 : 0) << '\n';
            }
        }
        return os.str();
    }

    std::string to_text() const {
        std::ostringstream os;
        os << "randomness battery: " << block_count << " block(s) of " << block_size << " bits, significance "
           << significance << '\n';
        for (const auto& s : series) {
            for (std::size_t b = 0; b < s.p_values.size(); ++b) {
                os << std::left << std::setw(24) << s.name << " block " << std::setw(4) << b << " p=" << std::fixed
                   << std::setprecision(6) << s.p_values[b] << (s.p_values[b] >= significance ? "  PASS" : "  FAIL")
                   << '\n';
                os.unsetf(std::ios::fixed);
            }
        }
        for (const auto& s : series) {
            os << "summary " << std::left << std::setw(24) << s.name << ' ' << s.passes(significance) << '/'
               << s.p_values.size() << " passed\n";
        }
        for (const auto& name : not_run_tests()) {
            os << "not run " << name << '\n';
        }
        return os.str();
    }

    static TestReport from_csv(std::string_view text) {
        TestReport r;
        std::istringstream in{std::string(text)};
        std::string line;
        bool header_seen = false;
        std::size_t max_block = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                if (line.starts_with("# block_size=")) {
                    r.block_size = std::stoull(line.substr(13));
                    continue;
                }
                if (line.starts_with("# significance=")) {
                    r.significance = std::stod(line.substr(15));
                    continue;
                }
            } catch (const std::exception&) {
                throw FormatError("report CSV: malformed header comment '" + line + "'");
            }
            if (line.starts_with("#")) continue;
            if (!header_seen) {
                if (line != "test,block,p_value,pass") {
                    throw FormatError("report CSV: unexpected header '" + line + "'");
                }
                header_seen = true;
                continue;
            }
            std::istringstream row(line);
            std::string name, block, p, pass;
            if (!std::getline(row, name, ',') || !std::getline(row, block, ',') || !std::getline(row, p, ',') ||
                !std::getline(row, pass)) {
                throw FormatError("report CSV: malformed row '" + line + "'");
            }
            std::size_t b = 0;
            double pv = 0.0;
            try {
                b = std::stoull(block);
                pv = std::stod(p);
            } catch (const std::exception&) {
                throw FormatError("report CSV: malformed row '" + line + "'");
            }
            auto it = std::find_if(r.series.begin(), r.series.end(), [&](const auto& s) { return s.name == name; });
            if (it == r.series.end()) {
                r.series.push_back({name, {}});
                it = r.series.end() - 1;
            }
            if (it->p_values.size() <= b) it->p_values.resize(b + 1, 0.0);
            it->p_values[b] = pv;
            max_block = std::max(max_block, b + 1);
        }
        if (!header_seen) {
            throw FormatError("report CSV: missing header row");
        }
        r.block_count = max_block;
        return r;
    }
};

/// All statistics for a single block, in series_names() order.
inline std::vector<double> evaluate_block(Bits block, const BatteryConfig& cfg) {
    const auto serial_p = serial(block, cfg.effective_serial_m());
    return {frequency_monobit(block),
            block_frequency(block, cfg.block_frequency_len),
            runs(block),
            longest_run_of_ones(block),
            cumulative_sums(block, Direction::Forward),
            cumulative_sums(block, Direction::Reverse),
            approximate_entropy(block, cfg.effective_apen_m()),
            serial_p.first,
            serial_p.second};
}

/// Splits `bits` into consecutive blocks of cfg.block_size (a trailing
/// partial block is ignored) and runs every test on each block.
inline TestReport run_battery(const postproc::BitStream& bits, const BatteryConfig& cfg) {
    if (cfg.block_size == 0 || !(cfg.significance > 0.0 && cfg.significance < 1.0)) {
        throw DomainError("battery needs a positive block size and a significance in (0,1)");
    }
    const std::size_t blocks = bits.size() / cfg.block_size;
    if (blocks == 0) {
        std::ostringstream os;
        os << "insufficient data: " << bits.size() << " bits is less than one block of " << cfg.block_size;
        throw InsufficientDataError(os.str());
    }

    std::vector<std::vector<double>> per_block(blocks);
    std::vector<std::exception_ptr> failures(blocks);
    auto work = [&](std::size_t first, std::size_t step) {
        for (std::size_t b = first; b < blocks; b += step) {
            try {
                const auto block = bits.unpack(b * cfg.block_size, cfg.block_size);
                per_block[b] = evaluate_block(block, cfg);
            } catch (...) {
                failures[b] = std::current_exception();
            }
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(blocks)));
    if (workers == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> threads;
        for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w, workers);
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    TestReport report;
    report.block_size = cfg.block_size;
    report.block_count = blocks;
    report.significance = cfg.significance;
    for (std::size_t i = 0; i < series_names().size(); ++i) {
        TestSeries s{series_names()[i], {}};
        s.p_values.reserve(blocks);
        for (const auto& row : per_block) s.p_values.push_back(row[i]);
        report.series.push_back(std::move(s));
    }
    return report;
}

}  // namespace qrng::randtests
