#pragma once

// Seven statistical randomness tests following the reference formulas of
// the NIST SP 800-22 statistical test suite: frequency (monobit), block
// frequency, runs, longest run of ones, cumulative sums, approximate
// entropy and serial. Every test takes one byte (0 or 1) per bit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <sstream>
#include <span>
#include <utility>
#include <vector>

#include "qrng/errors.hpp"
#include "qrng/special_functions.hpp"

namespace qrng::randtests {

using Bits = std::span<const std::uint8_t>;

/// Strict enforces the suite's recommended minimum lengths and parameter
/// ranges. Relaxed only requires that the statistic is defined, which is
/// what the short worked examples need.
enum class LengthCheck { Strict, Relaxed };

enum class Direction { Forward, Reverse };

namespace detail {

inline void require_length(Bits bits, std::size_t strict_min, std::size_t relaxed_min, LengthCheck check,
                           const char* test) {
    const std::size_t need = check == LengthCheck::Strict ? strict_min : relaxed_min;
    if (bits.size() < need) {
        std::ostringstream os;
        os << test << ": need at least " << need << " bits, got " << bits.size();
        throw InsufficientDataError(os.str());
    }
}

inline unsigned floor_log2(std::size_t n) {
    unsigned r = 0;
    while (n >>= 1) ++r;
    return r;
}

/// Occurrences of every m-bit pattern over the sequence extended
/// circularly by its first m - 1 bits.
inline std::vector<std::uint64_t> circular_pattern_counts(Bits bits, unsigned m) {
    std::vector<std::uint64_t> counts(std::size_t{1} << m, 0);
    if (m == 0) {
        return counts;
    }
    const std::size_t n = bits.size();
    const std::uint64_t mask = (std::uint64_t{1} << m) - 1;
    std::uint64_t window = 0;
    for (unsigned i = 0; i + 1 < m; ++i) {
        window = ((window << 1) | bits[i % n]) & mask;
    }
    for (std::size_t i = 0; i < n; ++i) {
        window = ((window << 1) | bits[(i + m - 1) % n]) & mask;
        ++counts[window];
    }
    return counts;
}

/// psi^2_m of the serial test; zero for m <= 0.
inline double psi_squared(Bits bits, int m) {
    if (m <= 0) {
        return 0.0;
    }
    const auto counts = circular_pattern_counts(bits, static_cast<unsigned>(m));
    long double sum = 0.0L;
    for (auto c : counts) {
        sum += static_cast<long double>(c) * static_cast<long double>(c);
    }
    const long double n = static_cast<long double>(bits.size());
    return static_cast<double>(std::ldexp(sum, m) / n - n);
}

/// phi^(m) of the approximate entropy test; zero for m == 0.
inline double apen_phi(Bits bits, unsigned m) {
    if (m == 0) {
        return 0.0;
    }
    const double n = static_cast<double>(bits.size());
    double sum = 0.0;
    for (auto c : circular_pattern_counts(bits, m)) {
        if (c > 0) {
            const double p = static_cast<double>(c) / n;
            sum += p * std::log(p);
        }
    }
    return sum;
}

/// P(longest run of ones in `block` fair bits <= r), by dynamic programming
/// over the length of the trailing run.
inline double longest_run_cdf(std::size_t block, unsigned r) {
    std::vector<double> state(r + 1, 0.0);
    state[0] = 1.0;
    std::vector<double> next(r + 1);
    for (std::size_t i = 0; i < block; ++i) {
        std::fill(next.begin(), next.end(), 0.0);
        for (unsigned j = 0; j <= r; ++j) {
            next[0] += 0.5 * state[j];
            if (j + 1 <= r) next[j + 1] += 0.5 * state[j];
        }
        state.swap(next);
    }
    double total = 0.0;
    for (double s : state) total += s;
    return total;
}

struct LongestRunParams {
    std::size_t block;      // M
    unsigned low;           // first class is "longest run <= low"
    unsigned classes;       // K + 1; last class is "longest run >= low + classes - 1"
    std::vector<double> pi; // class probabilities
};

inline LongestRunParams make_longest_run_params(std::size_t block, unsigned low, unsigned classes) {
    LongestRunParams p{block, low, classes, std::vector<double>(classes)};
    double prev = 0.0;
    for (unsigned i = 0; i + 1 < classes; ++i) {
        const double cdf = longest_run_cdf(block, low + i);
        p.pi[i] = cdf - prev;
        prev = cdf;
    }
    p.pi[classes - 1] = 1.0 - prev;
    return p;
}

/// Block length and class layout by sequence length, as tabulated by the suite.
inline const LongestRunParams& longest_run_params(std::size_t n) {
    static const LongestRunParams small = make_longest_run_params(8, 1, 4);
    static const LongestRunParams medium = make_longest_run_params(128, 4, 6);
    static const LongestRunParams large = make_longest_run_params(10000, 10, 7);
    if (n < 6272) return small;
    if (n < 750000) return medium;
    return large;
}

}  // namespace detail

inline double frequency_monobit(Bits bits, LengthCheck check = LengthCheck::Strict) {
    detail::require_length(bits, 100, 1, check, "frequency_monobit");
    long long s = 0;
    for (auto b : bits) s += b ? 1 : -1;
    return special::erfc(std::abs(static_cast<double>(s)) / std::sqrt(2.0 * static_cast<double>(bits.size())));
}

inline double block_frequency(Bits bits, std::size_t block_len = 128, LengthCheck check = LengthCheck::Strict) {
    detail::require_length(bits, 100, 1, check, "block_frequency");
    if (block_len == 0 || block_len > bits.size()) {
        throw InsufficientDataError("block_frequency: block length must lie in [1, n]");
    }
    const std::size_t blocks = bits.size() / block_len;
    double chi = 0.0;
    for (std::size_t i = 0; i < blocks; ++i) {
        std::size_t ones = 0;
        for (std::size_t j = 0; j < block_len; ++j) ones += bits[i * block_len + j];
        const double d = static_cast<double>(ones) / static_cast<double>(block_len) - 0.5;
        chi += d * d;
    }
    chi *= 4.0 * static_cast<double>(block_len);
    return special::igamc(static_cast<double>(blocks) / 2.0, chi / 2.0);
}

inline double runs(Bits bits, LengthCheck check = LengthCheck::Strict) {
    detail::require_length(bits, 100, 2, check, "runs");
    const double n = static_cast<double>(bits.size());
    std::size_t ones = 0;
    for (auto b : bits) ones += b;
    const double pi = static_cast<double>(ones) / n;
    // Frequency prerequisite: a grossly unbalanced sequence fails outright.
    if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) {
        return 0.0;
    }
    std::size_t v = 1;
    for (std::size_t i = 0; i + 1 < bits.size(); ++i) v += bits[i] != bits[i + 1];
    const double expected = 2.0 * n * pi * (1.0 - pi);
    return special::erfc(std::abs(static_cast<double>(v) - expected) / (2.0 * std::sqrt(2.0 * n) * pi * (1.0 - pi)));
}

inline double longest_run_of_ones(Bits bits, LengthCheck check = LengthCheck::Strict) {
    detail::require_length(bits, 128, 128, check, "longest_run_of_ones");
    const auto& params = detail::longest_run_params(bits.size());
    const std::size_t blocks = bits.size() / params.block;
    std::vector<double> nu(params.classes, 0.0);
    for (std::size_t i = 0; i < blocks; ++i) {
        unsigned longest = 0;
        unsigned run = 0;
        for (std::size_t j = 0; j < params.block; ++j) {
            run = bits[i * params.block + j] ? run + 1 : 0;
            longest = std::max(longest, run);
        }
        const unsigned cls = std::min(std::max(longest, params.low) - params.low, params.classes - 1);
        nu[cls] += 1.0;
    }
    double chi = 0.0;
    for (unsigned i = 0; i < params.classes; ++i) {
        const double expected = static_cast<double>(blocks) * params.pi[i];
        chi += (nu[i] - expected) * (nu[i] - expected) / expected;
    }
    return special::igamc(static_cast<double>(params.classes - 1) / 2.0, chi / 2.0);
}

inline double cumulative_sums(Bits bits, Direction direction = Direction::Forward,
                              LengthCheck check = LengthCheck::Strict) {
    detail::require_length(bits, 100, 1, check, "cumulative_sums");
    const long long n = static_cast<long long>(bits.size());
    long long s = 0;
    long long z = 0;
    for (long long i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(direction == Direction::Forward ? i : n - 1 - i);
        s += bits[idx] ? 1 : -1;
        z = std::max(z, std::abs(s));
    }
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    const double zd = static_cast<double>(z);
    // Summation limits use truncating integer division, as the reference code does.
    double sum1 = 0.0;
    for (long long k = (-n / z + 1) / 4; k <= (n / z - 1) / 4; ++k) {
        sum1 += special::normal_cdf((4.0 * k + 1.0) * zd / sqrt_n) - special::normal_cdf((4.0 * k - 1.0) * zd / sqrt_n);
    }
    double sum2 = 0.0;
    for (long long k = (-n / z - 3) / 4; k <= (n / z - 1) / 4; ++k) {
        sum2 += special::normal_cdf((4.0 * k + 3.0) * zd / sqrt_n) - special::normal_cdf((4.0 * k + 1.0) * zd / sqrt_n);
    }
    return std::clamp(1.0 - sum1 + sum2, 0.0, 1.0);
}

inline double approximate_entropy(Bits bits, unsigned m = 10, LengthCheck check = LengthCheck::Strict) {
    detail::require_length(bits, 100, 1, check, "approximate_entropy");
    if (m < 1 || m > 24) {
        throw DomainError("approximate_entropy: block length m must lie in [1, 24]");
    }
    if (check == LengthCheck::Strict && static_cast<int>(m) >= static_cast<int>(detail::floor_log2(bits.size())) - 5) {
        std::ostringstream os;
        os << "approximate_entropy: m=" << m << " requires more than " << (std::size_t{1} << (m + 6)) << " bits";
        throw InsufficientDataError(os.str());
    }
    const double n = static_cast<double>(bits.size());
    const double apen = detail::apen_phi(bits, m) - detail::apen_phi(bits, m + 1);
    const double chi = 2.0 * n * (std::log(2.0) - apen);
    return special::igamc(std::ldexp(1.0, static_cast<int>(m) - 1), std::max(chi, 0.0) / 2.0);
}

inline std::pair<double, double> serial(Bits bits, unsigned m = 16, LengthCheck check = LengthCheck::Strict) {
    detail::require_length(bits, 100, 1, check, "serial");
    if (m < 2 || m > 24) {
        throw DomainError("serial: block length m must lie in [2, 24]");
    }
    if (check == LengthCheck::Strict && static_cast<int>(m) >= static_cast<int>(detail::floor_log2(bits.size())) - 2) {
        std::ostringstream os;
        os << "serial: m=" << m << " requires more than " << (std::size_t{1} << (m + 3)) << " bits";
        throw InsufficientDataError(os.str());
    }
    const int mi = static_cast<int>(m);
    const double psi0 = detail::psi_squared(bits, mi);
    const double psi1 = detail::psi_squared(bits, mi - 1);
    const double psi2 = detail::psi_squared(bits, mi - 2);
    const double del1 = std::max(psi0 - psi1, 0.0);
    const double del2 = std::max(psi0 - 2.0 * psi1 + psi2, 0.0);
    return {special::igamc(std::ldexp(1.0, mi - 2), del1 / 2.0), special::igamc(std::ldexp(1.0, mi - 3), del2 / 2.0)};
}

}  // namespace qrng::randtests
