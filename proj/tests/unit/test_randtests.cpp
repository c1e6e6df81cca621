#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "qrng/randtests.hpp"
#include "reference_data.hpp"

using namespace qrng;
using namespace qrng::randtests;
using qrng::testdata::kLongest128;
using qrng::testdata::kPi100;

namespace {

std::vector<std::uint8_t> bits_of(const std::string& s) {
    std::vector<std::uint8_t> v;
    for (char c : s) v.push_back(c == '1');
    return v;
}

std::vector<std::uint8_t> random_bits(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> v(n);
    for (auto& b : v) b = rng() & 1u;
    return v;
}

constexpr auto R = LengthCheck::Relaxed;

}  // namespace

TEST(WorkedExamples, Monobit) {
    EXPECT_NEAR(frequency_monobit(bits_of("1011010101"), R), 0.527089, 1e-4);
    EXPECT_NEAR(frequency_monobit(bits_of("1011010101"), R), 0.527089256865538, 1e-12);
    EXPECT_NEAR(frequency_monobit(bits_of(kPi100)), 0.109598583399116, 1e-12);
    EXPECT_NEAR(frequency_monobit(bits_of(kPi100)), 0.109599, 1e-4);
}

TEST(WorkedExamples, BlockFrequency) {
    EXPECT_NEAR(block_frequency(bits_of("0110011010"), 3, R), 0.801252, 1e-4);
    EXPECT_NEAR(block_frequency(bits_of("0110011010"), 3, R), 0.801251956901201, 1e-12);
    EXPECT_NEAR(block_frequency(bits_of(kPi100), 10), 0.706438449641281, 1e-12);
}

TEST(WorkedExamples, Runs) {
    EXPECT_NEAR(runs(bits_of("1001101011"), R), 0.147232, 1e-4);
    EXPECT_NEAR(runs(bits_of("1001101011"), R), 0.147232255363666, 1e-12);
    EXPECT_NEAR(runs(bits_of(kPi100)), 0.500798, 1e-4);
    EXPECT_NEAR(runs(bits_of(kPi100)), 0.500797917887089, 1e-12);
}

TEST(WorkedExamples, LongestRun) {
    ASSERT_EQ(kLongest128.size(), 128u);
    EXPECT_NEAR(longest_run_of_ones(bits_of(kLongest128)), 0.180609, 1e-4);
    EXPECT_NEAR(longest_run_of_ones(bits_of(kLongest128)), 0.180609318239712, 1e-10);
}

TEST(WorkedExamples, CumulativeSums) {
    EXPECT_NEAR(cumulative_sums(bits_of("1011010111"), Direction::Forward, R), 0.4116588, 1e-4);
    EXPECT_NEAR(cumulative_sums(bits_of("1011010111"), Direction::Forward, R), 0.411658619153802, 1e-12);
    EXPECT_NEAR(cumulative_sums(bits_of(kPi100), Direction::Forward), 0.219194, 1e-4);
    EXPECT_NEAR(cumulative_sums(bits_of(kPi100), Direction::Forward), 0.219193993485627, 1e-12);
    EXPECT_NEAR(cumulative_sums(bits_of(kPi100), Direction::Reverse), 0.114866, 1e-4);
    EXPECT_NEAR(cumulative_sums(bits_of(kPi100), Direction::Reverse), 0.114866215302522, 1e-12);
}

TEST(WorkedExamples, ApproximateEntropy) {
    EXPECT_NEAR(approximate_entropy(bits_of("0100110101"), 3, R), 0.261961, 1e-4);
    EXPECT_NEAR(approximate_entropy(bits_of("0100110101"), 3, R), 0.261961104881665, 1e-12);
    EXPECT_NEAR(approximate_entropy(bits_of(kPi100), 2, R), 0.235301, 1e-4);
    EXPECT_NEAR(approximate_entropy(bits_of(kPi100), 2, R), 0.235300745858983, 1e-12);
}

TEST(WorkedExamples, Serial) {
    const auto a = serial(bits_of("0011011101"), 3, R);
    EXPECT_NEAR(a.first, 0.808792, 1e-4);
    EXPECT_NEAR(a.second, 0.670320, 1e-4);
    EXPECT_NEAR(a.first, 0.808792135410999, 1e-12);
    EXPECT_NEAR(a.second, 0.670320046035639, 1e-12);
    const auto b = serial(bits_of(kPi100), 2);
    EXPECT_NEAR(b.first, 0.256661, 1e-4);
    EXPECT_NEAR(b.second, 0.689157, 1e-4);
    EXPECT_NEAR(b.first, 0.256660776953556, 1e-12);
    EXPECT_NEAR(b.second, 0.689156516779352, 1e-12);
}

TEST(LongestRunTables, MatchPublishedClassProbabilities) {
    const auto small = detail::make_longest_run_params(8, 1, 4);
    EXPECT_NEAR(small.pi[0], 0.2148, 1e-4);
    EXPECT_NEAR(small.pi[1], 0.3672, 1e-4);
    EXPECT_NEAR(small.pi[2], 0.2305, 1e-4);
    EXPECT_NEAR(small.pi[3], 0.1875, 1e-4);
    EXPECT_DOUBLE_EQ(small.pi[0], 55.0 / 256);
    EXPECT_DOUBLE_EQ(small.pi[3], 48.0 / 256);
    const auto medium = detail::make_longest_run_params(128, 4, 6);
    const double published[] = {0.1174035788, 0.242955959, 0.249363483, 0.17517706, 0.102701071, 0.112398847};
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(medium.pi[i], published[i], 1e-8) << i;
    // The tabulated values for 10^4-bit blocks are rounded approximations
    // (off by up to 1.6e-3); these are exact counts of bounded-run strings.
    const auto large = detail::make_longest_run_params(10000, 10, 7);
    const double exact_large[] = {0.08663231107995278, 0.2082006483876034, 0.24841858194169955, 0.19391278674165693,
                                  0.12145848508900442, 0.06801108930393995, 0.07336609745614298};
    const double tabulated_large[] = {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727};
    for (int i = 0; i < 7; ++i) {
        EXPECT_NEAR(large.pi[i], exact_large[i], 1e-12) << i;
        EXPECT_NEAR(large.pi[i], tabulated_large[i], 2e-3) << i;
    }
}

TEST(Degenerate, ConstantSequencesFailEveryTest) {
    for (std::uint8_t value : {0, 1}) {
        const std::vector<std::uint8_t> v(100'000, value);
        EXPECT_LT(frequency_monobit(v), 0.01);
        EXPECT_LT(block_frequency(v), 0.01);
        EXPECT_LT(runs(v), 0.01);
        EXPECT_LT(longest_run_of_ones(v), 0.01);
        EXPECT_LT(cumulative_sums(v, Direction::Forward), 0.01);
        EXPECT_LT(cumulative_sums(v, Direction::Reverse), 0.01);
        EXPECT_LT(approximate_entropy(v, 10), 0.01);
        EXPECT_LT(serial(v, 13).first, 0.01);
    }
}

TEST(Degenerate, AlternatingSequenceFailsRunsAndEntropy) {
    std::vector<std::uint8_t> v(100'000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = i % 2;
    EXPECT_GT(frequency_monobit(v), 0.99);
    EXPECT_LT(runs(v), 0.01);
    EXPECT_LT(approximate_entropy(v, 10), 0.01);
    EXPECT_LT(serial(v, 13).first, 0.01);
}

TEST(Properties, ComplementSymmetry) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto v = random_bits(20'000, seed);
        auto c = v;
        for (auto& b : c) b ^= 1u;
        EXPECT_DOUBLE_EQ(frequency_monobit(v), frequency_monobit(c));
        EXPECT_DOUBLE_EQ(block_frequency(v), block_frequency(c));
        EXPECT_NEAR(runs(v), runs(c), 1e-12);
        EXPECT_DOUBLE_EQ(cumulative_sums(v), cumulative_sums(c));
        EXPECT_NEAR(approximate_entropy(v, 6), approximate_entropy(c, 6), 1e-9);
        EXPECT_NEAR(serial(v, 8).first, serial(c, 8).first, 1e-9);
    }
}

TEST(Properties, ReversalSwapsCumulativeSumsDirection) {
    auto v = random_bits(5000, 17);
    auto r = std::vector<std::uint8_t>(v.rbegin(), v.rend());
    EXPECT_DOUBLE_EQ(cumulative_sums(v, Direction::Forward), cumulative_sums(r, Direction::Reverse));
}

TEST(Properties, PValuesInUnitInterval) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto v = random_bits(1000 + 97 * seed, seed);
        const double ps[] = {frequency_monobit(v),
                             block_frequency(v, 20),
                             runs(v),
                             longest_run_of_ones(v),
                             cumulative_sums(v),
                             cumulative_sums(v, Direction::Reverse),
                             approximate_entropy(v, 3),
                             serial(v, 5).first,
                             serial(v, 5).second};
        for (double p : ps) {
            EXPECT_GE(p, 0.0);
            EXPECT_LE(p, 1.0);
        }
    }
}

TEST(Properties, RandomInputMostlyPasses) {
    int pass = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto v = random_bits(100'000, 1000 + seed);
        const auto s = serial(v, 13);
        for (double p : {frequency_monobit(v), block_frequency(v), runs(v), longest_run_of_ones(v),
                         cumulative_sums(v), approximate_entropy(v, 10), s.first, s.second}) {
            pass += p >= 0.01;
            ++total;
        }
    }
    EXPECT_GE(static_cast<double>(pass) / total, 0.96);
}

TEST(Errors, LengthRequirements) {
    const auto short_bits = bits_of("0101010101");
    EXPECT_THROW(frequency_monobit(short_bits), InsufficientDataError);
    EXPECT_THROW(runs(short_bits), InsufficientDataError);
    EXPECT_THROW(longest_run_of_ones(random_bits(127, 1)), InsufficientDataError);
    EXPECT_THROW(longest_run_of_ones(random_bits(127, 1), R), InsufficientDataError);
    EXPECT_THROW(cumulative_sums(short_bits), InsufficientDataError);
    EXPECT_THROW(approximate_entropy(random_bits(1000, 1), 10), InsufficientDataError);
    EXPECT_NO_THROW(approximate_entropy(random_bits(1000, 1), 3));
    EXPECT_THROW(serial(random_bits(1000, 1), 16), InsufficientDataError);
    EXPECT_THROW(block_frequency(random_bits(200, 1), 300), InsufficientDataError);
    EXPECT_THROW(frequency_monobit({}, R), InsufficientDataError);
}

TEST(Errors, ParameterRanges) {
    const auto v = random_bits(1 << 20, 4);
    EXPECT_THROW(approximate_entropy(v, 0), DomainError);
    EXPECT_THROW(serial(v, 1), DomainError);
    EXPECT_THROW(serial(v, 25, R), DomainError);
}

TEST(Detail, CircularPatternCountsExample) {
    // 0011011101 with m=3: counts of 000..111 over the wrapped sequence
    const auto c = detail::circular_pattern_counts(bits_of("0011011101"), 3);
    EXPECT_EQ(c, (std::vector<std::uint64_t>{0, 1, 1, 2, 1, 2, 2, 1}));
}
