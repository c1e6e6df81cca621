#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "qrng/analysis.hpp"

using namespace qrng;
using namespace qrng::analysis;

TEST(SweepSpec, GridEndpointsAndSpacing) {
    SweepSpec s;
    s.mu_eta_min = 0.1;
    s.mu_eta_max = 10.0;
    s.points = 3;
    EXPECT_EQ(s.grid(), (std::vector<double>{0.1, 1.0, 10.0}));
    s.spacing = Spacing::Linear;
    EXPECT_EQ(s.grid(), (std::vector<double>{0.1, 5.05, 10.0}));
}

TEST(SweepSpec, Validation) {
    SweepSpec s;
    s.mu_eta_min = 0.0;
    EXPECT_THROW(s.validate(), DomainError);
    s = {};
    s.mu_eta_min = 5;
    s.mu_eta_max = 1;
    EXPECT_THROW(s.validate(), DomainError);
    s = {};
    s.points = 1;
    EXPECT_THROW(s.validate(), DomainError);
    s = {};
    s.sources.clear();
    EXPECT_THROW(s.validate(), DomainError);
    s = {};
    s.detectors.eta0 = 2;
    EXPECT_THROW(sweep(s), DomainError);
}

TEST(Sweep, RowsPerSourceAndPoint) {
    const auto rows = sweep(SweepSpec{});
    ASSERT_EQ(rows.size(), 120u);
    EXPECT_EQ(rows[0].source, fock::SourceModel::single());
    EXPECT_EQ(rows[1].source, fock::SourceModel::indistinguishable());
    for (const auto& r : rows) {
        EXPECT_FALSE(r.error);
        EXPECT_NEAR(r.p_gen + r.p_disc + r.p_none, 1.0, 1e-12);
    }
}

TEST(Sweep, ReferencePoints) {
    const auto single = evaluate_row(fock::SourceModel::single(), 2 * std::log(2.0), {});
    EXPECT_NEAR(single.p_gen, 0.500, 1e-3);
    const auto indist = evaluate_row(fock::SourceModel::indistinguishable(), 2.1, {});
    EXPECT_NEAR(indist.p_gen, 0.66, 1e-2);
    const auto sat = evaluate_row(fock::SourceModel::single(), 20.0, {});
    EXPECT_GE(sat.p_disc, 0.95);
    EXPECT_NEAR(indist.contrast, fock::coincidence_contrast(2.1), 1e-15);
}

TEST(Sweep, OutOfRangePointReportsErrorRow) {
    const auto row = evaluate_row(fock::SourceModel::indistinguishable(), 500.0, {});
    ASSERT_TRUE(row.error);
    EXPECT_TRUE(std::isnan(row.p_gen));
    const auto csv = sweep_to_csv({row});
    EXPECT_NE(csv.find("\n# error at mu_eta=500 source=indist"), std::string::npos);
}

TEST(SweepCsv, FormatAndRoundTrip) {
    SweepSpec s;
    s.points = 5;
    const auto rows = sweep(s);
    const auto csv = sweep_to_csv(rows);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "mu_eta,source,p_gen,p_disc,p_none,contrast");
    const auto back = sweep_from_csv(csv);
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(back[i].source, rows[i].source);
        EXPECT_NEAR(back[i].p_gen, rows[i].p_gen, 1e-8 * rows[i].p_gen);
        EXPECT_NEAR(back[i].mu_eta, rows[i].mu_eta, 1e-8 * rows[i].mu_eta);
    }
    EXPECT_EQ(sweep_to_csv(back), csv);
}

TEST(SweepCsv, NineSignificantDigits) {
    EXPECT_EQ(format_number(0.661572026123), "0.661572026");
    EXPECT_EQ(format_number(1.0), "1");
    EXPECT_EQ(format_number(2.5e-7), "2.5e-07");
}

TEST(SweepCsv, Malformed) {
    EXPECT_THROW(sweep_from_csv("a,b\n"), FormatError);
    EXPECT_THROW(sweep_from_csv(""), FormatError);
    EXPECT_THROW(sweep_from_csv("mu_eta,source,p_gen,p_disc,p_none,contrast\n1,laser,0,0,0,0\n"), FormatError);
    EXPECT_THROW(sweep_from_csv("mu_eta,source,p_gen,p_disc,p_none,contrast\n1,single,x,0,0,0\n"), FormatError);
    EXPECT_THROW(sweep_from_csv("mu_eta,source,p_gen,p_disc,p_none,contrast\n1,single\n"), FormatError);
}

TEST(SweepText, HasHeaderAndRows) {
    const auto text = sweep_to_text({evaluate_row(fock::SourceModel::single(), 1.0, {})});
    EXPECT_EQ(text.rfind("mu_eta", 0), 0u);
    EXPECT_NE(text.find("single"), std::string::npos);
}

TEST(SweepText, LongValuesStaySeparate) {
    // Small p_none and tiny contrasts print with exponents; every column must still split.
    const auto text = sweep_to_text({evaluate_row(fock::SourceModel::single(), 10.0, {}),
                                     evaluate_row(fock::SourceModel::mixture(0.123456789), 20.0, {})});
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string f;
        int n = 0;
        while (fields >> f) ++n;
        EXPECT_EQ(n, 6) << line;
    }
}

TEST(Optimum, SingleIsTwoLnTwo) {
    const auto o = find_optimum(fock::SourceModel::single(), 0.05, 20.0);
    EXPECT_NEAR(o.mu_eta, 2 * std::log(2.0), 0.05);
    EXPECT_NEAR(o.p_gen, 0.5, 1e-3);
}

TEST(Optimum, IndistinguishableReference) {
    const auto o = find_optimum(fock::SourceModel::indistinguishable(), 0.05, 20.0);
    EXPECT_NEAR(o.mu_eta, 2.118831486, 0.05);
    EXPECT_NEAR(o.p_gen, 0.6615900047, 1e-3);
    EXPECT_GE(o.mu_eta, 2.0);
    EXPECT_LE(o.mu_eta, 2.3);
    EXPECT_GE(o.p_gen, 0.65);
    EXPECT_LE(o.p_gen, 0.67);
}

TEST(Optimum, FineTruncationMatchesClosedFormPeak) {
    OptimumOptions opt;
    opt.policy = {fock::kFineTailMass};
    opt.tolerance = 1e-7;
    const auto o = find_optimum(fock::SourceModel::indistinguishable(), 0.05, 20.0, opt);
    EXPECT_NEAR(o.mu_eta, 2.118831486, 1e-5);
    EXPECT_NEAR(o.p_gen, 0.6615900047, 1e-9);
    const auto s = find_optimum(fock::SourceModel::single(), 0.05, 20.0, opt);
    EXPECT_NEAR(s.mu_eta, 2 * std::log(2.0), 1e-5);
    EXPECT_NEAR(o.p_gen / s.p_gen, 1.32318, 1e-5);
}

TEST(Optimum, BracketMissingPeakIsRangeError) {
    EXPECT_THROW(find_optimum(fock::SourceModel::indistinguishable(), 0.05, 0.5), RangeError);
    EXPECT_THROW(find_optimum(fock::SourceModel::indistinguishable(), 8.0, 20.0), RangeError);
    EXPECT_THROW(find_optimum(fock::SourceModel::indistinguishable(), 1.0, 1.0), DomainError);
    EXPECT_THROW(find_optimum(fock::SourceModel::indistinguishable(), -1.0, 1.0), DomainError);
}
