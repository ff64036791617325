#include <gtest/gtest.h>

#include <cmath>

#include "ising/susceptibility.hpp"

using namespace ising;

TEST(ChidClosed, Examples) {
    EXPECT_DOUBLE_EQ(chid_closed(1, 0.25), 2.0);
    EXPECT_DOUBLE_EQ(chid_closed(2, 0.5), 0.25);
    EXPECT_DOUBLE_EQ(chid_closed(1, 0.0), 1.0);
    EXPECT_THROW(chid_closed(3, 0.1), UnsupportedError);
    EXPECT_THROW(chid_closed(1, 1.0), DomainError);
}

TEST(ChidQuad, AgainstClosedForms) {
    EXPECT_NEAR(chid_quad(1, 0.25).value, 2.0, 1e-10);
    EXPECT_NEAR(chid_quad(2, 0.5).value, 0.25, 1e-9);
    for (double t : {0.05, 0.3, 0.6, 0.9}) {
        EXPECT_NEAR(chid_quad(1, t).value, chid_closed(1, t), 1e-9) << t;
        EXPECT_NEAR(chid_quad(2, t).value, chid_closed(2, t), 1e-9) << t;
    }
}

TEST(ChidQuad, ThirdSectorLeadingBehaviour) {
    // ratio to t^2/64 tends to 1; at t = 0.04 the higher orders still add 5.3%
    EXPECT_NEAR(chid_quad(3, 1e-4).value / (1e-8 / 64), 1.0, 1e-2);
    EXPECT_NEAR(chid_quad(3, 0.04).value / (0.04 * 0.04 / 64), 1.0533, 1e-4);
}

// Values first obtained from the 3-dim quadrature and the exact series (order 200)
// independently, then frozen.
TEST(ChidQuad, ThirdSectorFrozenValues) {
    auto s = series_chid(3, 200);
    const std::pair<double, double> frozen[] = {
        {0.04, 2.63315389091624e-5}, {0.1, 1.78807767677498e-4}, {0.3, 2.2265949117535e-3}};
    for (auto [t, v] : frozen) {
        EXPECT_NEAR(chid_quad(3, t).value, v, 1e-15) << t;
        EXPECT_NEAR(s.eval(std::sqrt(t)), v, 1e-15) << t;
    }
}

TEST(ChidQuad, SeriesOrderFortyAgainstQuadrature) {
    auto s = series_chid(3, 40);
    for (double t : {0.05, 0.1, 0.2, 0.3}) EXPECT_NEAR(s.eval(std::sqrt(t)), chid_quad(3, t).value, 1e-6) << t;
}

TEST(ChidQuad, DeterministicAcrossThreads) {
    double a = chid_quad(3, 0.2, 1e-12, 1).value;
    EXPECT_EQ(chid_quad(3, 0.2, 1e-12, 4).value, a);
    EXPECT_EQ(chid_quad(3, 0.2, 1e-12, 7).value, a);
}

TEST(ChidSum, Examples) {
    double pre = std::pow(0.75, 0.25);
    EXPECT_NEAR(chid_sum(CorrSign::minus, 0.25, 1).value, pre * 0.25 / (4 * 0.75), 1e-15);
    EXPECT_NEAR(chid_sum(CorrSign::plus, 0.25, 0).value, pre * 2, 1e-15);
    EXPECT_NEAR(chid_sum(CorrSign::plus, 0.25, 1).value, pre * (2 + chid_quad(3, 0.25).value), 1e-15);
    EXPECT_THROW(chid_sum(CorrSign::minus, 0.25, 2), UnsupportedError);
    EXPECT_THROW(chid_sum(CorrSign::minus, 0.25, 0), DomainError);
}

TEST(GeometricSum, RebuildsFirstSector) {
    for (double t : {0.1, 0.25, 0.5}) {
        auto g = chid1_from_form_factors(t);
        EXPECT_NEAR(g.value, chid_closed(1, t), 1e-8) << t;
        EXPECT_LT(g.tail_bound, 1e-12);
    }
}

TEST(Components, SmallModulusLimit) {
    auto c = chid3_components(1e-9);
    EXPECT_NEAR(c.f16_term, 2.0, 1e-8);
    EXPECT_NEAR(c.chi1_term, 1.0, 1e-8);
    EXPECT_NEAR(c.Q, 0.0, 1e-16);
}

TEST(Components, ThresholdWhereQReachesOne) {
    double ks = chid3_Q_threshold();
    EXPECT_NEAR(chid3_Q(ks), 1.0, 1e-14);
    EXPECT_NEAR(ks, 0.4358164268, 1e-9);
    EXPECT_GT(chid3_Q(0.5), 1.0);
    EXPECT_NO_THROW(chid3_components(0.43));
    EXPECT_THROW(chid3_components(0.44), DomainError);
}

TEST(Components, ExactBlockSeriesMatchFloatingBlocks) {
    auto b = chid3_block_series(120);
    for (double k : {0.05, 0.15, 0.25}) {
        auto c = chid3_components(k);
        EXPECT_NEAR(b.chi1.eval(k), c.chi1_term, 1e-12);
        EXPECT_NEAR(b.ke.eval(k), c.ke_term, 1e-12);
        EXPECT_NEAR(b.f16.eval(k), c.f16_term, 1e-10);
    }
}

TEST(Bulk, Examples) {
    EXPECT_DOUBLE_EQ(chi_bulk(1, 0.25), 4.0);
    EXPECT_EQ(chi_bulk(2, 0.0), 0.0);
    double k = 1e-3;
    EXPECT_NEAR(chi_bulk(2, k) / (k * k / 4), 1.0, 1e-2);
    EXPECT_THROW(chi_bulk(3, 0.2), UnsupportedError);
}

TEST(CriticalExponent, SlopesAndAmplitude) {
    auto f = critical_exponent_fit();
    EXPECT_EQ(f.ks.size(), 41u);
    EXPECT_NEAR(f.ks.front(), 0.99, 1e-12);
    EXPECT_NEAR(f.ks.back(), 0.9999, 1e-12);
    EXPECT_NEAR(f.slope, -1.75, 0.01);
    EXPECT_NEAR(f.slope_bare, -2.0, 0.01);
    // (1-k^2)^{1/4} (1-k^{1/2})^{-2} -> (2 eps)^{1/4} (eps/2)^{-2} = 2^{9/4} eps^{-7/4}
    EXPECT_NEAR(f.amplitude_asymptotic, std::pow(2.0, 2.25), 1e-12);
    EXPECT_NEAR(f.amplitude, std::pow(2.0, 2.25), 1e-5);
    EXPECT_NEAR(f.I_estimate, f.I_reference, 1e-2);
    EXPECT_NEAR(AmplitudeConstants::i_plus(), 1.000815260440212, 1e-15);
}

TEST(CriticalExponent, SecondSectorIsASimplePole) { EXPECT_NEAR(local_exponent_chid2(), -1.0, 1e-4); }
