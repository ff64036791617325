#include <gtest/gtest.h>

#include <random>

#include "ising/exact_series.hpp"
#include "ising/susceptibility.hpp"
#include "oracle_contraction.hpp"

using namespace ising;

namespace {

ExactSeries poly(Var v, std::vector<long> c, int order) {
    std::vector<BigRational> r;
    for (long x : c) r.push_back(x);
    return series_poly(v, r, order);
}

}  // namespace

TEST(SeriesArith, TrivialIdentities) {
    auto a = poly(Var::x, {1, 1}, 6), b = poly(Var::x, {1, -1}, 6);
    EXPECT_EQ(a * b, poly(Var::x, {1, 0, -1}, 6));
    auto inv = invert(b);
    for (int i = 0; i < 6; ++i) EXPECT_EQ(inv[i], 1);
    EXPECT_EQ(shift(a, 2), poly(Var::x, {0, 0, 1, 1}, 6));
    EXPECT_EQ(series_arith(a, b, SeriesOp::add), poly(Var::x, {2}, 6));
}

TEST(SeriesArith, TagMismatchAndNonInvertible) {
    auto a = poly(Var::x, {1, 1}, 4), b = poly(Var::t, {1, 1}, 4);
    EXPECT_THROW(a * b, TagMismatch);
    EXPECT_THROW(invert(poly(Var::t, {0, 1}, 4)), DomainError);
}

TEST(SeriesArith, AssociativityOnRandomSeries) {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> d(-9, 9);
    for (int trial = 0; trial < 20; ++trial) {
        auto rnd = [&] {
            ExactSeries s(Var::t, 12);
            for (int i = 0; i < 12; ++i) s[i] = BigRational(d(rng), 1 + std::abs(d(rng)));
            for (auto& c : s.coefficients) c.canonicalize();
            return s;
        };
        auto a = rnd(), b = rnd(), c = rnd();
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * (b + c), a * b + a * c);
    }
}

TEST(Hypergeometric, KAndEFirstTerms) {
    auto K = series_K(4), E = series_E(3);
    EXPECT_EQ(K[0], 1);
    EXPECT_EQ(K[1], rat(1, 4));
    EXPECT_EQ(K[2], rat(9, 64));
    EXPECT_EQ(K[3], rat(25, 256));
    EXPECT_EQ(E[0], 1);
    EXPECT_EQ(E[1], rat(-1, 4));
    EXPECT_EQ(E[2], rat(-3, 64));
    EXPECT_EQ(series_2f1(rat(1, 3), rat(2, 5), rat(3, 7), 1).order(), 1);
    EXPECT_EQ(series_2f1(rat(1, 3), rat(2, 5), rat(3, 7), 1)[0], 1);
}

TEST(Hypergeometric, SeriesEvaluatesToEllipticIntegrals) {
    auto K = series_K(200), E = series_E(200);
    EXPECT_NEAR(K.eval(0.3), 2 / pi * ellip_K(0.3), 1e-14);
    EXPECT_NEAR(E.eval(0.3), 2 / pi * ellip_E(0.3), 1e-14);
}

TEST(BetaMoment, Examples) {
    EXPECT_EQ(beta_moment(0, -1, -1), 1);
    EXPECT_EQ(beta_moment(2, -1, -1), rat(3, 8));
    EXPECT_EQ(beta_moment(0, 1, 1), rat(1, 8));
    EXPECT_THROW(beta_moment(0, 0, 1), UnsupportedError);
}

TEST(BetaMoment, CentralBinomialIdentity) {
    for (long p = 0; p <= 20; ++p) {
        BigRational ref(binomial(2 * p, p), BigInt(1) << (2 * p));
        ref.canonicalize();
        EXPECT_EQ(beta_moment(p, -1, -1), ref) << p;
    }
}

TEST(ChidSeries, SectorOneIsGeometric) {
    auto s = series_chid(1, 30);
    EXPECT_EQ(s.variable, Var::x);
    for (int i = 0; i < 30; ++i) EXPECT_EQ(s[i], 1) << i;
}

TEST(ChidSeries, SectorTwoMatchesClosedForm) {
    auto s = series_chid(2, 40);
    EXPECT_EQ(s.variable, Var::t);
    EXPECT_EQ(s[0], 0);
    for (int i = 1; i < 40; ++i) EXPECT_EQ(s[i], rat(1, 4)) << i;
}

TEST(ChidSeries, SectorThreeLeadingCoefficient) {
    auto s = series_chid(3, 40);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(s[i], 0);
    // t -> 0 integrand: (1/(1! 2!)) (1/8) (2 (3/8) - 2 (1/4))
    BigRational hand = rat(1, 2) * rat(1, 8) * (2 * rat(3, 8) - 2 * rat(1, 4));
    EXPECT_EQ(hand, rat(1, 64));
    EXPECT_EQ(s[4], rat(1, 64));
}

TEST(ChidSeries, SectorThreeAgainstBruteForceContraction) {
    const int order = 22;
    auto s = series_chid(3, order);
    auto ref = oracle::expand({3, 0, true}, order);
    for (int i = 0; i < order; ++i) EXPECT_EQ(s[i], ref[i]) << "x^" << i;
}

TEST(ChidSeries, SectorTwoAgainstBruteForceContraction) {
    const int order = 12;
    auto s = series_chid(2, order);
    auto ref = oracle::expand({2, 0, true}, 2 * order);
    for (int i = 0; i < order; ++i) EXPECT_EQ(s[i], ref[2 * i]) << "t^" << i;
    for (int i = 0; i < order; ++i) EXPECT_EQ(ref[2 * i + 1], 0);
}

TEST(ChidSeries, FloatEvaluationMatchesQuadratureAtSmallT) {
    for (int n = 1; n <= 3; ++n) {
        auto s = series_chid(n, 200);
        for (double t : {0.02, 0.1}) {
            double v = s.variable == Var::x ? s.eval(std::sqrt(t)) : s.eval(t);
            EXPECT_NEAR(v, chid_quad(n, t).value, 1e-8) << n << " " << t;
        }
    }
}

TEST(ChidSeries, Unsupported) {
    EXPECT_THROW(series_chid(4, 10), UnsupportedError);
    EXPECT_THROW(series_chid(1, 0), DomainError);
}

TEST(Phi0, Definition) {
    ExactSeries s(Var::z, {rat(2), rat(3), rat(5)});
    auto q = phi0_transform(s);
    ASSERT_EQ(q.terms.size(), 3u);
    EXPECT_EQ(q.terms[1].exponent, rat(1, 4));
    EXPECT_EQ(q.terms[2].exponent, 1);
    EXPECT_DOUBLE_EQ(q.eval(0.0625), 2 + 3 * 0.5 + 5 * 0.0625);
    EXPECT_TRUE(phi0_transform(ExactSeries(Var::z, 5)).terms.empty());
    EXPECT_THROW(phi0_transform(ExactSeries(Var::t, 3)), TagMismatch);
}

TEST(Rationals, StringRoundTrip) {
    for (auto r : {rat(1, 64), rat(-7, 3), rat(0), rat(123456789, 1)}) EXPECT_EQ(parse_rational(to_string(r)), r);
}
