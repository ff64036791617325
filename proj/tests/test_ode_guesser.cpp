#include <gtest/gtest.h>

#include <cmath>

#include "ising/ode_guesser.hpp"
#include "ising/susceptibility.hpp"

using namespace ising;

namespace {

std::vector<BigRational> Q(std::initializer_list<long> v) {
    std::vector<BigRational> out;
    for (long x : v) out.emplace_back(x);
    return out;
}

bool has_root(const SingularPointReport& rep, cplx z) {
    for (const auto& p : rep.points)
        if (std::abs(p.root - z) < 1e-9) return true;
    return false;
}

}  // namespace

TEST(OdeGuess, GeometricSeries) {
    ExactSeries s(Var::x, 30);
    for (int i = 0; i < 30; ++i) s[i] = 1;
    auto g = guess_ode(s);
    ASSERT_TRUE(g.ode);
    EXPECT_EQ(g.ode->order, 1);
    // (x - 1) y' + y = 0, up to sign
    auto c = g.ode->coefficients;
    if (sgn(c[1][0]) > 0)
        for (auto& row : c)
            for (auto& v : row) v = -v;
    EXPECT_EQ(c[1], Q({-1, 1}));
    EXPECT_EQ(c[0][0], 1);
    for (std::size_t e = 1; e < c[0].size(); ++e) EXPECT_EQ(c[0][e], 0);
    EXPECT_TRUE(verify_annihilation(*g.ode, s).annihilates);
}

TEST(OdeGuess, CompleteEllipticK) {
    auto K = series_K(40);
    auto g = guess_ode(K);
    ASSERT_TRUE(g.ode);
    const auto& ode = *g.ode;
    EXPECT_EQ(ode.order, 2);
    EXPECT_EQ(ode.variable, Var::t);
    // 4t(1-t) y'' + 4(1-2t) y' - y = 0, normalized so y has coefficient +1
    auto c = ode.coefficients;
    if (c[0][0] < 0)
        for (auto& row : c)
            for (auto& v : row) v = -v;
    auto pad = [](std::vector<BigRational> v) { v.resize(3); return v; };
    EXPECT_EQ(pad(c[2]), Q({0, -4, 4}));
    EXPECT_EQ(pad(c[1]), Q({-4, 8, 0}));
    EXPECT_EQ(pad(c[0]), Q({1, 0, 0}));
    EXPECT_TRUE(verify_annihilation(ode, K).annihilates);
    EXPECT_GE(ode.margin, 10);
    EXPECT_EQ(ode.nullity, 1);
}

TEST(OdeGuess, KCoefficientRecurrence) {
    // the ODE is equivalent to (n+1)^2 c_{n+1} = (n+1/2)^2 c_n
    auto K = series_K(60);
    for (int n = 0; n + 1 < 60; ++n) EXPECT_EQ(BigRational((n + 1) * (n + 1)) * K[n + 1], (n + rat(1, 2)) * (n + rat(1, 2)) * K[n]);
}

TEST(OdeGuess, RejectsOtherSeriesAndPerturbations) {
    auto K = series_K(40);
    auto ode = *guess_ode(K).ode;
    EXPECT_FALSE(verify_annihilation(ode, series_E(40)).annihilates);
    auto P = K;
    P[20] += rat(1, 1000000);
    auto rep = verify_annihilation(ode, P);
    EXPECT_FALSE(rep.annihilates);
    EXPECT_GE(rep.first_failure, 18);
    EXPECT_LE(rep.first_failure, 20);
}

TEST(OdeGuess, ScalingDoesNotChangeOperator) {
    auto K = series_K(40);
    auto S = K;
    for (auto& c : S.coefficients) c *= rat(-7, 3);
    EXPECT_EQ(guess_ode(K).ode->coefficients, guess_ode(S).ode->coefficients);
}

TEST(OdeGuess, MinimalOrderFirst) {
    // E satisfies a second-order equation but no first-order one
    auto g = guess_ode(series_E(40));
    ASSERT_TRUE(g.ode);
    EXPECT_EQ(g.ode->order, 2);
    EXPECT_TRUE(verify_annihilation(*g.ode, series_E(40)).annihilates);
    // K * K satisfies the symmetric square: order 3
    auto K = series_K(60);
    auto g3 = guess_ode(K * K);
    ASSERT_TRUE(g3.ode);
    EXPECT_EQ(g3.ode->order, 3);
}

TEST(OdeGuess, TagMismatchAndErrors) {
    auto ode = *guess_ode(series_K(40)).ode;
    ExactSeries sx(Var::x, series_K(40).coefficients);
    EXPECT_THROW(verify_annihilation(ode, sx), TagMismatch);
    EXPECT_THROW(guess_ode(ExactSeries(Var::x, 1)), DomainError);
}

TEST(SingularPoints, KAndGeometric) {
    auto k = singular_points(*guess_ode(series_K(40)).ode);
    EXPECT_EQ(k.x_power, 1);
    EXPECT_TRUE(has_root(k, 0.0));
    EXPECT_TRUE(has_root(k, 1.0));
    EXPECT_EQ(k.points.size(), 2u);
    EXPECT_TRUE(contains_roots_of_unity(k, 1));
    ExactSeries s(Var::x, 30);
    for (int i = 0; i < 30; ++i) s[i] = 1;
    auto g = singular_points(*guess_ode(s).ode);
    ASSERT_EQ(g.points.size(), 1u);
    EXPECT_TRUE(has_root(g, 1.0));
    EXPECT_EQ(g.x_power, 0);
}

TEST(ThirdSector, ShortSeriesHasNoOperator) {
    auto s = series_chid(3, 40);
    auto g = guess_ode(s, {8, 40, 5});
    EXPECT_FALSE(g.ode);
    EXPECT_FALSE(g.note.empty());
}

TEST(ThirdSector, LongSeriesRecoversOrderSixOperator) {
    auto s = series_chid(3, 160);
    auto g = guess_ode(s, {8, 40, 5});
    ASSERT_TRUE(g.ode);
    const auto& ode = *g.ode;
    EXPECT_EQ(ode.order, 6);
    EXPECT_GE(ode.margin, 5);
    EXPECT_TRUE(verify_annihilation(ode, s).annihilates);
    auto rep = singular_points(ode);
    EXPECT_TRUE(contains_roots_of_unity(rep, 1));
    EXPECT_TRUE(contains_roots_of_unity(rep, 2));
    EXPECT_TRUE(contains_roots_of_unity(rep, 3));
    auto b = chid3_block_series(160);
    EXPECT_TRUE(verify_annihilation(ode, b.chi1).annihilates);
    EXPECT_TRUE(verify_annihilation(ode, b.ke).annihilates);
    EXPECT_FALSE(verify_annihilation(ode, b.f16).annihilates);
}
