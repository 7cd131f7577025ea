#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pltower/errors.hpp"
#include "pltower/gallery.hpp"
#include "pltower/metric.hpp"

using namespace pltower;

TEST(PLMetric, RejectsInvalidCmf) {
    EXPECT_THROW(PLMetric({{0.0, 0.1}, {1.0, 1.0}}), std::invalid_argument);
    EXPECT_THROW(PLMetric({{0.0, 0.0}, {0.5, 0.6}, {1.0, 0.4}}), std::invalid_argument);
    EXPECT_THROW(PLMetric({{0.0, 0.0}, {0.9, 1.0}}), std::invalid_argument);
}

TEST(PLMetric, MassIsAdditiveAndNonnegative) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 40; ++t) {
        const PLMetric m = oracle::random_metric(rng, 6);
        double a = u(rng), b = u(rng), c = u(rng);
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        EXPECT_GE(m.mass(a, b), 0.0);
        EXPECT_NEAR(m.mass(a, c), m.mass(a, b) + m.mass(b, c), 1e-15);
    }
}

TEST(Pullback, LebesgueGivesVariation) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        const PLMap f = oracle::random_map(rng, 6);
        const PLMetric p = pullback(f, PLMetric::lebesgue());
        EXPECT_NEAR(p.total_mass(), variation(f), 1e-13);
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        if (b - a > 1e-6) EXPECT_NEAR(p.mass(a, b), variation(f, Arc(a, b)), 1e-13);
    }
}

TEST(Pullback, Deg6MassOnLeftBlock) {
    const PLMetric p = pullback(make_deg6(0.4), PLMetric::lebesgue());
    EXPECT_NEAR(p.mass(0.0, 0.4), 1.8, 1e-14);
    EXPECT_NEAR(p.mass(0.4, 1.0), 1.2, 1e-14);
}

TEST(Pullback, IdentityIsNeutral) {
    std::mt19937_64 rng(23);
    const PLMetric m = oracle::random_metric(rng, 5);
    const PLMetric p = pullback(PLMap::identity(), m);
    EXPECT_LT(strong_distance(p, m), 1e-15);
}

TEST(Pullback, MatchesDefinitionOracle) {
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 60; ++t) {
        const PLMap f = oracle::random_map(rng, 1 + t % 7);
        const PLMetric m = oracle::random_metric(rng, 1 + t % 5);
        const PLMetric p = pullback(f, m);
        for (int q = 0; q < 10; ++q) {
            double a = u(rng), b = u(rng);
            if (a > b) std::swap(a, b);
            EXPECT_NEAR(p.mass(a, b), oracle::pullback_mass(f, m, a, b), 1e-12);
        }
    }
}

TEST(Pullback, Contravariant) {
    std::mt19937_64 rng(25);
    for (int t = 0; t < 40; ++t) {
        const PLMap g = oracle::random_map(rng, 4);
        const PLMap h = oracle::random_map(rng, 4);
        const PLMetric m = oracle::random_metric(rng, 4);
        const PLMetric lhs = pullback(compose(g, h), m);
        const PLMetric rhs = pullback(h, pullback(g, m));
        EXPECT_LT(strong_distance(lhs, rhs), 1e-12);
    }
}

TEST(Pullback, Linear) {
    std::mt19937_64 rng(26);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int t = 0; t < 40; ++t) {
        const PLMap f = oracle::random_map(rng, 5);
        const PLMetric m1 = oracle::random_metric(rng, 4);
        const PLMetric m2 = oracle::random_metric(rng, 3);
        const double a = u(rng), b = u(rng);
        const PLMetric lhs = pullback(f, combine(a, m1, b, m2));
        const PLMetric rhs = combine(a, pullback(f, m1), b, pullback(f, m2));
        EXPECT_LT(strong_distance(lhs, rhs), 1e-12);
    }
}

TEST(Pullback, KernelOffTheImage) {
    const PLMap f({{0.0, 0.1}, {0.5, 0.4}, {1.0, 0.2}});
    const PLMetric m({{0.0, 0.0}, {0.5, 0.0}, {1.0, 1.0}});
    EXPECT_EQ(pullback(f, m).total_mass(), 0.0);
}

TEST(Normalize, Examples) {
    const PLMetric twice = scale(PLMetric::lebesgue(), 2.0);
    const PLMetric n = normalize(twice);
    EXPECT_DOUBLE_EQ(n.mass(0.2, 0.7), 0.5);
    EXPECT_LT(strong_distance(normalize(PLMetric::lebesgue()), PLMetric::lebesgue()), 1e-16);
    EXPECT_THROW(normalize(PLMetric::zero()), ZeroMass);
}

TEST(MetricToMap, Examples) {
    EXPECT_EQ(metric_to_map(PLMetric::lebesgue()), PLMap::identity());

    const PLMap half = metric_to_map(PLMetric({{0.0, 0.0}, {0.5, 1.0}, {1.0, 1.0}}));
    for (double x : oracle::grid(100)) EXPECT_NEAR(half(x), std::min(2.0 * x, 1.0), 1e-15);
    EXPECT_TRUE(half.is_weakly_monotone());

    const RenormalizationIntervals r = renormalization_intervals(1.3);
    const PLMap h = metric_to_map(alpha_block(0.3, r.i0, r.i1));
    EXPECT_TRUE(h.is_weakly_monotone());
    EXPECT_EQ(h(0.5 * r.i0.lo()), 0.0);
    EXPECT_EQ(h(r.i0.lo()), 0.0);
    EXPECT_NEAR(h(r.p), 0.3, 1e-15);
    EXPECT_EQ(h(r.i1.hi()), 1.0);
    EXPECT_EQ(h(0.5 * (1.0 + r.i1.hi())), 1.0);
}

TEST(StrongDistance, Examples) {
    const PLMetric leb = PLMetric::lebesgue();
    EXPECT_EQ(strong_distance(leb, leb), 0.0);
    const PLMetric odd = normalize(pullback(make_deg6(0.4), leb));
    EXPECT_NEAR(strong_distance(leb, odd), 0.2, 1e-14);
}

TEST(StrongDistance, MetricAxioms) {
    std::mt19937_64 rng(27);
    for (int t = 0; t < 50; ++t) {
        const PLMetric a = normalize(oracle::random_metric(rng, 4));
        const PLMetric b = normalize(oracle::random_metric(rng, 5));
        const PLMetric c = normalize(oracle::random_metric(rng, 3));
        EXPECT_DOUBLE_EQ(strong_distance(a, b), strong_distance(b, a));
        EXPECT_LE(strong_distance(a, c), strong_distance(a, b) + strong_distance(b, c) + 1e-15);
    }
}

TEST(LinearlyExpanded, Examples) {
    const PLMap tent = make_tent(2.0);
    const auto lambda = is_linearly_expanded(tent, PLMetric::lebesgue(), 1e-12);
    ASSERT_TRUE(lambda);
    EXPECT_DOUBLE_EQ(*lambda, 2.0);

    const PLMetric left({{0.0, 0.0}, {0.5, 1.0}, {1.0, 1.0}});
    EXPECT_FALSE(is_linearly_expanded(tent, left, 1e-6));

    std::mt19937_64 rng(28);
    const auto one = is_linearly_expanded(PLMap::identity(), oracle::random_metric(rng, 4), 1e-12);
    ASSERT_TRUE(one);
    EXPECT_NEAR(*one, 1.0, 1e-15);
}

TEST(AlphaBlock, MassesAndSupport) {
    const PLMetric m = alpha_block(0.3, Arc(0.2, 0.5), Arc(0.5, 0.6));
    EXPECT_NEAR(m.mass(0.2, 0.5), 0.3, 1e-15);
    EXPECT_NEAR(m.mass(0.5, 0.6), 0.7, 1e-15);
    EXPECT_EQ(m.mass(0.0, 0.2), 0.0);
    EXPECT_THROW(alpha_block(0.3, Arc(0.2, 0.55), Arc(0.5, 0.6)), std::invalid_argument);
}

TEST(RestrictTo, DropsMassOutside) {
    const PLMetric m = restrict_to(PLMetric::lebesgue(), Interval{0.25, 0.5});
    EXPECT_NEAR(m.total_mass(), 0.25, 1e-16);
    EXPECT_EQ(m.mass(0.0, 0.25), 0.0);
    EXPECT_EQ(m.mass(0.5, 1.0), 0.0);
}
