#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pltower/entropy.hpp"
#include "pltower/gallery.hpp"
#include "pltower/tower.hpp"

using namespace pltower;

TEST(Kneading, FullTentSequence) {
    const KneadingData kd = kneading_sequence(make_tent(2.0), 20);
    ASSERT_EQ(kd.eps.size(), 20u);
    EXPECT_EQ(kd.eps[0], -1);
    for (std::size_t k = 1; k < kd.eps.size(); ++k) EXPECT_EQ(kd.eps[k], 1);
    for (int e : kd.eta) EXPECT_EQ(e, -1);
}

TEST(Kneading, GoldenTentIsPeriodic) {
    const KneadingData kd = kneading_sequence(make_tent(golden_slope()), 64);
    ASSERT_TRUE(kd.period);
    EXPECT_EQ(*kd.period, 3);
    for (std::size_t k = 3; k < kd.eps.size(); ++k) EXPECT_EQ(kd.eps[k], kd.eps[k - 3]);
}

TEST(Kneading, CumulativeProducts) {
    std::mt19937_64 rng(51);
    for (int t = 0; t < 20; ++t) {
        const KneadingData kd = kneading_sequence(oracle::random_unimodal(rng), 50);
        int eta = 1;
        for (std::size_t k = 0; k < kd.eps.size(); ++k) {
            eta *= kd.eps[k];
            EXPECT_EQ(kd.eta[k], eta);
        }
    }
}

TEST(Kneading, SuperstableFixedPointUsesLimit) {
    // f(c) = c: the orbit sits on the turning point.
    const PLMap f({{0.0, 0.0}, {0.5, 0.5}, {1.0, 0.0}});
    const KneadingData kd = kneading_sequence(f, 10);
    for (std::size_t k = 0; k < kd.eps.size(); ++k) {
        EXPECT_EQ(kd.eps[k], 1);
        EXPECT_EQ(kd.eta[k], 1);
    }
    EXPECT_TRUE(kneading_entropy(kneading_sequence(f, 64)).zero_entropy);
}

TEST(Kneading, FlipsMinimumMaps) {
    const PLMap f({{0.0, 1.0}, {0.5, 0.0}, {1.0, 1.0}});
    const KneadingData kd = kneading_sequence(f, 64);
    EXPECT_TRUE(kd.flipped);
    EXPECT_NEAR(kneading_entropy(kd).h, std::log(2.0), 1e-10);
}

TEST(KneadingEntropy, Examples) {
    const KneadingEntropy full = kneading_entropy(kneading_sequence(make_tent(2.0), 64));
    EXPECT_NEAR(full.root, 0.5, 1e-10);
    EXPECT_NEAR(full.h, std::log(2.0), 1e-10);

    const KneadingEntropy s18 = kneading_entropy(kneading_sequence(make_tent(1.8), 64));
    EXPECT_LE(std::abs(s18.h - std::log(1.8)), s18.err_bound);

    const KneadingEntropy gold = kneading_entropy(kneading_sequence(make_tent(golden_slope()), 64));
    EXPECT_NEAR(gold.root, 1.0 / golden_slope(), 1e-10);
}

TEST(KneadingEntropy, ConstantSlopeTents) {
    for (double s : {1.45, 1.55, 1.7, 1.85, 1.95}) {
        const KneadingEntropy e = kneading_entropy(kneading_sequence(make_tent(s), 400));
        EXPECT_NEAR(e.h, std::log(s), 1e-9) << "s=" << s;
    }
}

TEST(Hofbauer, FullTent) {
    const HofbauerTower t = hofbauer_build(make_tent(2.0), 5);
    ASSERT_EQ(t.vertices.size(), 2u);
    EXPECT_FALSE(t.truncated);
    for (const auto& e : t.edges) EXPECT_EQ(e.size(), 2u);
    EXPECT_NEAR(hofbauer_entropy(t).h, std::log(2.0), 1e-12);
}

TEST(Hofbauer, GoldenTent) {
    const HofbauerTower t = hofbauer_build(make_tent(golden_slope()), 20);
    EXPECT_FALSE(t.truncated);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(t.vertices.size()),
                                              static_cast<Eigen::Index>(t.vertices.size()));
    for (std::size_t j = 0; j < t.edges.size(); ++j) {
        for (std::size_t k : t.edges[j]) m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) += 1.0;
    }
    EXPECT_NEAR(oracle::spectral_radius(m), golden_slope(), 1e-12);
    EXPECT_NEAR(hofbauer_entropy(t).h, std::log(golden_slope()), 1e-9);
}

TEST(Hofbauer, NonMarkovIsTruncated) {
    const HofbauerTower t = hofbauer_build(make_tent(1.9), 12);
    EXPECT_TRUE(t.truncated);
    const HofbauerEntropy e = hofbauer_entropy(t);
    EXPECT_TRUE(e.truncated);
    EXPECT_LE(e.h, std::log(1.9) + 1e-9);
}

TEST(Hofbauer, Deg6) {
    const HofbauerEntropy e = hofbauer_entropy(hofbauer_build(make_deg6(0.4), 20));
    EXPECT_NEAR(e.h, std::log(3.0), 1e-9);
}

TEST(Hofbauer, EdgesFollowClosureRule) {
    const PLMap f = make_tent(supergolden_slope());
    const HofbauerTower t = hofbauer_build(f, 40);
    const std::vector<Arc> laps = f.laps();
    for (std::size_t i = 0; i < laps.size(); ++i) EXPECT_EQ(t.vertices[i], laps[i]);
    for (std::size_t j = 0; j < t.vertices.size(); ++j) {
        const Interval img = image(f, Interval{t.vertices[j].lo(), t.vertices[j].hi()});
        for (std::size_t k : t.edges[j]) {
            EXPECT_GE(t.vertices[k].lo(), img.lo - 1e-10);
            EXPECT_LE(t.vertices[k].hi(), img.hi + 1e-10);
        }
    }
}

TEST(Growth, Examples) {
    const GrowthEntropy full = growth_entropy(make_tent(2.0), 12);
    EXPECT_NEAR(full.h, std::log(2.0), 1e-12);
    for (std::size_t n = 0; n < full.log_variation.size(); ++n) {
        EXPECT_NEAR(full.log_variation[n], (n + 1) * std::log(2.0), 1e-12);
    }
    EXPECT_NEAR(growth_entropy(make_tent(1.3), 16).h, std::log(1.3), 1e-2);
    EXPECT_NEAR(growth_entropy(PLMap::identity(), 8).h, 0.0, 1e-15);
    EXPECT_NEAR(growth_entropy(make_deg6(0.4), 12).h, std::log(3.0), 1e-2);
}

TEST(Entropy, EstimatorsAgreeOnMarkovTents) {
    for (double s : {2.0, golden_slope(), supergolden_slope()}) {
        const PLMap f = make_tent(s);
        const double hk = kneading_entropy(kneading_sequence(f, 400)).h;
        const double hh = hofbauer_entropy(hofbauer_build(f, 60)).h;
        const double hg = growth_entropy(f, 16).h;
        EXPECT_NEAR(hk, hh, 1e-6);
        EXPECT_NEAR(hg, hh, 1e-2);
    }
}

TEST(Entropy, InvariantUnderTheta) {
    std::mt19937_64 rng(52);
    for (int t = 0; t < 10; ++t) {
        const PLMap f = oracle::random_unimodal(rng);
        const KneadingEntropy a = kneading_entropy(kneading_sequence(f, 300));
        const KneadingEntropy b = kneading_entropy(kneading_sequence(theta_step(f).f_next, 300));
        EXPECT_LE(std::abs(a.h - b.h), std::max({a.err_bound, b.err_bound, 1e-9}));
    }
}
