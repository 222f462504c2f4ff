#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <gtest/gtest.h>

#include "hybrid_drive/apf.hpp"

using namespace hybrid_drive;

namespace {

using Wide = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<160>>;

// Direct summation in 160-digit decimals, using cos/sin of the stored bearing.
RepulsiveForce wide_force(const std::vector<ObstacleReading>& readings, const ApfConfig& cfg)
{
    Wide fx = 0, fy = 0;
    const Wide pi = boost::math::constants::pi<Wide>();
    for (const auto& r : readings) {
        const Wide d = r.d;
        const Wide theta = r.theta;
        if (r.d >= cfg.d_cut || theta < 0 || theta > pi) continue;
        const Wide m = 1 / pow(d, Wide(cfg.eta));
        fx -= m * cos(theta);
        fy -= m * sin(theta);
    }
    return {fx.convert_to<double>(), fy.convert_to<double>()};
}

const ApfConfig kDefault{};

} // namespace

TEST(Apf, EmptyReadingsGiveNoForce)
{
    const RepulsiveForce f = repulsive_force({}, kDefault);
    EXPECT_EQ(f.fx, 0.0);
    EXPECT_EQ(f.fy, 0.0);
    const Command c = apf_command(f, kDefault);
    EXPECT_EQ(c.steer, 0.0);
    EXPECT_EQ(c.accel, 0.0);
    OpponentSectors empty;
    empty.fill(kSensorRange);
    EXPECT_TRUE(obstacle_readings(empty).empty());
}

TEST(Apf, ObstacleDeadAhead)
{
    const std::vector<ObstacleReading> r{{10.0, kPi / 2.0}};
    const RepulsiveForce f = repulsive_force(r, kDefault);
    EXPECT_EQ(f.fx, 0.0);
    EXPECT_NEAR(f.fy, -std::pow(10.0, -1.5), 1e-17);
    EXPECT_NEAR(f.fy, -0.0316228, 1e-7);
    const Command c = apf_command(f, kDefault);
    EXPECT_EQ(c.steer, 0.0);
    EXPECT_NEAR(c.accel, -0.316228, 1e-6);
}

TEST(Apf, SymmetricPairCancelsLaterally)
{
    for (double d : {2.0, 7.5, 31.0}) {
        const std::vector<ObstacleReading> r{{d, kPi / 4.0}, {d, 3.0 * kPi / 4.0}};
        const RepulsiveForce f = repulsive_force(r, kDefault);
        EXPECT_EQ(f.fx, 0.0);
        EXPECT_NEAR(f.fy, -2.0 * std::sin(kPi / 4.0) / std::pow(d, 1.5), 1e-15);
    }
}

TEST(Apf, CommandExamples)
{
    const Command brake = apf_command({0.0, -0.0316228}, kDefault);
    EXPECT_EQ(brake.steer, 0.0);
    EXPECT_NEAR(brake.accel, -0.316228, 1e-12);
    // an obstacle on the left pushes right: negative steer, clamped
    const Command right = apf_command({-0.1, 0.0}, kDefault);
    EXPECT_EQ(right.steer, -1.0);
    EXPECT_EQ(right.accel, 0.0);
    const std::vector<ObstacleReading> left{{3.0, 0.2}};
    EXPECT_LT(apf_command(repulsive_force(left, kDefault), kDefault).steer, 0.0);
    const std::vector<ObstacleReading> rightside{{3.0, kPi - 0.2}};
    EXPECT_GT(apf_command(repulsive_force(rightside, kDefault), kDefault).steer, 0.0);
}

TEST(Apf, CutoffAndRearHalfIgnored)
{
    const std::vector<ObstacleReading> far{{50.0, kPi / 2.0}, {120.0, 1.0}};
    const RepulsiveForce f = repulsive_force(far, kDefault);
    EXPECT_EQ(f.fx, 0.0);
    EXPECT_EQ(f.fy, 0.0);
    const std::vector<ObstacleReading> rear{{5.0, 1.5 * kPi}, {3.0, kPi + 0.1}, {4.0, 2.0 * kPi - 0.01}};
    const RepulsiveForce g = repulsive_force(rear, kDefault);
    EXPECT_EQ(g.fx, 0.0);
    EXPECT_EQ(g.fy, 0.0);
    const std::vector<ObstacleReading> near{{49.999, kPi / 2.0}};
    EXPECT_LT(repulsive_force(near, kDefault).fy, 0.0);
}

TEST(Apf, NonPositiveDistanceThrows)
{
    const std::vector<ObstacleReading> zero{{0.0, 1.0}};
    EXPECT_THROW(repulsive_force(zero, kDefault), std::invalid_argument);
    const std::vector<ObstacleReading> neg{{-1.0, 1.0}};
    EXPECT_THROW(repulsive_force(neg, kDefault), std::invalid_argument);
}

TEST(Apf, MatchesWideOracle)
{
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> count(0, 3);
    std::uniform_real_distribution<double> d(0.05, 60.0);
    std::uniform_real_distribution<double> theta(0.0, kTwoPi);
    double worst = 0.0;
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<ObstacleReading> r(count(rng));
        for (auto& x : r) x = {d(rng), theta(rng)};
        const RepulsiveForce got = repulsive_force(r, kDefault);
        const RepulsiveForce want = wide_force(r, kDefault);
        worst = std::max({worst, std::abs(got.fx - want.fx), std::abs(got.fy - want.fy)});
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(Apf, Superposition)
{
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> d(0.5, 45.0);
    std::uniform_real_distribution<double> theta(0.0, kPi);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<ObstacleReading> a(3), b(2);
        for (auto& x : a) x = {d(rng), theta(rng)};
        for (auto& x : b) x = {d(rng), theta(rng)};
        std::vector<ObstacleReading> both = a;
        both.insert(both.end(), b.begin(), b.end());
        const RepulsiveForce fa = repulsive_force(a, kDefault);
        const RepulsiveForce fb = repulsive_force(b, kDefault);
        const RepulsiveForce fab = repulsive_force(both, kDefault);
        EXPECT_NEAR(fab.fx, fa.fx + fb.fx, 1e-14);
        EXPECT_NEAR(fab.fy, fa.fy + fb.fy, 1e-14);
    }
}

TEST(Apf, MonotoneInDistance)
{
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> d(0.1, 49.0);
    std::uniform_real_distribution<double> theta(0.0, kPi);
    for (int trial = 0; trial < 10000; ++trial) {
        const double t = theta(rng);
        double d1 = d(rng), d2 = d(rng);
        if (d1 == d2) continue;
        if (d1 > d2) std::swap(d1, d2);
        const std::vector<ObstacleReading> close{{d1, t}};
        const std::vector<ObstacleReading> far{{d2, t}};
        const RepulsiveForce fc = repulsive_force(close, kDefault);
        const RepulsiveForce ff = repulsive_force(far, kDefault);
        if (std::sin(kPi / 2.0 - t) != 0.0) EXPECT_GT(std::abs(fc.fx), std::abs(ff.fx));
        if (std::sin(t) != 0.0) EXPECT_GT(std::abs(fc.fy), std::abs(ff.fy));
    }
}

TEST(Apf, MirrorSymmetry)
{
    std::mt19937_64 rng(34);
    std::uniform_int_distribution<int> count(1, 5);
    std::uniform_real_distribution<double> d(0.2, 49.0);
    std::uniform_real_distribution<double> theta(0.0, kPi);
    for (int trial = 0; trial < 10000; ++trial) {
        std::vector<ObstacleReading> r(count(rng));
        for (auto& x : r) x = {d(rng), theta(rng)};
        std::vector<ObstacleReading> m = r;
        for (auto& x : m) x.theta = kPi - x.theta;
        const RepulsiveForce f = repulsive_force(r, kDefault);
        const RepulsiveForce g = repulsive_force(m, kDefault);
        const double scale = 1e-14 * (1.0 + std::abs(f.fx) + std::abs(f.fy));
        EXPECT_NEAR(g.fx, -f.fx, scale);
        EXPECT_NEAR(g.fy, f.fy, scale);
    }
}

TEST(Apf, ReadingsFromSectors)
{
    OpponentSectors s;
    s.fill(kSensorRange);
    s[9] = 15.0;
    s[0] = 0.0;
    s[27] = 4.0;
    const auto r = obstacle_readings(s);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_EQ(r[0].d, 1e-3);
    EXPECT_NEAR(r[0].theta, 5.0 * kPi / 180.0, 1e-15);
    EXPECT_EQ(r[1].d, 15.0);
    EXPECT_NEAR(r[1].theta, 95.0 * kPi / 180.0, 1e-15);
    EXPECT_NEAR(r[2].theta, 275.0 * kPi / 180.0, 1e-15);
}

TEST(Apf, ConfigValidation)
{
    EXPECT_NO_THROW(kDefault.validate());
    ApfConfig c;
    c.k_fx = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.eta = -1.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.d_cut = 250.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}
