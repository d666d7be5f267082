#include "hcran/channel_model.hpp"

#include <gtest/gtest.h>

using namespace hcran;

namespace {

LargeScaleFading unit_gains(int M, double value = 1.0) {
    LargeScaleFading lsf;
    lsf.rue_gains = RVector::Constant(M + 1, value);
    lsf.mbs_rue_gains = RVector::Constant(M, value);
    lsf.mbs_mue_gain = value;
    return lsf;
}

}  // namespace

TEST(PathGain, ReferenceDistanceWithoutShadowingIsOne) {
    RandomStream rng(1);
    EXPECT_DOUBLE_EQ(path_gain(100.0, {0.0, 3.8, 100.0}, rng), 1.0);
}

TEST(PathGain, DoubleDistance) {
    RandomStream rng(1);
    EXPECT_NEAR(path_gain(200.0, {0.0, 3.8, 100.0}, rng), std::pow(2.0, -3.8), 1e-15);
    EXPECT_NEAR(std::pow(2.0, -3.8), 0.0718, 1e-4);
}

TEST(PathGain, ShadowingIsGaussianInDb) {
    RandomStream rng(3);
    const int n = 20000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double db = 10.0 * std::log10(path_gain(100.0, {8.0, 3.8, 100.0}, rng));
        sum += db;
        sq += db * db;
    }
    const double mean = sum / n;
    EXPECT_NEAR(mean, 0.0, 4.0 * 8.0 / std::sqrt(n));
    EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 8.0, 0.15);
}

TEST(PathGain, RejectsNonPositiveDistance) {
    RandomStream rng(1);
    EXPECT_THROW(path_gain(0.0, {}, rng), InvalidInput);
    EXPECT_THROW(path_gain(-5.0, {}, rng), InvalidInput);
    EXPECT_THROW(gen_large_scale({100.0, -1.0}, {100.0}, 1.0, {}, rng), InvalidInput);
}

TEST(LargeScale, ListLengthsChecked) {
    RandomStream rng(1);
    EXPECT_THROW(gen_large_scale({100.0, 100.0}, {100.0, 100.0}, 1.0, {}, rng), DimensionError);
    const auto lsf = gen_large_scale({100.0, 200.0, 50.0}, {300.0, 400.0}, 2.0, {}, rng);
    EXPECT_EQ(lsf.num_rues(), 2);
    EXPECT_EQ(lsf.rue_gains.size(), 3);
    EXPECT_DOUBLE_EQ(lsf.mbs_mue_gain, 2.0);
}

TEST(SampleChannel, ZeroGainsGiveZeroCoefficients) {
    RandomStream rng(5);
    const auto ch = sample_channel(unit_gains(4, 0.0), 8, rng);
    EXPECT_EQ(ch.G.norm(), 0.0);
    EXPECT_EQ(ch.f_M.norm(), 0.0);
    EXPECT_EQ(ch.f_B.norm(), 0.0);
    EXPECT_EQ(std::abs(ch.g_B), 0.0);
}

TEST(SampleChannel, UnitVarianceEntries) {
    RandomStream rng(7);
    const int draws = 10000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < draws; ++i) {
        const auto ch = sample_channel(unit_gains(1), 3, rng);
        const double v = std::norm(ch.G(0, 0));
        sum += v;
        sq += v * v;
    }
    const double mean = sum / draws;
    const double se = std::sqrt((sq / draws - mean * mean) / draws);
    EXPECT_NEAR(mean, 1.0, 3.0 * se);
}

TEST(SampleChannel, DeterministicForSeed) {
    RandomStream a(42, {1, 2}), b(42, {1, 2}), c(42, {1, 3});
    const auto lsf = unit_gains(4);
    const auto x = sample_channel(lsf, 10, a);
    const auto y = sample_channel(lsf, 10, b);
    const auto z = sample_channel(lsf, 10, c);
    EXPECT_EQ(x.G, y.G);
    EXPECT_EQ(x.f_M, y.f_M);
    EXPECT_EQ(x.g_B, y.g_B);
    EXPECT_NE(x.G, z.G);
}

TEST(SampleChannel, NeedsEnoughRrhs) {
    RandomStream rng(1);
    EXPECT_THROW(sample_channel(unit_gains(4), 5, rng), DimensionError);
    EXPECT_NO_THROW(sample_channel(unit_gains(4), 6, rng));
}

TEST(Training, NormsAndOrthogonality) {
    const auto t = build_training(10, 4, 1.0, 0.5);
    ASSERT_EQ(t.sequences.rows(), 10);
    ASSERT_EQ(t.sequences.cols(), 5);
    for (int m = 0; m < 4; ++m) EXPECT_NEAR(t.sequences.col(m).squaredNorm(), 10.0, 1e-12);
    EXPECT_NEAR(t.sequences.col(4).squaredNorm(), 5.0, 1e-12);
    for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b) EXPECT_LT(std::abs(t.sequences.col(a).dot(t.sequences.col(b))), 1e-12);
}

TEST(Training, LengthMustExceedM) {
    EXPECT_THROW(build_training(4, 4, 1.0, 1.0), InvalidInput);
    EXPECT_NO_THROW(build_training(5, 4, 1.0, 1.0));
}

TEST(Lse, NoiselessEstimatesAreExact) {
    RandomStream rng(9);
    const auto ch = sample_channel(unit_gains(4), 8, rng);
    const auto est = lse_estimate(ch, build_training(10, 4, 1.0, 1.0), 0.0, rng);
    EXPECT_LT((est.G_hat - ch.G).norm(), 1e-12);
    EXPECT_LT((est.f_M_hat - ch.f_M).norm(), 1e-12);
    EXPECT_LT((est.f_B_hat - ch.f_B).norm(), 1e-12);
    EXPECT_LT(std::abs(est.g_B_hat - ch.g_B), 1e-12);
    EXPECT_EQ(est.delta1, 0.0);
}

TEST(Lse, AnalyticErrorLevels) {
    RandomStream rng(9);
    const auto ch = sample_channel(unit_gains(4), 8, rng);
    const auto est = lse_estimate(ch, build_training(10, 4, 1.0, 0.5), 0.1, rng);
    EXPECT_DOUBLE_EQ(est.delta1, 0.01);
    EXPECT_DOUBLE_EQ(est.delta2, 0.02);
}

TEST(Lse, CrossContaminationNull) {
    RandomStream rng(9);
    auto ch = sample_channel(unit_gains(4), 8, rng);
    const auto train = build_training(10, 4, 1.0, 1.0);
    const auto a = lse_estimate(ch, train, 0.0, rng);
    ch.f_M *= cplx(37.0, -11.0);
    const auto b = lse_estimate(ch, train, 0.0, rng);
    EXPECT_LT((a.G_hat - b.G_hat).norm(), 1e-10);
}

TEST(Lse, UnbiasedWithAnalyticMse) {
    RandomStream rng(21);
    const auto lsf = unit_gains(4);
    const auto train = build_training(10, 4, 1.0, 1.0);
    const double noise = 0.1, d1 = noise / 10.0;
    const int trials = 10000;
    cplx bias{};
    double mse = 0.0, mse_b = 0.0;
    for (int t = 0; t < trials; ++t) {
        const auto ch = sample_channel(lsf, 8, rng);
        const auto est = lse_estimate(ch, train, noise, rng);
        bias += est.G_hat(1, 2) - ch.G(1, 2);
        mse += std::norm(est.G_hat(1, 2) - ch.G(1, 2));
        mse_b += std::norm(est.f_B_hat(0) - ch.f_B(0));
    }
    EXPECT_LT(std::abs(bias / static_cast<double>(trials)), 4.0 * std::sqrt(d1 / trials));
    EXPECT_NEAR(mse / trials, d1, 0.05 * d1);
    EXPECT_NEAR(mse_b / trials, d1, 0.05 * d1);
}

TEST(Lse, DimensionMismatch) {
    RandomStream rng(1);
    const auto ch = sample_channel(unit_gains(4), 8, rng);
    EXPECT_THROW(lse_estimate(ch, build_training(10, 3, 1.0, 1.0), 0.1, rng), DimensionError);
}
