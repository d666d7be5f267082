#include "hcran/contract_partial.hpp"
#include "hcran/rates.hpp"

#include <gtest/gtest.h>

using namespace hcran;

namespace {

LargeScaleFading gains(int M, double v = 1.0, double mue = 1.0) {
    LargeScaleFading lsf;
    lsf.rue_gains = RVector::Constant(M + 1, v);
    lsf.rue_gains(M) = mue;
    lsf.mbs_rue_gains = RVector::Constant(M, 0.5);
    lsf.mbs_mue_gain = 2.0;
    return lsf;
}

LargeScaleFading random_gains(int M, RandomStream& rng) {
    LargeScaleFading lsf;
    lsf.rue_gains.resize(M + 1);
    for (int m = 0; m <= M; ++m) lsf.rue_gains(m) = rng.uniform(0.2, 2.0);
    lsf.mbs_rue_gains = RVector::Constant(M, 0.3);
    lsf.mbs_mue_gain = 1.5;
    return lsf;
}

// Exact estimates with zero error variances.
EstimatedChannels exact(const ChannelRealization& ch) {
    return {ch.G, ch.f_M, ch.f_B, ch.g_B, 0.0, 0.0};
}

}  // namespace

TEST(Phase1, Perfect) {
    RandomStream rng(1);
    const auto lsf = gains(4);
    const auto m = RateModel::perfect(sample_channel(lsf, 8, rng), lsf, 1.0);
    EXPECT_EQ(m.phase1_rates(0.0, 1.0).first, 0.0);
    EXPECT_NEAR(m.phase1_rates(1.0, 0.0).first, 4.0, 1e-14);
    EXPECT_NEAR(m.phase1_rates(1.0, 3.0).second, 2.0, 1e-14);
}

TEST(Phase1, PowerConstraintLhs) {
    const auto lsf = gains(4);
    EXPECT_EQ(phase1_power_lhs(0.0, 0.0, lsf, 6, CsiMode::perfect()), 0.0);
    EXPECT_DOUBLE_EQ(phase1_power_lhs(1.0, 1.0, lsf, 6, CsiMode::perfect()), 5.0);
    EXPECT_DOUBLE_EQ(phase1_power_lhs(1.0, 1.0, lsf, 6, CsiMode::estimated(0.0, 0.0)), 5.0);
    EXPECT_THROW(phase1_power_lhs(1.0, 1.0, lsf, 5, CsiMode::perfect()), DimensionError);
    // υ+δ replaces υ under estimated CSI.
    EXPECT_DOUBLE_EQ(phase1_power_lhs(1.0, 1.0, lsf, 6, CsiMode::estimated(1.0, 1.0)), 4.0 / 2.0 + 1.0 / 2.0);
}

TEST(Phase2, PowerCap) {
    const auto lsf = gains(4);
    EXPECT_DOUBLE_EQ(phase2_power_cap(lsf, 10, 1.0, CsiMode::perfect()), 1.5);
    EXPECT_DOUBLE_EQ(phase2_power_cap(lsf, 10, 1.0, CsiMode::estimated(0.0, 0.3)), 1.5);
    EXPECT_DOUBLE_EQ(phase2_power_cap(lsf, 10, 1.0, CsiMode::estimated(1.0, 0.0)), 6.0 / 2.0);
    EXPECT_THROW(phase2_power_cap(lsf, 4, 1.0, CsiMode::perfect()), DimensionError);
}

TEST(Phase2, Rate) {
    RandomStream rng(2);
    const auto lsf = gains(4);
    const auto m = RateModel::perfect(sample_channel(lsf, 8, rng), lsf, 1.0);
    EXPECT_EQ(m.phase2_rate(0.0), 0.0);
    EXPECT_NEAR(m.phase2_rate(3.0), 8.0, 1e-14);
}

TEST(Phase3, ZeroPowers) {
    RandomStream rng(3);
    const auto lsf = gains(4);
    const auto m = RateModel::perfect(sample_channel(lsf, 8, rng), lsf, 0.1);
    const auto [rc, rm] = m.phase3_rates(0.0, 0.0);
    EXPECT_EQ(rc, 0.0);
    EXPECT_EQ(rm, 0.0);
}

TEST(Phase3, LeakageVanishesWithoutRrhPower) {
    RandomStream rng(3);
    const auto lsf = gains(4);
    const auto ch = sample_channel(lsf, 8, rng);
    const auto m = RateModel::perfect(ch, lsf, 0.1);
    EXPECT_NEAR(m.phase3_rates(0.0, 1.0).second, std::log2(1.0 + std::norm(ch.g_B) / 0.1), 1e-12);
}

TEST(Phase3, LeakageMatchesExplicitInverse) {
    RandomStream rng(4);
    const auto lsf = gains(4);
    const auto ch = sample_channel(lsf, 9, rng);
    const auto m = RateModel::perfect(ch, lsf, 0.1);
    const CMatrix inv = (ch.G * ch.G.adjoint()).inverse();
    const CVector row = ch.f_M.transpose() * ch.G.adjoint();  // f_M G^H as a row
    const double leak = (row.transpose() * inv * inv * (ch.G * ch.f_M.conjugate()))(0).real();
    EXPECT_NEAR(m.links().mue_leakage, leak, 1e-10 * leak);
    const double expect = std::log2(1.0 + std::norm(ch.g_B) * 0.7 / (0.4 * leak + 0.1));
    EXPECT_NEAR(m.phase3_rates(0.4, 0.7).second, expect, 1e-12);
}

TEST(Modes, EstimatedWithoutErrorEqualsPerfect) {
    RandomStream rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto lsf = random_gains(4, rng);
        const auto ch = sample_channel(lsf, 10, rng);
        const auto p = RateModel::perfect(ch, lsf, 0.05);
        const auto e = RateModel::estimated(exact(ch), lsf, 0.05);
        const PowerTuple pw{0.3, 0.8, 1.1, 0.6, 0.9, 1.0};
        const PhaseRates a = p.all_rates(pw), b = e.all_rates(pw);
        for (auto [x, y] : {std::pair{a.R_C1, b.R_C1}, {a.R_M1, b.R_M1}, {a.R_C2, b.R_C2}, {a.R_C3, b.R_C3},
                            {a.R_M3, b.R_M3}})
            EXPECT_NEAR(x, y, 1e-10 * std::max(1.0, std::abs(x)));
        EXPECT_DOUBLE_EQ(p.phase2_power_cap(1.0), e.phase2_power_cap(1.0));
    }
}

TEST(Modes, EstimatedPhase1UsesInverseGramDiagonal) {
    RandomStream rng(6);
    const auto lsf = gains(4);
    const auto ch = sample_channel(lsf, 10, rng);
    EstimatedChannels est = exact(ch);
    est.delta1 = 0.02;
    est.delta2 = 0.05;
    const auto m = RateModel::estimated(est, lsf, 0.1);
    CMatrix F(5, 10);
    F << ch.G, ch.f_M.transpose();
    const CMatrix Finv = (F * F.adjoint()).inverse();
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += Finv(i, i).real();
    const double den = 0.02 * 0.7 * s + 0.05 * 0.4 * Finv(4, 4).real() + 0.1;
    const auto [rc, rm] = m.phase1_rates(0.7, 0.4);
    EXPECT_NEAR(rc, 4.0 * std::log2(1.0 + 0.7 / den), 1e-12);
    EXPECT_NEAR(rm, std::log2(1.0 + 0.4 / den), 1e-12);
    const double tr = (ch.G * ch.G.adjoint()).inverse().trace().real();
    EXPECT_NEAR(m.phase2_rate(1.2), 4.0 * std::log2(1.0 + 1.2 / (0.02 * 1.2 * tr + 0.1)), 1e-12);
}

TEST(Modes, SingularGramIsReported) {
    const auto lsf = gains(2);
    ChannelRealization ch;
    ch.G = CMatrix::Ones(2, 5);
    ch.f_M = CVector::Ones(5);
    ch.f_B = CVector::Ones(2);
    ch.g_B = 1.0;
    EXPECT_THROW(RateModel::perfect(ch, lsf, 0.1), NumericalError);
}

TEST(Modes, LargeKConvergesToEstimated) {
    const int M = 4;
    double prev = std::numeric_limits<double>::infinity();
    for (int K : {16, 64, 256}) {
        RandomStream rng(100, {static_cast<std::uint64_t>(K)});
        double gap = 0.0;
        const int draws = 1000;
        for (int i = 0; i < draws; ++i) {
            auto lsf = gains(M, 1.0, 1.0);
            const double d1 = 0.05, d2 = 0.05;
            const auto ch = sample_channel(lsf, K, rng);
            EstimatedChannels est = exact(ch);
            // Estimation errors of the stated variance, added directly.
            for (int m = 0; m < M; ++m)
                for (int k = 0; k < K; ++k) est.G_hat(m, k) += std::sqrt(d1) * rng.cgauss();
            for (int k = 0; k < K; ++k) est.f_M_hat(k) += std::sqrt(d2) * rng.cgauss();
            est.delta1 = d1;
            est.delta2 = d2;
            const double noise = 0.01;
            const auto e = RateModel::estimated(est, lsf, noise).observing(ch.f_B, ch.g_B, ch.f_M);
            const auto l = RateModel::large_k(lsf, K, d1, d2, ch.f_B, ch.g_B, noise);
            const double pc1 = e.phase1_rue_power(0.5, 1.0) * 0.5;
            const PowerTuple pw{pc1, 0.5, e.phase2_power_cap(1.0), 0.8, 0.6, 1.0};
            const PhaseRates a = e.all_rates(pw), b = l.all_rates(pw);
            gap += std::abs(a.R_C1 - b.R_C1) + std::abs(a.R_M1 - b.R_M1) + std::abs(a.R_C2 - b.R_C2) +
                   std::abs(a.R_C3 - b.R_C3) + std::abs(a.R_M3 - b.R_M3);
        }
        gap /= draws;
        EXPECT_LT(gap, prev) << "K=" << K;
        prev = gap;
    }
}

TEST(Monotonicity, RandomGrids) {
    RandomStream rng(8);
    const auto lsf = random_gains(4, rng);
    const auto ch = sample_channel(lsf, 10, rng);
    EstimatedChannels est = exact(ch);
    est.delta1 = 0.01;
    est.delta2 = 0.02;
    for (const RateModel& m : {RateModel::perfect(ch, lsf, 0.1), RateModel::estimated(est, lsf, 0.1)}) {
        for (int i = 0; i < 200; ++i) {
            const double a = rng.uniform(0.0, 1.0), b = rng.uniform(0.0, 1.0), up = a + rng.uniform(0.0, 1.0);
            EXPECT_LE(m.phase1_rates(a, b).first, m.phase1_rates(up, b).first + 1e-12);
            EXPECT_LE(m.phase1_rates(b, a).second, m.phase1_rates(b, up).second + 1e-12);
            EXPECT_LE(m.phase2_rate(a), m.phase2_rate(up) + 1e-12);
            // Phase III: own power up, interference power up.
            EXPECT_LE(m.phase3_rates(a, b).first, m.phase3_rates(up, b).first + 1e-12);
            EXPECT_GE(m.phase3_rates(b, a).first, m.phase3_rates(b, up).first - 1e-12);
            EXPECT_LE(m.phase3_rates(b, a).second, m.phase3_rates(b, up).second + 1e-12);
            EXPECT_GE(m.phase3_rates(a, b).second, m.phase3_rates(up, b).second - 1e-12);
        }
    }
}

TEST(Wishart, InverseTraceFormula) {
    EXPECT_DOUBLE_EQ(wishart_inv_trace(5, 10), 1.0);
    EXPECT_DOUBLE_EQ(wishart_inv_trace(1, 2), 1.0);
    EXPECT_DOUBLE_EQ(wishart_inv_trace(4, 8), 1.0);
    EXPECT_THROW(wishart_inv_trace(4, 4), InvalidInput);
}

TEST(Wishart, MonteCarloInverseTrace) {
    for (auto [M, K] : {std::pair{5, 10}, {4, 8}, {4, 10}, {4, 20}}) {
        RandomStream rng(31, {static_cast<std::uint64_t>(M), static_cast<std::uint64_t>(K)});
        const int n = 10000;
        double acc = 0.0;
        for (int s = 0; s < n; ++s) {
            CMatrix H(M, K);
            for (int i = 0; i < M; ++i)
                for (int k = 0; k < K; ++k) H(i, k) = rng.cgauss();
            acc += (H * H.adjoint()).inverse().trace().real();
        }
        EXPECT_NEAR(acc / n, wishart_inv_trace(M, K), 0.02 * wishart_inv_trace(M, K)) << M << "," << K;
    }
}

// For M = 1 the inverse has infinite variance when K = 2, so integrate against
// the Gamma(K) law of |h|^2 instead of sampling.
TEST(Wishart, ScalarCaseByQuadrature) {
    const GaussLaguerre gl(64);
    for (int K : {2, 3, 6}) {
        double e = 0.0;
        for (int i = 0; i < gl.nodes.size(); ++i) e += gl.weights[i] * std::pow(gl.nodes[i], K - 2) / std::tgamma(K);
        EXPECT_NEAR(e, wishart_inv_trace(1, K), 1e-12) << K;
    }
}

TEST(LogBase, RatesScaleUniformly) {
    RandomStream rng(9);
    const auto lsf = gains(4);
    const auto ch = sample_channel(lsf, 8, rng);
    const auto two = RateModel::perfect(ch, lsf, 0.1, LogBase(2.0));
    const auto e = RateModel::perfect(ch, lsf, 0.1, LogBase(std::exp(1.0)));
    const PowerTuple pw{0.3, 0.8, 1.1, 0.6, 0.9, 1.0};
    const PhaseRates a = two.all_rates(pw), b = e.all_rates(pw);
    EXPECT_NEAR(a.R_C1 * std::log(2.0), b.R_C1, 1e-12);
    EXPECT_NEAR(a.R_M3 * std::log(2.0), b.R_M3, 1e-12);
    EXPECT_THROW(LogBase(1.0), InvalidInput);
}
