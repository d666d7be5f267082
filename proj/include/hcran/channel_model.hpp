#pragma once

#include "hcran/common.hpp"
#include "hcran/random.hpp"

#include <numbers>
#include <vector>

namespace hcran {

struct PathLossModel {
    double shadow_std_db = 8.0;
    double exponent = 3.8;
    double ref_distance = 100.0;  // meters
};

// Gains υ_m for M RUEs followed by υ_{M+1} for the RRH→MUE links, the MBS→RUE
// interference variances, and the MBS→MUE variance.
struct LargeScaleFading {
    RVector rue_gains;
    RVector mbs_rue_gains;
    double mbs_mue_gain = 1.0;

    int num_rues() const { return static_cast<int>(mbs_rue_gains.size()); }
    double rue_gain(int m) const { return rue_gains(m); }
    double mue_gain() const { return rue_gains(num_rues()); }
    auto rue_part() const { return rue_gains.head(num_rues()); }

    void validate() const {
        if (rue_gains.size() != mbs_rue_gains.size() + 1)
            throw DimensionError("rue_gains must have M+1 entries for M mbs_rue_gains");
        auto positive = [](double g) { return std::isfinite(g) && g > 0.0; };
        for (double g : rue_gains) require(positive(g), "large-scale gains must be positive and finite");
        for (double g : mbs_rue_gains) require(positive(g), "large-scale gains must be positive and finite");
        require(positive(mbs_mue_gain), "mbs_mue_gain must be positive and finite");
    }
};

struct ChannelRealization {
    CMatrix G;    // M x K, RRHs -> RUEs
    CVector f_B;  // M, MBS -> RUEs
    CVector f_M;  // K, RRHs -> MUE
    cplx g_B;     // MBS -> MUE

    int M() const { return static_cast<int>(G.rows()); }
    int K() const { return static_cast<int>(G.cols()); }
};

struct TrainingConfig {
    int N = 0;
    double Ps = 0.0;
    double Pb = 0.0;
    CMatrix sequences;  // N x (M+1); column m is ψ_m, the last column belongs to the MUE

    int M() const { return static_cast<int>(sequences.cols()) - 1; }
};

struct EstimatedChannels {
    CMatrix G_hat;
    CVector f_M_hat;
    CVector f_B_hat;
    cplx g_B_hat;
    double delta1 = 0.0;
    double delta2 = 0.0;
};

// υ = z / (r/r0)^v with z log-normal, its dB value Gaussian with the given std.
inline double path_gain(double distance, const PathLossModel& model, RandomStream& rng) {
    require(distance > 0.0 && std::isfinite(distance), "distance must be positive");
    require(model.exponent > 0.0, "path-loss exponent must be positive");
    require(model.ref_distance > 0.0, "reference distance must be positive");
    require(model.shadow_std_db >= 0.0, "shadowing std must be non-negative");
    const double shadow_db = model.shadow_std_db > 0.0 ? model.shadow_std_db * rng.normal() : 0.0;
    return std::pow(10.0, shadow_db / 10.0) / std::pow(distance / model.ref_distance, model.exponent);
}

inline RVector path_gains(const std::vector<double>& distances, const PathLossModel& model, RandomStream& rng) {
    RVector out(static_cast<Eigen::Index>(distances.size()));
    for (std::size_t i = 0; i < distances.size(); ++i) out(static_cast<Eigen::Index>(i)) = path_gain(distances[i], model, rng);
    return out;
}

// rue_distances holds M RUE distances then the MUE distance (all to the RRH cluster).
inline LargeScaleFading gen_large_scale(const std::vector<double>& rue_distances,
                                        const std::vector<double>& mbs_rue_distances,
                                        double mbs_mue_gain, const PathLossModel& model, RandomStream& rng) {
    if (rue_distances.size() != mbs_rue_distances.size() + 1)
        throw DimensionError("need M+1 RRH-side distances and M MBS-side distances");
    LargeScaleFading lsf;
    lsf.rue_gains = path_gains(rue_distances, model, rng);
    lsf.mbs_rue_gains = path_gains(mbs_rue_distances, model, rng);
    lsf.mbs_mue_gain = mbs_mue_gain;
    lsf.validate();
    return lsf;
}

// Gains of zero are allowed here so degenerate test channels can be built.
inline ChannelRealization sample_channel(const LargeScaleFading& lsf, int K, RandomStream& rng) {
    const int M = lsf.num_rues();
    if (lsf.rue_gains.size() != M + 1) throw DimensionError("rue_gains must have M+1 entries");
    if (K <= M + 1) throw DimensionError("zero-forcing needs K > M+1 RRHs");
    ChannelRealization ch;
    ch.G.resize(M, K);
    for (int m = 0; m < M; ++m) {
        const double s = std::sqrt(lsf.rue_gains(m));
        for (int k = 0; k < K; ++k) ch.G(m, k) = s * rng.cgauss();
    }
    ch.f_M.resize(K);
    const double sm = std::sqrt(lsf.mue_gain());
    for (int k = 0; k < K; ++k) ch.f_M(k) = sm * rng.cgauss();
    ch.f_B.resize(M);
    for (int m = 0; m < M; ++m) ch.f_B(m) = std::sqrt(lsf.mbs_rue_gains(m)) * rng.cgauss();
    ch.g_B = std::sqrt(lsf.mbs_mue_gain) * rng.cgauss();
    return ch;
}

// Scaled columns of the N-point DFT basis.
inline TrainingConfig build_training(int N, int M, double Ps, double Pb) {
    require(M >= 1, "need at least one RUE");
    require(N > M, "training length N must exceed M");
    require(Ps > 0.0 && Pb > 0.0, "training powers must be positive");
    TrainingConfig t;
    t.N = N;
    t.Ps = Ps;
    t.Pb = Pb;
    t.sequences.resize(N, M + 1);
    for (int j = 0; j <= M; ++j) {
        const double amp = std::sqrt(j < M ? Ps : Pb);
        for (int n = 0; n < N; ++n) {
            const double phase = -2.0 * std::numbers::pi * static_cast<double>(n) * j / N;
            t.sequences(n, j) = amp * cplx(std::cos(phase), std::sin(phase));
        }
    }
    return t;
}

// Simulates the uplink training observations at every RRH and at the MBS,
// then projects them onto each sequence.
inline EstimatedChannels lse_estimate(const ChannelRealization& ch, const TrainingConfig& train,
                                      double noise_var, RandomStream& rng) {
    const int M = ch.M();
    const int K = ch.K();
    const int N = train.N;
    if (train.M() != M) throw DimensionError("training set size does not match M");
    if (ch.f_M.size() != K || ch.f_B.size() != M) throw DimensionError("inconsistent channel dimensions");
    require(noise_var >= 0.0, "noise variance must be non-negative");

    const CMatrix& psi = train.sequences;
    const RVector norms = psi.colwise().squaredNorm().transpose();
    const double noise_amp = std::sqrt(noise_var);
    auto noise = [&] {
        CVector w(N);
        for (int n = 0; n < N; ++n) w(n) = noise_amp > 0.0 ? noise_amp * rng.cgauss() : cplx{};
        return w;
    };

    EstimatedChannels est;
    est.G_hat.resize(M, K);
    est.f_M_hat.resize(K);
    for (int k = 0; k < K; ++k) {
        CVector x = psi.leftCols(M) * ch.G.col(k) + psi.col(M) * ch.f_M(k) + noise();
        const CVector proj = psi.adjoint() * x;
        for (int m = 0; m < M; ++m) est.G_hat(m, k) = proj(m) / norms(m);
        est.f_M_hat(k) = proj(M) / norms(M);
    }
    CVector xB = psi.leftCols(M) * ch.f_B + psi.col(M) * ch.g_B + noise();
    const CVector projB = psi.adjoint() * xB;
    est.f_B_hat.resize(M);
    for (int m = 0; m < M; ++m) est.f_B_hat(m) = projB(m) / norms(m);
    est.g_B_hat = projB(M) / norms(M);
    est.delta1 = noise_var / (N * train.Ps);
    est.delta2 = noise_var / (N * train.Pb);
    return est;
}

}  // namespace hcran
