#pragma once

#include "hcran/channel_model.hpp"
#include "hcran/common.hpp"

#include <Eigen/Eigenvalues>

#include <limits>
#include <memory>
#include <tuple>
#include <utility>

namespace hcran {

struct CsiMode {
    enum class Kind { Perfect, Estimated, LargeK };

    Kind kind = Kind::Perfect;
    double delta1 = 0.0;
    double delta2 = 0.0;

    static CsiMode perfect() { return {}; }
    static CsiMode estimated(double d1, double d2) { return make(Kind::Estimated, d1, d2); }
    static CsiMode large_k(double d1, double d2) { return make(Kind::LargeK, d1, d2); }

    bool is_perfect() const { return kind == Kind::Perfect; }
    // Error variances that enter the power budget (zero under perfect CSI).
    double budget_delta1() const { return is_perfect() ? 0.0 : delta1; }
    double budget_delta2() const { return is_perfect() ? 0.0 : delta2; }

private:
    static CsiMode make(Kind k, double d1, double d2) {
        require(d1 >= 0.0 && d2 >= 0.0 && std::isfinite(d1) && std::isfinite(d2), "CSI error variances must be >= 0");
        return {k, d1, d2};
    }
};

struct PowerTuple {
    double P_C1 = 0.0;
    double P_M1 = 0.0;
    double P_C2 = 0.0;
    double P_C3 = 0.0;
    double P_B = 0.0;
    double P_max = 1.0;
};

struct PhaseRates {
    double R_C1 = 0.0;
    double R_M1 = 0.0;
    double R_C2 = 0.0;
    double R_C3 = 0.0;
    double R_M3 = 0.0;
};

// Solves against the Gram matrix rows·rows^H. Throws if it is numerically singular.
class GramSolver {
public:
    explicit GramSolver(const CMatrix& rows) : rows_(rows) {
        const CMatrix gram = rows * rows.adjoint();
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
        if (eig.info() != Eigen::Success) throw NumericalError("Gram eigen-decomposition failed");
        const RVector& ev = eig.eigenvalues();
        const double lmax = ev.maxCoeff();
        const double dim = static_cast<double>(std::max(rows.rows(), rows.cols()));
        const double tol = std::numeric_limits<double>::epsilon() * dim * lmax;
        if (!(lmax > 0.0) || !(ev.minCoeff() > tol) || !std::isfinite(lmax))
            throw NumericalError("Gram matrix is numerically singular");
        ldlt_.compute(gram);
    }

    CVector solve(const CVector& rhs) const { return ldlt_.solve(rhs); }

    RVector inverse_diagonal() const {
        const Eigen::Index n = rows_.rows();
        RVector d(n);
        for (Eigen::Index i = 0; i < n; ++i) d(i) = solve(CVector::Unit(n, i))(i).real();
        return d;
    }

    double inverse_trace() const { return inverse_diagonal().sum(); }

    // f rows^H (rows rows^H)^{-2} rows f^H for a row vector f of length K.
    double leakage(const CVector& f) const {
        const CVector x = solve(rows_ * f.conjugate());
        return x.squaredNorm();
    }

private:
    CMatrix rows_;
    Eigen::LDLT<CMatrix> ldlt_;
};

// Interference seen in Phase III: |f_Bm|², |g_B|² and the ZF leakage towards the MUE.
struct InterferenceLinks {
    RVector mbs_rue_power;
    double mbs_mue_power = 0.0;
    double mue_leakage = 0.0;
};

inline double inverse_gain_sum(const LargeScaleFading& lsf, double delta1) {
    return (1.0 / (lsf.rue_part().array() + delta1)).sum();
}

inline double wishart_inv_trace(int M_dim, int K_dof) {
    require(M_dim >= 1, "matrix dimension must be positive");
    require(K_dof > M_dim, "Wishart inverse trace needs K > M");
    return static_cast<double>(M_dim) / (K_dof - M_dim);
}

// Left side of the Phase-I expected transmit-power constraint.
inline double phase1_power_lhs(double P_C1, double P_M1, const LargeScaleFading& lsf, int K, const CsiMode& mode) {
    const int M = lsf.num_rues();
    if (K <= M + 1) throw DimensionError("Phase-I constraint needs K > M+1");
    const double eps = inverse_gain_sum(lsf, mode.budget_delta1());
    const double dof = K - M - 1;
    return P_C1 * eps / dof + P_M1 / (dof * (lsf.mue_gain() + mode.budget_delta2()));
}

inline double phase2_power_cap(const LargeScaleFading& lsf, int K, double P_max, const CsiMode& mode) {
    const int M = lsf.num_rues();
    if (K <= M) throw DimensionError("Phase-II power cap needs K > M");
    const double eps = inverse_gain_sum(lsf, mode.budget_delta1());
    if (!(eps > 0.0) || !std::isfinite(eps)) throw NumericalError("non-finite inverse gain sum");
    return (K - M) * P_max / eps;
}

// Everything the rate formulas need for one draw under one CSI mode.
class RateModel {
public:
    static RateModel perfect(const ChannelRealization& ch, const LargeScaleFading& lsf, double noise_var,
                             LogBase log = LogBase{}) {
        RateModel r(CsiMode::perfect(), lsf, ch.K(), noise_var, log);
        r.gram_ = std::make_shared<GramSolver>(ch.G);
        r.links_ = r.observe_links(ch.f_B, ch.g_B, ch.f_M);
        return r;
    }

    // Principal's view: estimated precoder geometry and estimated interference links.
    static RateModel estimated(const EstimatedChannels& est, const LargeScaleFading& lsf, double noise_var,
                               LogBase log = LogBase{}) {
        RateModel r(CsiMode::estimated(est.delta1, est.delta2), lsf, static_cast<int>(est.G_hat.cols()), noise_var, log);
        r.gram_ = std::make_shared<GramSolver>(est.G_hat);
        CMatrix F(est.G_hat.rows() + 1, est.G_hat.cols());
        F << est.G_hat, est.f_M_hat.transpose();
        const RVector diag = GramSolver(F).inverse_diagonal();
        r.phase1_rue_diag_ = diag.head(r.M_).sum();
        r.phase1_mue_diag_ = diag(r.M_);
        r.gram_trace_ = r.gram_->inverse_trace();
        r.links_ = r.observe_links(est.f_B_hat, est.g_B_hat, est.f_M_hat);
        return r;
    }

    static RateModel large_k(const LargeScaleFading& lsf, int K, double delta1, double delta2, const CVector& f_B,
                             cplx g_B, double noise_var, LogBase log = LogBase{}) {
        RateModel r(CsiMode::large_k(delta1, delta2), lsf, K, noise_var, log);
        if (K <= r.M_ + 1) throw DimensionError("large-K rates need K > M+1");
        const double eps_over_k = r.eps_ / K;
        r.phase1_rue_diag_ = eps_over_k;
        r.phase1_mue_diag_ = 1.0 / (K * (lsf.mue_gain() + delta2));
        r.gram_trace_ = eps_over_k;
        r.links_.mbs_rue_power = f_B.cwiseAbs2();
        r.links_.mbs_mue_power = std::norm(g_B);
        r.links_.mue_leakage = lsf.mue_gain() * eps_over_k;
        return r;
    }

    // Same precoder geometry, interference links replaced (e.g. the true channels).
    RateModel observing(const CVector& f_B, cplx g_B, const CVector& f_M) const {
        RateModel r = *this;
        r.links_ = observe_links(f_B, g_B, f_M);
        return r;
    }

    RateModel with_links(InterferenceLinks links) const {
        if (links.mbs_rue_power.size() != M_) throw DimensionError("interference vector must have M entries");
        RateModel r = *this;
        r.links_ = std::move(links);
        return r;
    }

    const CsiMode& mode() const { return mode_; }
    const LargeScaleFading& large_scale() const { return lsf_; }
    const InterferenceLinks& links() const { return links_; }
    const LogBase& log() const { return log_; }
    int M() const { return M_; }
    int K() const { return K_; }
    double noise_var() const { return noise_var_; }
    // ε1 under perfect CSI, ε2 otherwise.
    double eps() const { return eps_; }
    double mue_budget_gain() const { return lsf_.mue_gain() + mode_.budget_delta2(); }
    double gram_trace() const { return gram_trace_; }

    // Self-interference from estimation error in the Phase-I denominators.
    double phase1_error_power(double P_C1, double P_M1) const {
        if (mode_.is_perfect()) return 0.0;
        return mode_.delta1 * P_C1 * phase1_rue_diag_ + mode_.delta2 * P_M1 * phase1_mue_diag_;
    }

    std::pair<double, double> phase1_rates(double P_C1, double P_M1) const {
        require(P_C1 >= 0.0 && P_M1 >= 0.0, "Phase-I powers must be non-negative");
        const double den = phase1_error_power(P_C1, P_M1) + noise_var_;
        return {M_ * log_.log1p(P_C1 / den), log_.log1p(P_M1 / den)};
    }

    double phase1_power_lhs(double P_C1, double P_M1) const {
        return hcran::phase1_power_lhs(P_C1, P_M1, lsf_, K_, mode_);
    }

    // P_C1 that makes the Phase-I constraint tight for a given P_M1 (may be negative).
    double phase1_rue_power(double P_M1, double P_max) const {
        const double dof = K_ - M_ - 1;
        return (dof * P_max - P_M1 / mue_budget_gain()) / eps_;
    }

    double phase1_mue_power_limit(double P_max) const { return (K_ - M_ - 1) * mue_budget_gain() * P_max; }

    double phase2_power_cap(double P_max) const { return hcran::phase2_power_cap(lsf_, K_, P_max, mode_); }

    double phase2_rate(double P_C2) const {
        require(P_C2 >= 0.0, "Phase-II power must be non-negative");
        const double err = mode_.is_perfect() ? 0.0 : mode_.delta1 * P_C2 * gram_trace_;
        return M_ * log_.log1p(P_C2 / (err + noise_var_));
    }

    // One RUE's Phase-III rate for MBS interference power z = |f_Bm|².
    double phase3_rue_term(double P_C3, double P_B, double z) const {
        const double err = mode_.is_perfect() ? 0.0 : mode_.delta1 * P_C3 * gram_trace_;
        return log_.log1p(P_C3 / (err + z * P_B + noise_var_));
    }

    double phase3_rue_rate(double P_C3, double P_B) const {
        double sum = 0.0;
        for (double z : links_.mbs_rue_power) sum += phase3_rue_term(P_C3, P_B, z);
        return sum;
    }

    // MUE Phase-III rate for a given |g_B|² (the realized one by default).
    double phase3_mue_rate(double P_C3, double P_B, double g_power) const {
        return log_.log1p(g_power * P_B / (P_C3 * links_.mue_leakage + noise_var_));
    }
    double phase3_mue_rate(double P_C3, double P_B) const { return phase3_mue_rate(P_C3, P_B, links_.mbs_mue_power); }

    std::pair<double, double> phase3_rates(double P_C3, double P_B) const {
        require(P_C3 >= 0.0 && P_B >= 0.0, "Phase-III powers must be non-negative");
        return {phase3_rue_rate(P_C3, P_B), phase3_mue_rate(P_C3, P_B)};
    }

    PhaseRates all_rates(const PowerTuple& p) const {
        PhaseRates r;
        std::tie(r.R_C1, r.R_M1) = phase1_rates(p.P_C1, p.P_M1);
        r.R_C2 = phase2_rate(p.P_C2);
        std::tie(r.R_C3, r.R_M3) = phase3_rates(p.P_C3, p.P_B);
        return r;
    }

private:
    RateModel(CsiMode mode, const LargeScaleFading& lsf, int K, double noise_var, LogBase log)
        : mode_(mode), lsf_(lsf), M_(lsf.num_rues()), K_(K), noise_var_(noise_var), log_(log) {
        lsf_.validate();
        require(noise_var > 0.0 && std::isfinite(noise_var), "noise variance must be positive");
        if (K_ <= M_ + 1) throw DimensionError("zero-forcing needs K > M+1 RRHs");
        eps_ = inverse_gain_sum(lsf_, mode_.budget_delta1());
    }

    InterferenceLinks observe_links(const CVector& f_B, cplx g_B, const CVector& f_M) const {
        if (f_B.size() != M_ || f_M.size() != K_) throw DimensionError("interference channel dimensions");
        InterferenceLinks l;
        l.mbs_rue_power = f_B.cwiseAbs2();
        l.mbs_mue_power = std::norm(g_B);
        l.mue_leakage = gram_ ? gram_->leakage(f_M) : lsf_.mue_gain() * eps_ / K_;
        return l;
    }

    CsiMode mode_;
    LargeScaleFading lsf_;
    int M_;
    int K_;
    double noise_var_;
    LogBase log_;
    double eps_ = 0.0;
    double phase1_rue_diag_ = 0.0;
    double phase1_mue_diag_ = 0.0;
    double gram_trace_ = 0.0;
    std::shared_ptr<const GramSolver> gram_;
    InterferenceLinks links_;
};

}  // namespace hcran
