#pragma once

#include "hcran/simulation.hpp"

#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace hcran {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

enum class ValidationLevel { Quick, Full };

namespace oracle {

inline CMatrix gaussian_matrix(int rows, int cols, RandomStream& rng) {
    CMatrix H(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < cols; ++k) H(i, k) = rng.cgauss();
    return H;
}

// Plain inverse of H H^H; independent of the library's solver path.
inline CMatrix wishart_inverse(int M, int K, RandomStream& rng) {
    const CMatrix H = gaussian_matrix(M, K, rng);
    return (H * H.adjoint()).inverse();
}

inline double perfect_bbu_utility(double T0, double t1, double R_C1, double R_C2, double R_C3) {
    return t1 * R_C1 + (T0 - t1) * R_C2 - T0 * R_C3;
}

}  // namespace oracle

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

inline SimulationConfig validation_config(CsiKind csi) {
    SimulationConfig c;
    c.csi = csi;
    return c;
}

inline DrawContext validation_draw(const SimulationConfig& cfg, double snr_db, std::uint64_t tag, int i) {
    RandomStream rng(cfg.seed, {0xC0FFEEull, tag, static_cast<std::uint64_t>(i)});
    return draw_tti(cfg, cfg.P_max / std::pow(10.0, snr_db / 10.0), rng);
}

inline CheckResult check_wishart_trace(int samples, double tol) {
    std::ostringstream detail;
    bool ok = true;
    for (auto [M, K] : {std::pair{4, 10}, std::pair{5, 10}, std::pair{4, 20}}) {
        RandomStream rng(7, {static_cast<std::uint64_t>(M), static_cast<std::uint64_t>(K)});
        double acc = 0.0;
        for (int s = 0; s < samples; ++s) acc += oracle::wishart_inverse(M, K, rng).trace().real();
        const double mc = acc / samples;
        const double expect = wishart_inv_trace(M, K);
        const double rel = std::abs(mc - expect) / expect;
        ok = ok && rel <= tol;
        detail << "(" << M << "," << K << ") mc=" << fmt(mc) << " exact=" << fmt(expect) << " ";
    }
    return {"wishart inverse trace", ok, detail.str()};
}

inline CheckResult check_wishart_diagonal(int samples, double tol) {
    std::ostringstream detail;
    bool ok = true;
    for (auto [M, K] : {std::pair{4, 10}, std::pair{4, 20}}) {
        RandomStream rng(11, {static_cast<std::uint64_t>(M), static_cast<std::uint64_t>(K)});
        double acc = 0.0;
        for (int s = 0; s < samples; ++s) acc += oracle::wishart_inverse(M, K, rng)(0, 0).real();
        const double mc = acc / samples;
        const double expect = 1.0 / (K - M);
        ok = ok && std::abs(mc - expect) / expect <= tol;
        detail << "(" << M << "," << K << ") mc=" << fmt(mc) << " exact=" << fmt(expect) << " ";
    }
    return {"inverse complex Wishart diagonal", ok, detail.str()};
}

inline CheckResult check_lse_mse(int trials, double tol) {
    LargeScaleFading lsf;
    lsf.rue_gains = RVector::Ones(5);
    lsf.mbs_rue_gains = RVector::Ones(4);
    lsf.mbs_mue_gain = 1.0;
    const double noise = 0.1;
    const TrainingConfig train = build_training(10, 4, 1.0, 0.5);
    RandomStream rng(13, {});
    double e_g = 0.0, e_fm = 0.0, e_gb = 0.0;
    std::size_t n_g = 0, n_fm = 0;
    for (int t = 0; t < trials; ++t) {
        const ChannelRealization ch = sample_channel(lsf, 8, rng);
        const EstimatedChannels est = lse_estimate(ch, train, noise, rng);
        e_g += (est.G_hat - ch.G).cwiseAbs2().sum();
        n_g += static_cast<std::size_t>(ch.G.size());
        e_fm += (est.f_M_hat - ch.f_M).cwiseAbs2().sum();
        n_fm += static_cast<std::size_t>(ch.f_M.size());
        e_gb += std::norm(est.g_B_hat - ch.g_B);
    }
    const double d1 = noise / (10 * 1.0), d2 = noise / (10 * 0.5);
    // Per-coefficient MSEs; G and f_M pool many coefficients, g_B has one per trial.
    const double r1 = std::abs(e_g / n_g - d1) / d1;
    const double r2 = std::abs(e_fm / n_fm - d2) / d2;
    const double r3 = std::abs(e_gb / trials - d2) / d2;
    const bool ok = r1 <= tol && r2 <= tol && r3 <= tol;
    return {"LSE mean-square error", ok,
            "rel err G=" + fmt(r1) + " f_M=" + fmt(r2) + " g_B=" + fmt(r3)};
}

// Literal utility values at hand-picked durations against direct algebra.
inline CheckResult check_utility_identities() {
    const PhaseRates r{3.0, 1.5, 5.0, 2.0, 0.75};
    const double T0 = 1.0;
    bool ok = true;
    auto expect = [&](PerfectContract c, double want) {
        c.T0 = T0;
        ok = ok && std::abs(utility_bbu(c, r) - want) <= 1e-12;
    };
    expect({0.0, 0.0}, T0 * (r.R_C2 - r.R_C3));
    expect({T0, 0.0}, T0 * (r.R_C1 - r.R_C3));
    expect({0.0, T0}, 0.0);
    PerfectContract half{0.5 * T0, 0.0};
    half.T0 = T0;
    ok = ok && std::abs(utility_mbs(half, r) - 0.5 * T0 * r.R_M1) <= 1e-12;
    return {"utility identities", ok, ok ? "" : "BBU/MBS utility disagrees with direct evaluation"};
}

inline CheckResult check_power_control(int draws, int grid) {
    const SimulationConfig cfg = validation_config(CsiKind::Perfect);
    int bad = 0;
    double worst = 0.0;
    for (int i = 0; i < draws; ++i) {
        const DrawContext d = validation_draw(cfg, 20.0, 1, i);
        const RateModel m = RateModel::perfect(d.channel, d.lsf, d.noise_var);
        const PowerControlResult pc = fairness_power_control(m, cfg.P_max);
        double best = 0.0;
        for (int a = 0; a < grid; ++a)
            for (int b = 0; b < grid; ++b) {
                const double pc3 = cfg.P_max * a / (grid - 1), pb = cfg.P_max * b / (grid - 1);
                const auto [rc, rm] = m.phase3_rates(pc3, pb);
                best = std::max(best, std::min(rc, rm));
            }
        const double gap = best - pc.min_rate();
        worst = std::max(worst, gap / (1.0 + best));
        if (gap > 1e-3 * (1.0 + best)) ++bad;
    }
    return {"max-min power control vs grid", bad == 0, "worst relative shortfall " + fmt(worst)};
}

inline CheckResult check_algorithm1(int draws, int grid) {
    const SimulationConfig cfg = validation_config(CsiKind::Perfect);
    int tested = 0, bad = 0, i = 0;
    double worst = 0.0;
    while (tested < draws && i < 50 * draws) {
        const DrawContext d = validation_draw(cfg, 20.0, 2, i++);
        const RateModel m = RateModel::perfect(d.channel, d.lsf, d.noise_var);
        const PerfectDesign des = design_contract_perfect(m, cfg.P_max, cfg.T0);
        if (des.rejection == Rejection::Infeasible || des.phase3.R_M3 <= 0.0) continue;
        ++tested;
        const double R_C2 = m.phase2_rate(m.phase2_power_cap(cfg.P_max));
        const double s2 = d.noise_var;
        const double eps1 = (1.0 / d.lsf.rue_part().array()).sum();
        const int dof = cfg.K - cfg.M - 1;
        auto U = [&](double P) {
            const double P_C1 = std::max(0.0, (dof * cfg.P_max - P / d.lsf.mue_gain()) / eps1);
            const double R_C1 = cfg.M * std::log2(1.0 + P_C1 / s2);
            const double R_M1 = std::log2(1.0 + P / s2);
            const double t1 = std::min(cfg.T0, cfg.T0 * des.phase3.R_M3 / R_M1);
            return oracle::perfect_bbu_utility(cfg.T0, t1, R_C1, R_C2, des.phase3.R_C3);
        };
        double best = -std::numeric_limits<double>::infinity();
        for (int g = 0; g < grid; ++g) best = std::max(best, U(des.search_lo + (des.search_hi - des.search_lo) * g / (grid - 1)));
        const double found = U(des.search.x);
        const double shortfall = (best - found) / std::max(std::abs(best), 1e-12);
        worst = std::max(worst, shortfall);
        if (shortfall > 1e-3) ++bad;
    }
    return {"perfect-CSI power search vs grid", bad == 0 && tested == draws,
            std::to_string(tested) + " draws, worst relative shortfall " + fmt(worst)};
}

inline CheckResult check_single_item_structure(int draws) {
    const SimulationConfig cfg = validation_config(CsiKind::Perfect);
    int accepted = 0, bad = 0, i = 0;
    while (accepted < draws && i < 200 * draws) {
        const DrawContext d = validation_draw(cfg, 30.0, 3, i++);
        const RateModel m = RateModel::perfect(d.channel, d.lsf, d.noise_var);
        const PerfectDesign des = design_contract_perfect(m, cfg.P_max, cfg.T0);
        if (!des.contract.accepted) continue;
        ++accepted;
        const auto& c = des.contract;
        const double lhs = phase1_power_lhs(c.P_C1, c.P_M1, d.lsf, cfg.K, CsiMode::perfect());
        const double agent = c.t1 * des.rates.R_M1;
        const bool ok = c.t3 == 0.0 && std::abs(lhs - cfg.P_max) <= 1e-9 * cfg.P_max &&
                        std::abs(agent - des.reservation) <= 1e-9 * std::max(1.0, des.reservation);
        if (!ok) ++bad;
    }
    return {"single-item contract structure", bad == 0 && accepted == draws,
            std::to_string(accepted) + " accepted draws, " + std::to_string(bad) + " violations"};
}

inline CheckResult check_menu_incentives(int draws) {
    const SimulationConfig cfg = validation_config(CsiKind::Estimated);
    const AgentTypeSet types = quantize_gB(cfg.mbs_mue_gain, cfg.L);
    int bad = 0;
    for (int i = 0; i < draws; ++i) {
        const DrawContext d = validation_draw(cfg, 20.0, 4, i);
        const RateModel view = RateModel::estimated(*d.estimate, d.lsf, d.noise_var);
        const PartialDesign des = design_contract_partial(view, types, exponential_interference(d.lsf), cfg.P_max, cfg.T0);
        const auto& c = des.contract;
        const double tol = 1e-9 * (1.0 + cfg.T0 * des.rates.R_M1);
        bool ok = ic_violation(c, des.rates.R_M1, des.rates.mue_rates) <= tol &&
                  ir_violation(c, des.rates.R_M1, des.rates.mue_rates) <= tol;
        for (int l = 0; l < types.size(); ++l)
            ok = ok && agent_best_response(c, l, des.rates.R_M1, des.rates.mue_rates) == l;
        for (int l = 1; l < c.size(); ++l) ok = ok && c.items[l].t3 >= c.items[l - 1].t3;
        if (!ok) ++bad;
    }
    return {"menu IC/IR exhaustive", bad == 0, std::to_string(draws) + " menus, " + std::to_string(bad) + " failing"};
}

inline CheckResult check_algorithm2(int draws, int grid) {
    const SimulationConfig cfg = validation_config(CsiKind::Estimated);
    const AgentTypeSet types = quantize_gB(cfg.mbs_mue_gain, cfg.L);
    int tested = 0, bad = 0, i = 0;
    double worst = 0.0;
    while (tested < draws && i < 50 * draws) {
        const DrawContext d = validation_draw(cfg, 20.0, 5, i++);
        const RateModel view = RateModel::estimated(*d.estimate, d.lsf, d.noise_var);
        const auto dists = exponential_interference(d.lsf);
        const PartialDesign des = design_contract_partial(view, types, dists, cfg.P_max, cfg.T0);
        if (des.rejection == Rejection::Infeasible) continue;
        ++tested;
        MenuRates base = des.rates;
        base.R_C2 = view.phase2_rate(des.P_C2);
        base.R_C3 = expected_phase3_rue_rate(view, des.phase3.P_C3, des.phase3.P_B, dists);
        auto U = [&](double P) {
            MenuRates r = base;
            std::tie(r.R_C1, r.R_M1) = view.phase1_rates(std::max(0.0, view.phase1_rue_power(P, cfg.P_max)), P);
            const MenuSolution s = solve_menu(r, types, cfg.T0);
            return s.feasible ? s.objective : -std::numeric_limits<double>::infinity();
        };
        double best = -std::numeric_limits<double>::infinity();
        for (int g = 0; g < grid; ++g) best = std::max(best, U(des.search_lo + (des.search_hi - des.search_lo) * g / (grid - 1)));
        const double found = U(des.search.x);
        const double shortfall = (best - found) / std::max(std::abs(best), 1e-12);
        worst = std::max(worst, shortfall);
        if (shortfall > 1e-3) ++bad;
    }
    return {"estimated-CSI power search vs grid", bad == 0 && tested == draws,
            std::to_string(tested) + " draws, worst relative shortfall " + fmt(worst)};
}

inline std::vector<CheckResult> run_validation(ValidationLevel level) {
    const bool full = level == ValidationLevel::Full;
    std::vector<CheckResult> out;
    out.push_back(check_utility_identities());
    out.push_back(check_wishart_trace(full ? 10000 : 2000, full ? 0.02 : 0.05));
    out.push_back(check_wishart_diagonal(full ? 10000 : 2000, full ? 0.03 : 0.06));
    out.push_back(check_lse_mse(full ? 10000 : 2000, full ? 0.05 : 0.1));
    out.push_back(check_power_control(full ? 100 : 10, full ? 512 : 128));
    out.push_back(check_algorithm1(full ? 100 : 20, full ? 100000 : 10000));
    out.push_back(check_single_item_structure(full ? 1000 : 100));
    out.push_back(check_menu_incentives(full ? 1000 : 100));
    out.push_back(check_algorithm2(full ? 100 : 10, full ? 100000 : 5000));
    return out;
}

}  // namespace hcran
