#pragma once

#include "hcran/rates.hpp"

namespace hcran {

struct PowerControlResult {
    double P_C3 = 0.0;
    double P_B = 0.0;
    double R_C3 = 0.0;
    double R_M3 = 0.0;

    double min_rate() const { return std::min(R_C3, R_M3); }
};

struct BisectionSettings {
    double power_tol = 1e-9;
    int max_iter = 200;
};

namespace detail {

// Root of a monotone difference on [0, hi]; `increasing` gives its direction.
template <class F>
double bisect_balance(F&& diff, double hi, bool increasing, const BisectionSettings& s) {
    const double d_lo = diff(0.0);
    const double d_hi = diff(hi);
    if (increasing) {
        if (d_hi <= 0.0) return hi;
        if (d_lo >= 0.0) return 0.0;
    } else {
        if (d_hi >= 0.0) return hi;
        if (d_lo <= 0.0) return 0.0;
    }
    double lo = 0.0;
    double up = hi;
    for (int i = 0; i < s.max_iter && up - lo > s.power_tol; ++i) {
        const double mid = 0.5 * (lo + up);
        const double d = diff(mid);
        if ((d < 0.0) == increasing) lo = mid;
        else up = mid;
    }
    return 0.5 * (lo + up);
}

}  // namespace detail

// Max-min of the Phase-III RUE sum rate and MUE rate over [0, P_max]².
// The RUE rate rises with P_C3 and falls with P_B and the MUE rate does the
// opposite, so one power sits at P_max; both boundary families are solved.
inline PowerControlResult fairness_power_control(const RateModel& model, double P_max,
                                                 const BisectionSettings& settings = {}) {
    require(P_max > 0.0 && std::isfinite(P_max), "P_max must be positive");
    auto evaluate = [&](double pc, double pb) {
        PowerControlResult r;
        r.P_C3 = pc;
        r.P_B = pb;
        std::tie(r.R_C3, r.R_M3) = model.phase3_rates(pc, pb);
        return r;
    };

    // MUE unreachable: any P_B is optimal, keep the MBS silent.
    if (!(model.links().mbs_mue_power > 0.0)) return evaluate(P_max, 0.0);

    const double pb = detail::bisect_balance(
        [&](double x) {
            auto [rc, rm] = model.phase3_rates(P_max, x);
            return rc - rm;
        },
        P_max, false, settings);
    const double pc = detail::bisect_balance(
        [&](double x) {
            auto [rc, rm] = model.phase3_rates(x, P_max);
            return rc - rm;
        },
        P_max, true, settings);

    const PowerControlResult a = evaluate(P_max, pb);
    const PowerControlResult b = evaluate(pc, P_max);
    const double va = a.min_rate();
    const double vb = b.min_rate();
    const double tie = 1e-12 * (1.0 + std::max(std::abs(va), std::abs(vb)));
    if (std::abs(va - vb) <= tie) return (a.P_C3 + a.P_B <= b.P_C3 + b.P_B) ? a : b;
    return va > vb ? a : b;
}

}  // namespace hcran
