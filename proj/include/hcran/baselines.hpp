#pragma once

#include "hcran/power_control.hpp"

namespace hcran {

// Rate·time totals over one TTI.
struct SchemeRates {
    double rue = 0.0;
    double mue = 0.0;
};

// Powers come from the controller's view; rates are evaluated on `realized`
// (the same model under perfect CSI).
inline SchemeRates frpc_rates(const RateModel& control_view, const RateModel& realized, double P_max, double T0) {
    const PowerControlResult pc = fairness_power_control(control_view, P_max);
    const auto [rc, rm] = realized.phase3_rates(pc.P_C3, pc.P_B);
    return {T0 * rc, T0 * rm};
}

inline SchemeRates frpc_rates(const RateModel& model, double P_max, double T0) {
    return frpc_rates(model, model, P_max, T0);
}

// Each tier alone for half the TTI: RRHs at the Phase-II cap, MBS at full power.
inline SchemeRates tdic_rates(const RateModel& model, double P_max, double T0) {
    const double half = 0.5 * T0;
    const double R_C2 = model.phase2_rate(model.phase2_power_cap(P_max));
    const double R_M = model.log().log1p(model.links().mbs_mue_power * P_max / model.noise_var());
    return {half * R_C2, half * R_M};
}

}  // namespace hcran
