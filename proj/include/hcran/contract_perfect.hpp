#pragma once

#include "hcran/line_search.hpp"
#include "hcran/power_control.hpp"
#include "hcran/rates.hpp"

namespace hcran {

enum class Rejection { None, NoGain, Infeasible };

inline const char* to_string(Rejection r) {
    switch (r) {
        case Rejection::None: return "none";
        case Rejection::NoGain: return "no_gain";
        case Rejection::Infeasible: return "infeasible";
    }
    return "unknown";
}

struct PerfectContract {
    double t1 = 0.0;
    double t3 = 0.0;
    double T0 = 1.0;
    double P_M1 = 0.0;
    double P_C1 = 0.0;
    bool accepted = false;

    double t2() const { return T0 - t1 - t3; }

    void validate() const {
        require(T0 > 0.0, "T0 must be positive");
        const double slack = 1e-12 * T0;
        require(t1 >= -slack && t3 >= -slack && t2() >= -slack, "contract durations must partition T0");
        require(P_M1 >= 0.0 && P_C1 >= 0.0, "Phase-I powers must be non-negative");
    }
};

struct UtilityPair {
    double U_C = 0.0;
    double U_M = 0.0;
};

inline double utility_bbu(const PerfectContract& c, const PhaseRates& r) {
#ifdef HCRAN_FAULT_FLIP_BBU_SIGN
    return c.t1 * r.R_C1 + (c.T0 - c.t1 - c.t3) * r.R_C2 + (c.T0 - c.t3) * r.R_C3;
#else
    return c.t1 * r.R_C1 + (c.T0 - c.t1 - c.t3) * r.R_C2 - (c.T0 - c.t3) * r.R_C3;
#endif
}

inline double utility_mbs(const PerfectContract& c, const PhaseRates& r) { return c.t1 * r.R_M1 + c.t3 * r.R_M3; }

// Single-value searches share the cubic-interpolation routine.
template <class F, class D>
LineSearchResult algorithm1_search(F&& objective, D&& derivative, double lo, double hi,
                                   const LineSearchSettings& settings = {}) {
    return cubic_interpolation_search(objective, derivative, lo, hi, settings);
}

struct PerfectDesign {
    PerfectContract contract;
    UtilityPair utility;
    PhaseRates rates;  // Phase-I entries at the designed powers
    PowerControlResult phase3;
    double P_C2 = 0.0;
    double reservation = 0.0;
    double search_lo = 0.0;
    double search_hi = 0.0;
    Rejection rejection = Rejection::None;
    LineSearchResult search;
};

// BBU utility with the IR-tight Phase-I duration and a tight power budget,
// seen as a function of the Phase-I MUE power.
class PerfectObjective {
public:
    PerfectObjective(const RateModel& model, double P_max, double T0, double R_C2, double R_C3, double R_M3)
        : model_(model), P_max_(P_max), T0_(T0), R_C2_(R_C2), R_C3_(R_C3), R_M3_(R_M3) {}

    PerfectContract contract_at(double P_M1) const {
        PerfectContract c;
        c.T0 = T0_;
        c.P_M1 = P_M1;
        c.P_C1 = std::max(0.0, model_.phase1_rue_power(P_M1, P_max_));
        const double R_M1 = model_.phase1_rates(c.P_C1, P_M1).second;
        c.t1 = R_M3_ > 0.0 ? std::min(T0_, T0_ * R_M3_ / R_M1) : 0.0;
        return c;
    }

    PhaseRates rates_at(const PerfectContract& c) const {
        PhaseRates r;
        std::tie(r.R_C1, r.R_M1) = model_.phase1_rates(c.P_C1, c.P_M1);
        r.R_C2 = R_C2_;
        r.R_C3 = R_C3_;
        r.R_M3 = R_M3_;
        return r;
    }

    double operator()(double P_M1) const {
        const PerfectContract c = contract_at(P_M1);
        return utility_bbu(c, rates_at(c));
    }

    double derivative(double P_M1) const {
        const double ln_b = model_.log().ln_base();
        const double s2 = model_.noise_var();
        const double P_C1 = std::max(0.0, model_.phase1_rue_power(P_M1, P_max_));
        const auto [R_C1, R_M1] = model_.phase1_rates(P_C1, P_M1);
        const double dRC1 = -model_.M() / (ln_b * (s2 + P_C1) * model_.mue_budget_gain() * model_.eps());
        const double dRM1 = 1.0 / (ln_b * (s2 + P_M1));
        return T0_ * R_M3_ * (dRC1 / R_M1 + (R_C2_ - R_C1) * dRM1 / (R_M1 * R_M1));
    }

private:
    const RateModel& model_;
    double P_max_, T0_, R_C2_, R_C3_, R_M3_;
};

inline PerfectDesign design_contract_perfect(const RateModel& model, double P_max, double T0,
                                             const LineSearchSettings& settings = {}) {
    require(model.mode().is_perfect(), "perfect-CSI contract needs a perfect-CSI rate model");
    require(T0 > 0.0 && P_max > 0.0, "T0 and P_max must be positive");

    PerfectDesign d;
    d.phase3 = fairness_power_control(model, P_max);
    d.P_C2 = model.phase2_power_cap(P_max);
    const double R_C2 = model.phase2_rate(d.P_C2);
    const double R_C3 = d.phase3.R_C3;
    const double R_M3 = d.phase3.R_M3;
    d.reservation = T0 * R_M3;
    const PerfectObjective objective(model, P_max, T0, R_C2, R_C3, R_M3);

    d.search_hi = model.phase1_mue_power_limit(P_max);
    if (R_M3 > 0.0) {
        // Smallest MUE power that keeps the IR-tight t1 within the TTI.
        double lo = model.noise_var() * model.log().expm1(R_M3);
        while (lo < d.search_hi && model.phase1_rates(0.0, lo).second < R_M3) lo = std::nextafter(lo, d.search_hi);
        d.search_lo = lo;
    }

    PerfectContract c;
    if (d.search_lo > d.search_hi) {
        d.rejection = Rejection::Infeasible;
    } else if (R_M3 > 0.0) {
        d.search = algorithm1_search(objective, [&](double p) { return objective.derivative(p); }, d.search_lo,
                                     d.search_hi, settings);
        c = objective.contract_at(d.search.x);
    } else {
        c = objective.contract_at(0.0);
    }

    if (d.rejection == Rejection::None) {
        d.rates = objective.rates_at(c);
        d.utility = {utility_bbu(c, d.rates), utility_mbs(c, d.rates)};
        const bool ir = d.utility.U_M >= d.reservation * (1.0 - 1e-12);
        if (!(d.utility.U_C > 0.0) || !ir) d.rejection = Rejection::NoGain;
    }

    if (d.rejection != Rejection::None) {
        // Fallback: the whole TTI runs as Phase III.
        c = PerfectContract{};
        c.T0 = T0;
        c.t3 = T0;
        d.rates = objective.rates_at(c);
        d.utility = {utility_bbu(c, d.rates), utility_mbs(c, d.rates)};
    }
    c.accepted = d.rejection == Rejection::None;
    d.contract = c;
    return d;
}

}  // namespace hcran
