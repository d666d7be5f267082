#pragma once

#include "hcran/contract_perfect.hpp"
#include "hcran/quadrature.hpp"

#include <functional>
#include <vector>

namespace hcran {

// Quantized values of |g_B|² and their probabilities.
struct AgentTypeSet {
    std::vector<double> xi;
    std::vector<double> q;

    int size() const { return static_cast<int>(xi.size()); }

    void validate() const {
        require(!xi.empty(), "type set must not be empty");
        require(xi.size() == q.size(), "xi and q must have equal length");
        double total = 0.0;
        for (std::size_t l = 0; l < xi.size(); ++l) {
            require(xi[l] > 0.0 && std::isfinite(xi[l]), "type values must be positive");
            if (l > 0) require(xi[l] > xi[l - 1], "type values must be strictly increasing");
            require(q[l] >= 0.0 && q[l] <= 1.0, "type probabilities must lie in [0,1]");
            total += q[l];
        }
        require(std::abs(total - 1.0) <= 1e-12, "type probabilities must sum to 1");
    }
};

// Midpoint quantiles of an exponential law with mean `scale`, equal weights.
inline AgentTypeSet quantize_gB(double scale, int L) {
    require(L >= 1, "need at least one agent type");
    require(scale > 0.0 && std::isfinite(scale), "gain scale must be positive");
    AgentTypeSet t;
    for (int l = 1; l <= L; ++l) {
        const double level = (2.0 * l - 1.0) / (2.0 * L);
        t.xi.push_back(-scale * std::log1p(-level));
        t.q.push_back(1.0 / L);
    }
    return t;
}

// Index of the equal-probability bin holding g_power.
inline int classify_gB(double g_power, double scale, int L) {
    require(L >= 1 && scale > 0.0, "invalid quantizer");
    int idx = 0;
    for (int l = 1; l < L; ++l)
        if (g_power >= -scale * std::log1p(-static_cast<double>(l) / L)) idx = l;
    return idx;
}

// Law of z = |f_Bm|² as known to the BBU pool.
class InterferenceDistribution {
public:
    enum class Family { Exponential, PointMass };

    static InterferenceDistribution exponential(double mean) {
        require(mean > 0.0 && std::isfinite(mean), "exponential mean must be positive");
        return {Family::Exponential, mean};
    }
    static InterferenceDistribution point_mass(double z0) {
        require(z0 >= 0.0 && std::isfinite(z0), "point mass location must be >= 0");
        return {Family::PointMass, z0};
    }

    Family family() const { return family_; }
    double parameter() const { return param_; }

    double density(double z) const {
        if (family_ != Family::Exponential) throw InvalidInput("point mass has no density");
        return z < 0.0 ? 0.0 : std::exp(-z / param_) / param_;
    }

    template <class F>
    double expect(F&& f) const {
        if (family_ == Family::PointMass) return f(param_);
        const double mean = param_;
        return laguerre64().integrate([&](double x) { return f(mean * x); });
    }

private:
    InterferenceDistribution(Family f, double p) : family_(f), param_(p) {}
    Family family_;
    double param_;
};

inline std::vector<InterferenceDistribution> exponential_interference(const LargeScaleFading& lsf) {
    std::vector<InterferenceDistribution> out;
    for (double g : lsf.mbs_rue_gains) out.push_back(InterferenceDistribution::exponential(g));
    return out;
}

inline double expected_phase3_rue_rate(const RateModel& model, double P_C3, double P_B,
                                       const std::vector<InterferenceDistribution>& per_rue) {
    if (static_cast<int>(per_rue.size()) != model.M()) throw DimensionError("need one interference law per RUE");
    double sum = 0.0;
    for (const auto& dist : per_rue) {
        const double v = dist.expect([&](double z) { return model.phase3_rue_term(P_C3, P_B, z); });
        if (!std::isfinite(v)) throw NumericalError("interference expectation is not finite");
        sum += v;
    }
    return sum;
}

// Phase-I duration for type l (0-based) once IC binds downward and type L's IR binds.
inline double tilde_t1(int l, const std::vector<double>& t3, double R_M1, const std::vector<double>& mue_rates,
                       double u_L) {
    if (t3.size() != mue_rates.size() || l < 0 || l >= static_cast<int>(t3.size()))
        throw DimensionError("type index or list sizes inconsistent");
    if (!(R_M1 > 0.0)) throw InvalidInput("Phase-I MUE rate is zero, type is infeasible");
    double acc = u_L - t3[0] * mue_rates[0];
    for (int i = 1; i <= l; ++i) acc += mue_rates[i] * (t3[i - 1] - t3[i]);
    return acc / R_M1;
}

struct ContractItem {
    double t1 = 0.0;
    double t3 = 0.0;
};

struct PartialContract {
    std::vector<ContractItem> items;
    double P_M1 = 0.0;
    double P_C1 = 0.0;
    double T0 = 1.0;
    bool accepted = false;

    int size() const { return static_cast<int>(items.size()); }

    void validate() const {
        const double slack = 1e-12 * T0;
        for (std::size_t l = 0; l < items.size(); ++l) {
            const auto& it = items[l];
            require(it.t1 >= -slack && it.t3 >= -slack && T0 - it.t1 - it.t3 >= -slack, "item durations invalid");
            if (l > 0) require(it.t3 >= items[l - 1].t3 - slack, "Phase-III durations must be non-decreasing");
        }
    }
};

// Rates the menu design depends on at one Phase-I power pair.
struct MenuRates {
    double R_C1 = 0.0;
    double R_M1 = 0.0;
    double R_C2 = 0.0;
    double R_C3 = 0.0;             // expected over the interference law
    std::vector<double> mue_rates;  // Phase-III MUE rate per type
};

struct MenuSolution {
    std::vector<double> t1;
    std::vector<double> t3;
    double objective = 0.0;
    bool feasible = false;
};

inline double menu_objective(const std::vector<double>& t1, const std::vector<double>& t3, const MenuRates& r,
                             const AgentTypeSet& types, double T0) {
    const double gap = r.R_C2 - r.R_C3;
    double sum_t1 = 0.0, sum_t3 = 0.0;
    for (int l = 0; l < types.size(); ++l) {
        sum_t1 += types.q[l] * t1[l];
        sum_t3 += types.q[l] * t3[l];
    }
    return (r.R_C1 - r.R_C2) * sum_t1 - gap * sum_t3 + T0 * gap;
}

namespace detail {

inline MenuSolution finish_menu(std::vector<double> t3, const MenuRates& r, const AgentTypeSet& types, double T0) {
    MenuSolution s;
    const int L = types.size();
    const double u_L = T0 * r.mue_rates[L - 1];
    s.t3 = std::move(t3);
    s.t1.resize(L);
    for (int l = 0; l < L; ++l) {
        const double t1 = r.R_M1 > 0.0 ? tilde_t1(l, s.t3, r.R_M1, r.mue_rates, u_L) : 0.0;
        s.t1[l] = std::clamp(t1, 0.0, T0 - s.t3[l]);
    }
    s.objective = menu_objective(s.t1, s.t3, r, types, T0);
    s.feasible = true;
    return s;
}

inline bool menu_feasible(const MenuRates& r, int L) {
    const double top = r.mue_rates[L - 1];
    return r.R_M1 >= top && (r.R_M1 > 0.0 || top == 0.0);
}

}  // namespace detail

// After substituting the Phase-I durations the objective is linear in the
// increments of t3 and every duration limit reduces to one knapsack row whose
// weights dominate the last one, so a single-step profile is optimal.
inline MenuSolution solve_menu(const MenuRates& r, const AgentTypeSet& types, double T0) {
    const int L = types.size();
    if (static_cast<int>(r.mue_rates.size()) != L) throw DimensionError("need one MUE rate per type");
    if (!detail::menu_feasible(r, L)) return {};
    const double A = r.R_M1;
    const double top = r.mue_rates[L - 1];
    const double budget = T0 * (A - top);
    const double gap = r.R_C2 - r.R_C3;

    int step = -1;
    double height = 0.0;
    double gain = 0.0;
    double tail = 1.0;
    for (int j = 0; j < L; ++j) {
        const double slope = A > 0.0 ? (r.R_C2 - r.R_C1) * r.mue_rates[j] / A : 0.0;
        const double coeff = tail * (slope - gap);
        const double weight = A - r.mue_rates[j];
        const double x = weight > 0.0 ? std::min(T0, budget / weight) : T0;
        if (coeff * x > gain) {
            gain = coeff * x;
            step = j;
            height = x;
        }
        tail -= types.q[j];
    }
    std::vector<double> t3(L, 0.0);
    if (step >= 0)
        for (int l = step; l < L; ++l) t3[l] = height;
    return detail::finish_menu(std::move(t3), r, types, T0);
}

// Large-K rule: only the strongest type may get Phase III, all or nothing.
inline std::vector<double> large_k_durations(const MenuRates& r, int L, double T0) {
    if (static_cast<int>(r.mue_rates.size()) != L) throw DimensionError("need one MUE rate per type");
    std::vector<double> t3(L, 0.0);
    const double lhs = r.R_M1 * (r.R_C2 - r.R_C3);
    const double rhs = r.mue_rates[L - 1] * (r.R_C2 - r.R_C1);
    if (lhs < rhs) t3[L - 1] = T0;
    return t3;
}

inline MenuSolution solve_menu_large_k(const MenuRates& r, const AgentTypeSet& types, double T0) {
    const int L = types.size();
    if (!detail::menu_feasible(r, L)) return {};
    return detail::finish_menu(large_k_durations(r, L, T0), r, types, T0);
}

inline double agent_utility(const ContractItem& item, double R_M1, double mue_rate) {
    return item.t1 * R_M1 + item.t3 * mue_rate;
}

// Worst violation over all ordered pairs (positive means some type prefers another item).
inline double ic_violation(const PartialContract& c, double R_M1, const std::vector<double>& mue_rates) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int l = 0; l < c.size(); ++l) {
        const double own = agent_utility(c.items[l], R_M1, mue_rates[l]);
        for (int k = 0; k < c.size(); ++k)
            if (k != l) worst = std::max(worst, agent_utility(c.items[k], R_M1, mue_rates[l]) - own);
    }
    return worst;
}

inline double ir_violation(const PartialContract& c, double R_M1, const std::vector<double>& mue_rates) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int l = 0; l < c.size(); ++l)
        worst = std::max(worst, c.T0 * mue_rates[l] - agent_utility(c.items[l], R_M1, mue_rates[l]));
    return worst;
}

// The item a type picks; ties go to its own item.
inline int agent_best_response(const PartialContract& c, int true_type, double R_M1,
                               const std::vector<double>& mue_rates) {
    if (true_type < 0 || true_type >= c.size() || static_cast<int>(mue_rates.size()) != c.size())
        throw DimensionError("type index out of range");
    const double rate = mue_rates[true_type];
    int best = true_type;
    double best_u = agent_utility(c.items[true_type], R_M1, rate);
    for (int k = 0; k < c.size(); ++k) {
        const double u = agent_utility(c.items[k], R_M1, rate);
        if (u > best_u + 1e-12 * (1.0 + std::abs(best_u))) {
            best = k;
            best_u = u;
        }
    }
    return best;
}

template <class F>
LineSearchResult algorithm2_search(F&& objective, double lo, double hi, const LineSearchSettings& settings = {}) {
    const double step = 1e-6 * (hi - lo);
    auto deriv = [&](double x) { return finite_difference(objective, x, step, lo, hi); };
    return cubic_interpolation_search(objective, deriv, lo, hi, settings);
}

struct PartialDesign {
    PartialContract contract;
    MenuRates rates;
    double objective = 0.0;
    PowerControlResult phase3;
    double P_C2 = 0.0;
    double search_lo = 0.0;
    double search_hi = 0.0;
    Rejection rejection = Rejection::None;
    LineSearchResult search;

    std::vector<double> reservations() const {
        std::vector<double> u;
        for (double r : rates.mue_rates) u.push_back(contract.T0 * r);
        return u;
    }
};

using MenuSolver = std::function<MenuSolution(const MenuRates&, const AgentTypeSet&, double)>;

namespace detail {

inline PartialDesign design_menu(const RateModel& view, const AgentTypeSet& types,
                                 const std::vector<InterferenceDistribution>& dists, double P_max, double T0,
                                 const MenuSolver& inner, const LineSearchSettings& settings) {
    types.validate();
    require(T0 > 0.0 && P_max > 0.0, "T0 and P_max must be positive");
    const int L = types.size();

    PartialDesign d;
    d.phase3 = fairness_power_control(view, P_max);
    d.P_C2 = view.phase2_power_cap(P_max);
    MenuRates base;
    base.R_C2 = view.phase2_rate(d.P_C2);
    base.R_C3 = expected_phase3_rue_rate(view, d.phase3.P_C3, d.phase3.P_B, dists);
    for (double xi : types.xi) base.mue_rates.push_back(view.phase3_mue_rate(d.phase3.P_C3, d.phase3.P_B, xi));
    const double top = base.mue_rates.back();

    auto rates_at = [&](double P_M1) {
        MenuRates r = base;
        const double P_C1 = std::max(0.0, view.phase1_rue_power(P_M1, P_max));
        std::tie(r.R_C1, r.R_M1) = view.phase1_rates(P_C1, P_M1);
        return r;
    };
    auto mue_rate_at = [&](double P_M1) { return rates_at(P_M1).R_M1; };

    d.search_hi = view.phase1_mue_power_limit(P_max);
    if (mue_rate_at(d.search_hi) < top) {
        d.rejection = Rejection::Infeasible;
    } else if (top > 0.0) {
        double lo = 0.0, hi = d.search_hi;
        for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (mue_rate_at(mid) >= top ? hi : lo) = mid;
        }
        d.search_lo = hi;
    }

    MenuSolution best;
    if (d.rejection == Rejection::None) {
        auto objective = [&](double P_M1) {
            const MenuSolution s = inner(rates_at(P_M1), types, T0);
            return s.feasible ? s.objective : -std::numeric_limits<double>::infinity();
        };
        d.search = algorithm2_search(objective, d.search_lo, d.search_hi, settings);
        d.rates = rates_at(d.search.x);
        best = inner(d.rates, types, T0);
        if (!best.feasible) d.rejection = Rejection::Infeasible;
    }

    PartialContract c;
    c.T0 = T0;
    if (d.rejection == Rejection::None) {
        c.P_M1 = d.search.x;
        c.P_C1 = std::max(0.0, view.phase1_rue_power(c.P_M1, P_max));
        for (int l = 0; l < L; ++l) c.items.push_back({best.t1[l], best.t3[l]});
        d.objective = best.objective;
        const double tol = 1e-9 * (1.0 + T0 * d.rates.R_M1);
        const bool incentive_ok = ic_violation(c, d.rates.R_M1, d.rates.mue_rates) <= tol;
        const bool rational_ok = ir_violation(c, d.rates.R_M1, d.rates.mue_rates) <= tol;
        if (!(d.objective > 0.0) || !incentive_ok || !rational_ok) d.rejection = Rejection::NoGain;
    }
    if (d.rejection != Rejection::None) {
        c.items.assign(L, ContractItem{0.0, T0});
        c.P_M1 = c.P_C1 = 0.0;
        d.rates = base;
        d.objective = 0.0;
    }
    c.accepted = d.rejection == Rejection::None;
    d.contract = c;
    return d;
}

}  // namespace detail

// Menu design under estimated CSI: outer search over the Phase-I MUE power,
// exact inner solve over the Phase-III durations.
inline PartialDesign design_contract_partial(const RateModel& view, const AgentTypeSet& types,
                                             const std::vector<InterferenceDistribution>& dists, double P_max,
                                             double T0, const LineSearchSettings& settings = {}) {
    return detail::design_menu(view, types, dists, P_max, T0, solve_menu, settings);
}

inline PartialDesign large_k_contract(const RateModel& view, const AgentTypeSet& types,
                                      const std::vector<InterferenceDistribution>& dists, double P_max, double T0,
                                      const LineSearchSettings& settings = {}) {
    require(view.mode().kind == CsiMode::Kind::LargeK, "large-K contract needs a large-K rate model");
    return detail::design_menu(view, types, dists, P_max, T0, solve_menu_large_k, settings);
}

}  // namespace hcran
