#pragma once

#include "hcran/baselines.hpp"
#include "hcran/channel_model.hpp"
#include "hcran/contract_partial.hpp"
#include "hcran/contract_perfect.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace hcran {

enum class Scheme { CICF = 0, FRPC = 1, TDIC = 2 };
inline constexpr std::array<Scheme, 3> kAllSchemes{Scheme::CICF, Scheme::FRPC, Scheme::TDIC};

inline const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::CICF: return "CICF";
        case Scheme::FRPC: return "FRPC";
        case Scheme::TDIC: return "TDIC";
    }
    return "?";
}

inline Scheme parse_scheme(const std::string& name) {
    for (Scheme s : kAllSchemes)
        if (name == to_string(s)) return s;
    throw InvalidInput("unknown scheme '" + name + "' (expected CICF, FRPC or TDIC)");
}

enum class CsiKind { Perfect, Estimated };

inline const char* to_string(CsiKind c) { return c == CsiKind::Perfect ? "perfect" : "estimated"; }

inline CsiKind parse_csi(const std::string& name) {
    if (name == "perfect") return CsiKind::Perfect;
    if (name == "estimated") return CsiKind::Estimated;
    throw InvalidInput("unknown CSI mode '" + name + "' (expected perfect or estimated)");
}

// Uniform distance ranges in meters.
struct Placement {
    double rue_min = 150.0, rue_max = 450.0;
    double mue_min = 30.0, mue_max = 90.0;
    double mbs_rue_min = 500.0, mbs_rue_max = 1500.0;

    void validate() const {
        auto ok = [](double lo, double hi) { return lo > 0.0 && hi >= lo && std::isfinite(hi); };
        require(ok(rue_min, rue_max) && ok(mue_min, mue_max) && ok(mbs_rue_min, mbs_rue_max),
                "placement ranges must be positive with min <= max");
    }
};

struct SimulationConfig {
    int K = 32;
    int M = 4;
    int N = 10;
    int L = 4;
    double P_max = 1.0;
    double T0 = 1.0;
    double Ps = 1.0;
    double Pb = 1.0;
    std::vector<double> snr_db{0.0, 10.0, 20.0, 30.0};
    int runs = 1000;
    std::uint64_t seed = 1;
    CsiKind csi = CsiKind::Perfect;
    std::map<Scheme, CsiKind> csi_overrides;
    std::vector<Scheme> schemes{Scheme::CICF, Scheme::FRPC, Scheme::TDIC};
    Placement placement;
    PathLossModel pathloss;
    double mbs_mue_gain = 3e4;
    double log_base = 2.0;

    CsiKind csi_for(Scheme s) const {
        auto it = csi_overrides.find(s);
        return it == csi_overrides.end() ? csi : it->second;
    }
    bool enabled(Scheme s) const { return std::find(schemes.begin(), schemes.end(), s) != schemes.end(); }
    bool needs_estimation() const {
        return std::any_of(schemes.begin(), schemes.end(), [&](Scheme s) { return csi_for(s) == CsiKind::Estimated; });
    }
    double noise_var(std::size_t snr_index) const { return P_max / std::pow(10.0, snr_db.at(snr_index) / 10.0); }

    void validate() const {
        if (M < 1 || K <= M + 1) throw DimensionError("need M >= 1 and K > M+1");
        require(N > M, "training length N must exceed M");
        require(L >= 1, "need at least one agent type");
        require(P_max > 0.0 && T0 > 0.0 && Ps > 0.0 && Pb > 0.0, "powers and T0 must be positive");
        require(runs >= 1, "runs must be >= 1");
        require(!snr_db.empty(), "SNR grid must not be empty");
        for (double s : snr_db) require(std::isfinite(s), "SNR values must be finite");
        require(!schemes.empty(), "at least one scheme must be enabled");
        require(mbs_mue_gain > 0.0 && std::isfinite(mbs_mue_gain), "mbs_mue_gain must be positive");
        require(pathloss.exponent > 0.0 && pathloss.ref_distance > 0.0 && pathloss.shadow_std_db >= 0.0,
                "invalid path-loss model");
        LogBase{log_base};
        placement.validate();
    }
};

struct SchemeOutcome {
    bool present = false;
    double rue = 0.0;
    double mue = 0.0;
};

struct ContractDiagnostics {
    bool present = false;
    bool accepted = false;
    std::string csi;
    double t1 = 0.0, t2 = 0.0, t3 = 0.0;
    double P_M1 = 0.0, P_C1 = 0.0;
    double objective = 0.0;
    int agent_type = -1;   // chosen item under estimated CSI
    std::string rejection = "none";
};

struct RunRecord {
    int snr_index = 0;
    int run = 0;
    int attempts = 0;
    bool failed = false;
    std::string error;
    std::array<SchemeOutcome, 3> schemes{};
    ContractDiagnostics contract;

    const SchemeOutcome& at(Scheme s) const { return schemes[static_cast<int>(s)]; }
    SchemeOutcome& at(Scheme s) { return schemes[static_cast<int>(s)]; }
};

// One TTI's inputs; shared by the simulator and the inspect command.
struct DrawContext {
    LargeScaleFading lsf;
    ChannelRealization channel;
    std::optional<EstimatedChannels> estimate;
    double noise_var = 0.0;
};

inline DrawContext draw_tti(const SimulationConfig& cfg, double noise_var, RandomStream& rng) {
    const Placement& p = cfg.placement;
    std::vector<double> rrh(cfg.M + 1), mbs(cfg.M);
    for (int m = 0; m < cfg.M; ++m) rrh[m] = rng.uniform(p.rue_min, p.rue_max);
    rrh[cfg.M] = rng.uniform(p.mue_min, p.mue_max);
    for (int m = 0; m < cfg.M; ++m) mbs[m] = rng.uniform(p.mbs_rue_min, p.mbs_rue_max);
    DrawContext d;
    d.noise_var = noise_var;
    d.lsf = gen_large_scale(rrh, mbs, cfg.mbs_mue_gain, cfg.pathloss, rng);
    d.channel = sample_channel(d.lsf, cfg.K, rng);
    if (cfg.needs_estimation()) {
        const TrainingConfig train = build_training(cfg.N, cfg.M, cfg.Ps, cfg.Pb);
        d.estimate = lse_estimate(d.channel, train, noise_var, rng);
    }
    return d;
}

// Rate models for one draw: what the designer sees and what the links deliver.
struct DrawModels {
    RateModel view;
    RateModel realized;
};

inline DrawModels models_for(const DrawContext& d, CsiKind csi, const LogBase& log) {
    if (csi == CsiKind::Perfect) {
        RateModel m = RateModel::perfect(d.channel, d.lsf, d.noise_var, log);
        return {m, m};
    }
    if (!d.estimate) throw InvalidInput("estimated CSI requested but no training was run");
    RateModel view = RateModel::estimated(*d.estimate, d.lsf, d.noise_var, log);
    RateModel realized = view.observing(d.channel.f_B, d.channel.g_B, d.channel.f_M);
    return {std::move(view), std::move(realized)};
}

inline void run_cicf(const SimulationConfig& cfg, const DrawContext& d, const LogBase& log, RunRecord& rec) {
    const CsiKind csi = cfg.csi_for(Scheme::CICF);
    const DrawModels models = models_for(d, csi, log);
    ContractDiagnostics& diag = rec.contract;
    diag.present = true;
    diag.csi = to_string(csi);
    SchemeOutcome& out = rec.at(Scheme::CICF);
    out.present = true;

    if (csi == CsiKind::Perfect) {
        const PerfectDesign design = design_contract_perfect(models.view, cfg.P_max, cfg.T0);
        const PerfectContract& c = design.contract;
        const PhaseRates& r = design.rates;
        out.rue = c.t1 * r.R_C1 + c.t2() * r.R_C2 + c.t3 * r.R_C3;
        out.mue = c.t1 * r.R_M1 + c.t3 * r.R_M3;
        diag.accepted = c.accepted;
        diag.t1 = c.t1;
        diag.t2 = c.t2();
        diag.t3 = c.t3;
        diag.P_M1 = c.P_M1;
        diag.P_C1 = c.P_C1;
        diag.objective = design.utility.U_C;
        diag.rejection = to_string(design.rejection);
        return;
    }

    const AgentTypeSet types = quantize_gB(cfg.mbs_mue_gain, cfg.L);
    const PartialDesign design = design_contract_partial(models.view, types, exponential_interference(d.lsf),
                                                         cfg.P_max, cfg.T0);
    const PartialContract& c = design.contract;
    const int own_type = classify_gB(std::norm(d.estimate->g_B_hat), cfg.mbs_mue_gain, cfg.L);
    const int pick = agent_best_response(c, own_type, design.rates.R_M1, design.rates.mue_rates);
    const ContractItem& item = c.items[pick];
    const auto [rc3, rm3] = models.realized.phase3_rates(design.phase3.P_C3, design.phase3.P_B);
    const double t2 = cfg.T0 - item.t1 - item.t3;
    out.rue = item.t1 * design.rates.R_C1 + t2 * design.rates.R_C2 + item.t3 * rc3;
    out.mue = item.t1 * design.rates.R_M1 + item.t3 * rm3;
    diag.accepted = c.accepted;
    diag.t1 = item.t1;
    diag.t2 = t2;
    diag.t3 = item.t3;
    diag.P_M1 = c.P_M1;
    diag.P_C1 = c.P_C1;
    diag.objective = design.objective;
    diag.agent_type = pick;
    diag.rejection = to_string(design.rejection);
}

inline void run_schemes(const SimulationConfig& cfg, const DrawContext& d, RunRecord& rec) {
    const LogBase log(cfg.log_base);
    if (cfg.enabled(Scheme::CICF)) run_cicf(cfg, d, log, rec);
    if (cfg.enabled(Scheme::FRPC)) {
        const DrawModels m = models_for(d, cfg.csi_for(Scheme::FRPC), log);
        const SchemeRates r = frpc_rates(m.view, m.realized, cfg.P_max, cfg.T0);
        rec.at(Scheme::FRPC) = {true, r.rue, r.mue};
    }
    if (cfg.enabled(Scheme::TDIC)) {
        const DrawModels m = models_for(d, cfg.csi_for(Scheme::TDIC), log);
        const SchemeRates r = tdic_rates(m.realized, cfg.P_max, cfg.T0);
        rec.at(Scheme::TDIC) = {true, r.rue, r.mue};
    }
}

inline RandomStream stream_for(const SimulationConfig& cfg, int snr_index, int run, int attempt) {
    return RandomStream(cfg.seed, {static_cast<std::uint64_t>(snr_index), static_cast<std::uint64_t>(run),
                                   static_cast<std::uint64_t>(attempt)});
}

// One TTI. A numerically degenerate draw is redrawn once, then counted as failed.
inline RunRecord run_tti(const SimulationConfig& cfg, int snr_index, int run) {
    RunRecord rec;
    rec.snr_index = snr_index;
    rec.run = run;
    const double noise = cfg.noise_var(static_cast<std::size_t>(snr_index));
    for (int attempt = 0; attempt < 2; ++attempt) {
        rec.attempts = attempt + 1;
        try {
            RandomStream rng = stream_for(cfg, snr_index, run, attempt);
            const DrawContext d = draw_tti(cfg, noise, rng);
            RunRecord fresh = rec;
            run_schemes(cfg, d, fresh);
            return fresh;
        } catch (const NumericalError& e) {
            rec.error = e.what();
        }
    }
    rec.failed = true;
    return rec;
}

struct MeanStat {
    std::size_t n = 0;
    double mean = 0.0;
    double se = 0.0;
};

// Pairwise summation in index order, so results never depend on scheduling.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline MeanStat mean_stat(const std::vector<double>& v) {
    MeanStat s;
    s.n = v.size();
    if (v.empty()) return s;
    s.mean = pairwise_sum(v) / static_cast<double>(v.size());
    if (v.size() > 1) {
        std::vector<double> sq(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - s.mean) * (v[i] - s.mean);
        const double var = pairwise_sum(sq) / static_cast<double>(v.size() - 1);
        s.se = std::sqrt(var / static_cast<double>(v.size()));
    }
    return s;
}

struct SchemeStats {
    Scheme scheme = Scheme::CICF;
    MeanStat rue;
    MeanStat mue;
};

// Per-draw difference between two schemes (common random numbers make it the right statistic).
struct PairedDifference {
    Scheme a = Scheme::CICF;
    Scheme b = Scheme::FRPC;
    std::string metric;
    MeanStat diff;
};

struct SnrStats {
    double snr_db = 0.0;
    std::size_t runs = 0;
    std::size_t failures = 0;
    std::size_t accepted = 0;
    std::vector<SchemeStats> schemes;
    std::vector<PairedDifference> differences;
    std::vector<double> cdf_t1;  // P(t1/T0 <= x) at x = 0, 0.01, ..., 1 over accepted draws
    std::vector<double> cdf_t2;
};

struct AggregateStats {
    std::vector<SnrStats> per_snr;
};

inline constexpr int kCdfPoints = 101;

inline std::vector<double> empirical_cdf(std::vector<double> fractions) {
    std::sort(fractions.begin(), fractions.end());
    std::vector<double> cdf(kCdfPoints, 0.0);
    if (fractions.empty()) return cdf;
    for (int i = 0; i < kCdfPoints; ++i) {
        const double x = static_cast<double>(i) / (kCdfPoints - 1);
        const auto count = std::upper_bound(fractions.begin(), fractions.end(), x + 1e-12) - fractions.begin();
        cdf[i] = static_cast<double>(count) / static_cast<double>(fractions.size());
    }
    return cdf;
}

inline AggregateStats aggregate(const SimulationConfig& cfg, const std::vector<RunRecord>& records) {
    AggregateStats agg;
    for (std::size_t si = 0; si < cfg.snr_db.size(); ++si) {
        SnrStats s;
        s.snr_db = cfg.snr_db[si];
        std::array<std::vector<double>, 3> rue, mue;
        std::vector<double> t1, t2;
        std::vector<const RunRecord*> ok;
        for (const auto& r : records) {
            if (r.snr_index != static_cast<int>(si)) continue;
            ++s.runs;
            if (r.failed) {
                ++s.failures;
                continue;
            }
            ok.push_back(&r);
            for (Scheme sc : cfg.schemes) {
                rue[static_cast<int>(sc)].push_back(r.at(sc).rue);
                mue[static_cast<int>(sc)].push_back(r.at(sc).mue);
            }
            if (r.contract.present && r.contract.accepted) {
                ++s.accepted;
                t1.push_back(r.contract.t1 / cfg.T0);
                t2.push_back(r.contract.t2 / cfg.T0);
            }
        }
        for (Scheme sc : cfg.schemes)
            s.schemes.push_back({sc, mean_stat(rue[static_cast<int>(sc)]), mean_stat(mue[static_cast<int>(sc)])});
        auto add_diff = [&](Scheme a, Scheme b, const char* metric, bool on_rue) {
            if (!cfg.enabled(a) || !cfg.enabled(b)) return;
            std::vector<double> d;
            for (const RunRecord* r : ok)
                d.push_back(on_rue ? r->at(a).rue - r->at(b).rue : r->at(a).mue - r->at(b).mue);
            s.differences.push_back({a, b, metric, mean_stat(d)});
        };
        add_diff(Scheme::CICF, Scheme::FRPC, "rue", true);
        add_diff(Scheme::FRPC, Scheme::TDIC, "rue", true);
        add_diff(Scheme::CICF, Scheme::TDIC, "rue", true);
        add_diff(Scheme::CICF, Scheme::FRPC, "mue", false);
        s.cdf_t1 = empirical_cdf(std::move(t1));
        s.cdf_t2 = empirical_cdf(std::move(t2));
        agg.per_snr.push_back(std::move(s));
    }
    return agg;
}

struct SweepResult {
    AggregateStats aggregate;
    std::vector<RunRecord> records;  // ordered by (snr index, run)
};

// Every (snr, run) pair is an independent task; workers pull indices from a
// shared counter and write into preallocated slots.
inline SweepResult run_sweep(const SimulationConfig& cfg, int workers = 1) {
    cfg.validate();
    const std::size_t per_snr = static_cast<std::size_t>(cfg.runs);
    const std::size_t total = per_snr * cfg.snr_db.size();
    SweepResult out;
    out.records.resize(total);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
            const int si = static_cast<int>(i / per_snr);
            const int run = static_cast<int>(i % per_snr);
            try {
                out.records[i] = run_tti(cfg, si, run);
            } catch (const std::exception& e) {
                RunRecord r;
                r.snr_index = si;
                r.run = run;
                r.failed = true;
                r.error = e.what();
                out.records[i] = std::move(r);
            }
        }
    };
    const int n = std::max(1, workers);
    if (n == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < n; ++w) pool.emplace_back(work);
    }
    out.aggregate = aggregate(cfg, out.records);
    return out;
}

}  // namespace hcran
