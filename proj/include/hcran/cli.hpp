#pragma once

#include "hcran/io.hpp"
#include "hcran/validation.hpp"

#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>

namespace hcran::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kValidationFailed = 2, kRuntime = 3 };

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::vector<double> snr_db;
    std::optional<std::string> csi;
    std::vector<std::string> schemes;
};

inline SimulationConfig effective_config(const std::string& config_path, const Overrides& o) {
    json j = config_path.empty() ? json::object() : read_json_file(config_path);
    if (!j.is_object()) throw ConfigError("config root must be an object: " + config_path);
    if (o.seed) j["seed"] = *o.seed;
    if (o.runs) j["runs"] = *o.runs;
    if (!o.snr_db.empty()) j["snr_db"] = o.snr_db;
    if (o.csi) j["csi"] = *o.csi;
    if (!o.schemes.empty()) j["schemes"] = o.schemes;
    return config_from_json(j);
}

inline void print_summary(const SimulationConfig& cfg, const AggregateStats& agg, std::ostream& out) {
    out << "csi=" << to_string(cfg.csi) << " runs=" << cfg.runs << " seed=" << cfg.seed << "\n";
    out << std::left << std::setw(8) << "snr_db" << std::setw(7) << "scheme" << std::setw(22) << "rue_sum_rate"
        << std::setw(22) << "mue_rate" << "accepted\n";
    for (const auto& s : agg.per_snr)
        for (const auto& sc : s.schemes) {
            std::ostringstream rue, mue;
            rue << std::fixed << std::setprecision(4) << sc.rue.mean << " +- " << sc.rue.se;
            mue << std::fixed << std::setprecision(4) << sc.mue.mean << " +- " << sc.mue.se;
            out << std::setw(8) << s.snr_db << std::setw(7) << to_string(sc.scheme) << std::setw(22) << rue.str()
                << std::setw(22) << mue.str() << (sc.scheme == Scheme::CICF ? std::to_string(s.accepted) : "") << "\n";
        }
}

struct SimulateOptions {
    std::string config_path;
    Overrides overrides;
    std::string out_dir = "out";
    int workers = 1;
    bool write_records = false;
};

inline int cmd_simulate(const SimulateOptions& opt, std::ostream& out) {
    const SimulationConfig cfg = effective_config(opt.config_path, opt.overrides);
    require(opt.workers >= 1, "--workers must be >= 1");
    const SweepResult res = run_sweep(cfg, opt.workers);
    namespace fs = std::filesystem;
    fs::create_directories(opt.out_dir);
    const fs::path dir(opt.out_dir);
    write_text((dir / "config.json").string(), to_json(cfg).dump(2) + "\n");
    write_text((dir / "aggregate.json").string(), to_json(res.aggregate).dump(2) + "\n");
    if (opt.write_records) {
        std::string text = records_header(cfg).dump() + "\n";
        for (const auto& r : res.records) text += to_json(r, cfg).dump() + "\n";
        write_text((dir / "runs.ndjson").string(), text);
    }
    print_summary(cfg, res.aggregate, out);
    out << "wrote " << (dir / "aggregate.json").string() << "\n";
    return kOk;
}

struct InspectOptions {
    std::string config_path;
    Overrides overrides;  // seed, csi, one SNR value
    int run = 0;
};

inline int cmd_inspect(const InspectOptions& opt, std::ostream& out) {
    Overrides o = opt.overrides;
    if (o.snr_db.size() > 1) throw ConfigError("inspect takes a single --snr value");
    SimulationConfig cfg = effective_config(opt.config_path, o);
    const double snr = o.snr_db.empty() ? cfg.snr_db.front() : o.snr_db.front();
    cfg.snr_db = {snr};
    cfg.schemes = {Scheme::CICF, Scheme::FRPC, Scheme::TDIC};
    cfg.csi_overrides.clear();
    RandomStream rng = stream_for(cfg, 0, opt.run, 0);
    const DrawContext d = draw_tti(cfg, cfg.noise_var(0), rng);
    const LogBase log(cfg.log_base);
    const DrawModels models = models_for(d, cfg.csi, log);

    out << std::setprecision(6);
    out << "draw: seed=" << cfg.seed << " run=" << opt.run << " snr_db=" << snr << " csi=" << to_string(cfg.csi)
        << " K=" << cfg.K << " M=" << cfg.M << "\n";
    out << "large-scale gains (RUEs):";
    for (int m = 0; m < cfg.M; ++m) out << " " << d.lsf.rue_gain(m);
    out << "\nlarge-scale gain (RRH->MUE): " << d.lsf.mue_gain() << "\n";
    out << "|g_B|^2: " << std::norm(d.channel.g_B);
    if (d.estimate) out << "  estimate " << std::norm(d.estimate->g_B_hat) << "  delta1=" << d.estimate->delta1
                        << " delta2=" << d.estimate->delta2;
    out << "\n";

    const SchemeRates frpc = frpc_rates(models.view, models.realized, cfg.P_max, cfg.T0);
    const SchemeRates tdic = tdic_rates(models.realized, cfg.P_max, cfg.T0);

    if (cfg.csi == CsiKind::Perfect) {
        const PerfectDesign des = design_contract_perfect(models.view, cfg.P_max, cfg.T0);
        const auto& c = des.contract;
        out << "phase III powers: P_C3=" << des.phase3.P_C3 << " P_B=" << des.phase3.P_B << "  R_C3=" << des.phase3.R_C3
            << " R_M3=" << des.phase3.R_M3 << "\n";
        out << "contract: " << (c.accepted ? "accepted" : "rejected (" + std::string(to_string(des.rejection)) + ")")
            << "\n";
        out << "  t1=" << c.t1 << " t2=" << c.t2() << " t3=" << c.t3 << " P_M1=" << c.P_M1 << " P_C1=" << c.P_C1 << "\n";
        if (!c.accepted) out << "  fallback: t3 = T0, whole TTI in Phase III\n";
        out << "utilities: U_C=" << des.utility.U_C << " U_M=" << des.utility.U_M << " reservation=" << des.reservation
            << "\n";
        const double gap = des.utility.U_M - des.reservation;
        out << "IR: " << (std::abs(gap) <= 1e-9 * std::max(1.0, des.reservation) ? "tight" : (gap > 0 ? "slack" : "violated"))
            << "\n";
    } else {
        const AgentTypeSet types = quantize_gB(cfg.mbs_mue_gain, cfg.L);
        const PartialDesign des =
            design_contract_partial(models.view, types, exponential_interference(d.lsf), cfg.P_max, cfg.T0);
        const auto& c = des.contract;
        out << "phase III powers: P_C3=" << des.phase3.P_C3 << " P_B=" << des.phase3.P_B << "\n";
        out << "menu: " << (c.accepted ? "accepted" : "rejected (" + std::string(to_string(des.rejection)) + ")")
            << "  P_M1=" << c.P_M1 << " P_C1=" << c.P_C1 << " objective=" << des.objective << "\n";
        if (!c.accepted) out << "  fallback: t3 = T0 for every item\n";
        for (int l = 0; l < c.size(); ++l)
            out << "  item " << l + 1 << ": xi=" << types.xi[l] << " t1=" << c.items[l].t1 << " t3=" << c.items[l].t3
                << " utility=" << agent_utility(c.items[l], des.rates.R_M1, des.rates.mue_rates[l])
                << " reservation=" << cfg.T0 * des.rates.mue_rates[l] << "\n";
        bool ordered = true;
        for (int l = 1; l < c.size(); ++l) ordered = ordered && c.items[l].t3 >= c.items[l - 1].t3;
        const double tol = 1e-9 * (1.0 + cfg.T0 * des.rates.R_M1);
        out << "t3 non-decreasing: " << (ordered ? "yes" : "no") << "\n";
        out << "IC: " << (ic_violation(c, des.rates.R_M1, des.rates.mue_rates) <= tol ? "holds" : "violated") << "\n";
        out << "IR: " << (ir_violation(c, des.rates.R_M1, des.rates.mue_rates) <= tol ? "holds" : "violated") << "\n";
        out << "agent item (own type "
            << classify_gB(std::norm(d.estimate->g_B_hat), cfg.mbs_mue_gain, cfg.L) + 1 << "): "
            << agent_best_response(c, classify_gB(std::norm(d.estimate->g_B_hat), cfg.mbs_mue_gain, cfg.L),
                                   des.rates.R_M1, des.rates.mue_rates) + 1
            << "\n";
    }
    out << "FRPC: rue=" << frpc.rue << " mue=" << frpc.mue << "\n";
    out << "TDIC: rue=" << tdic.rue << " mue=" << tdic.mue << "\n";
    return kOk;
}

inline int cmd_validate(const std::string& level, std::ostream& out) {
    ValidationLevel lv;
    if (level == "quick") lv = ValidationLevel::Quick;
    else if (level == "full") lv = ValidationLevel::Full;
    else throw ConfigError("unknown validation level '" + level + "' (expected quick or full)");
    bool all = true;
    for (const auto& r : run_validation(lv)) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name;
        if (!r.detail.empty()) out << " : " << r.detail;
        out << "\n";
        all = all && r.passed;
    }
    return all ? kOk : kValidationFailed;
}

inline const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids{"fig3", "fig4", "fig5", "fig6", "fig7"};
    return ids;
}

struct ExportOptions {
    std::string aggregate_path;
    std::string figure;
    std::optional<double> snr_db;  // fig7 only
};

inline int cmd_export(const ExportOptions& opt, std::ostream& out, std::ostream& err) {
    const auto& ids = figure_ids();
    if (std::find(ids.begin(), ids.end(), opt.figure) == ids.end()) {
        err << "unknown figure id '" << opt.figure << "'; valid ids:";
        for (const auto& id : ids) err << " " << id;
        err << "\n";
        return kUsage;
    }
    const AggregateStats agg = aggregate_from_json(read_json_file(opt.aggregate_path));
    out << std::setprecision(10);
    if (opt.figure == "fig7") {
        const SnrStats* pick = nullptr;
        for (const auto& s : agg.per_snr)
            if (!opt.snr_db || s.snr_db == *opt.snr_db) pick = &s;
        if (!pick) throw ConfigError("aggregate has no entry for the requested SNR");
        out << "duration_fraction,cdf_t1,cdf_t2\n";
        for (int i = 0; i < kCdfPoints; ++i)
            out << static_cast<double>(i) / (kCdfPoints - 1) << "," << pick->cdf_t1.at(i) << "," << pick->cdf_t2.at(i)
                << "\n";
        return kOk;
    }
    const bool rue = opt.figure == "fig3" || opt.figure == "fig5";
    out << "snr_db,scheme," << (rue ? "mean_rue_sum_rate" : "mean_mue_rate") << ",stderr\n";
    for (const auto& s : agg.per_snr)
        for (const auto& sc : s.schemes) {
            const MeanStat& m = rue ? sc.rue : sc.mue;
            out << s.snr_db << "," << to_string(sc.scheme) << "," << m.mean << "," << m.se << "\n";
        }
    return kOk;
}

}  // namespace hcran::cli
