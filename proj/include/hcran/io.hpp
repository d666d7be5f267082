#pragma once

#include "hcran/simulation.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace hcran {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

template <class T>
void read_if(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    std::set<std::string> ok(known.begin(), known.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw ConfigError("unknown config key '" + it.key() + "' in " + where);
}

}  // namespace detail

inline json to_json(const SimulationConfig& c) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["K"] = c.K;
    j["M"] = c.M;
    j["N"] = c.N;
    j["L"] = c.L;
    j["P_max"] = c.P_max;
    j["T0"] = c.T0;
    j["training_power"] = {{"rue", c.Ps}, {"mue", c.Pb}};
    j["snr_db"] = c.snr_db;
    j["runs"] = c.runs;
    j["seed"] = c.seed;
    j["csi"] = to_string(c.csi);
    json ov = json::object();
    for (const auto& [s, k] : c.csi_overrides) ov[to_string(s)] = to_string(k);
    j["csi_overrides"] = ov;
    json schemes = json::array();
    for (Scheme s : c.schemes) schemes.push_back(to_string(s));
    j["schemes"] = schemes;
    const Placement& p = c.placement;
    j["placement"] = {{"rue_distance", {p.rue_min, p.rue_max}},
                      {"mue_distance", {p.mue_min, p.mue_max}},
                      {"mbs_rue_distance", {p.mbs_rue_min, p.mbs_rue_max}}};
    j["pathloss"] = {{"shadow_std_db", c.pathloss.shadow_std_db},
                     {"exponent", c.pathloss.exponent},
                     {"ref_distance", c.pathloss.ref_distance}};
    j["mbs_mue_gain"] = c.mbs_mue_gain;
    j["log_base"] = c.log_base;
    return j;
}

// Missing keys keep their defaults; unknown keys are errors.
inline SimulationConfig config_from_json(const json& j, SimulationConfig c = {}) {
    using detail::read_if;
    detail::reject_unknown(j,
                           {"schema_version", "K", "M", "N", "L", "P_max", "T0", "training_power", "snr_db", "runs",
                            "seed", "csi", "csi_overrides", "schemes", "placement", "pathloss", "mbs_mue_gain",
                            "log_base"},
                           "config");
    if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion)
        throw ConfigError("unsupported config schema_version");
    read_if(j, "K", c.K);
    read_if(j, "M", c.M);
    read_if(j, "N", c.N);
    read_if(j, "L", c.L);
    read_if(j, "P_max", c.P_max);
    read_if(j, "T0", c.T0);
    if (j.contains("training_power")) {
        const json& t = j.at("training_power");
        detail::reject_unknown(t, {"rue", "mue"}, "training_power");
        read_if(t, "rue", c.Ps);
        read_if(t, "mue", c.Pb);
    }
    read_if(j, "snr_db", c.snr_db);
    read_if(j, "runs", c.runs);
    read_if(j, "seed", c.seed);
    try {
        if (j.contains("csi")) c.csi = parse_csi(j.at("csi").get<std::string>());
        if (j.contains("csi_overrides")) {
            c.csi_overrides.clear();
            for (auto it = j.at("csi_overrides").begin(); it != j.at("csi_overrides").end(); ++it)
                c.csi_overrides[parse_scheme(it.key())] = parse_csi(it.value().get<std::string>());
        }
        if (j.contains("schemes")) {
            c.schemes.clear();
            for (const auto& s : j.at("schemes")) c.schemes.push_back(parse_scheme(s.get<std::string>()));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (j.contains("placement")) {
        const json& p = j.at("placement");
        detail::reject_unknown(p, {"rue_distance", "mue_distance", "mbs_rue_distance"}, "placement");
        auto range = [&](const char* key, double& lo, double& hi) {
            if (!p.contains(key)) return;
            std::vector<double> v;
            read_if(p, key, v);
            if (v.size() != 2) throw ConfigError(std::string("placement.") + key + " must be [min, max]");
            lo = v[0];
            hi = v[1];
        };
        range("rue_distance", c.placement.rue_min, c.placement.rue_max);
        range("mue_distance", c.placement.mue_min, c.placement.mue_max);
        range("mbs_rue_distance", c.placement.mbs_rue_min, c.placement.mbs_rue_max);
    }
    if (j.contains("pathloss")) {
        const json& p = j.at("pathloss");
        detail::reject_unknown(p, {"shadow_std_db", "exponent", "ref_distance"}, "pathloss");
        read_if(p, "shadow_std_db", c.pathloss.shadow_std_db);
        read_if(p, "exponent", c.pathloss.exponent);
        read_if(p, "ref_distance", c.pathloss.ref_distance);
    }
    read_if(j, "mbs_mue_gain", c.mbs_mue_gain);
    read_if(j, "log_base", c.log_base);
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
}

inline SimulationConfig load_config(const std::string& path) { return config_from_json(read_json_file(path)); }

inline json to_json(const MeanStat& s) { return {{"n", s.n}, {"mean", s.mean}, {"stderr", s.se}}; }

inline MeanStat mean_stat_from_json(const json& j) {
    return {j.at("n").get<std::size_t>(), j.at("mean").get<double>(), j.at("stderr").get<double>()};
}

inline json to_json(const AggregateStats& agg) {
    json j;
    j["schema_version"] = kSchemaVersion;
    json rows = json::array();
    for (const auto& s : agg.per_snr) {
        json r;
        r["snr_db"] = s.snr_db;
        r["runs"] = s.runs;
        r["failures"] = s.failures;
        r["failure_rate"] = s.runs ? static_cast<double>(s.failures) / static_cast<double>(s.runs) : 0.0;
        r["accepted_contracts"] = s.accepted;
        json schemes = json::array();
        for (const auto& sc : s.schemes)
            schemes.push_back({{"scheme", to_string(sc.scheme)}, {"rue_sum_rate", to_json(sc.rue)},
                               {"mue_rate", to_json(sc.mue)}});
        r["schemes"] = schemes;
        json diffs = json::array();
        for (const auto& d : s.differences)
            diffs.push_back({{"a", to_string(d.a)}, {"b", to_string(d.b)}, {"metric", d.metric},
                             {"paired", to_json(d.diff)}});
        r["paired_differences"] = diffs;
        r["cdf"] = {{"duration_fraction_step", 1.0 / (kCdfPoints - 1)}, {"t1", s.cdf_t1}, {"t2", s.cdf_t2}};
        rows.push_back(r);
    }
    j["per_snr"] = rows;
    return j;
}

inline AggregateStats aggregate_from_json(const json& j) {
    if (!j.contains("schema_version") || j.at("schema_version") != kSchemaVersion)
        throw ConfigError("aggregate file has an unsupported schema_version");
    AggregateStats agg;
    try {
        for (const auto& r : j.at("per_snr")) {
            SnrStats s;
            s.snr_db = r.at("snr_db").get<double>();
            s.runs = r.at("runs").get<std::size_t>();
            s.failures = r.at("failures").get<std::size_t>();
            s.accepted = r.at("accepted_contracts").get<std::size_t>();
            for (const auto& sc : r.at("schemes"))
                s.schemes.push_back({parse_scheme(sc.at("scheme").get<std::string>()),
                                     mean_stat_from_json(sc.at("rue_sum_rate")), mean_stat_from_json(sc.at("mue_rate"))});
            for (const auto& d : r.at("paired_differences"))
                s.differences.push_back({parse_scheme(d.at("a").get<std::string>()),
                                         parse_scheme(d.at("b").get<std::string>()), d.at("metric").get<std::string>(),
                                         mean_stat_from_json(d.at("paired"))});
            s.cdf_t1 = r.at("cdf").at("t1").get<std::vector<double>>();
            s.cdf_t2 = r.at("cdf").at("t2").get<std::vector<double>>();
            agg.per_snr.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed aggregate file: ") + e.what());
    }
    return agg;
}

inline json records_header(const SimulationConfig& cfg) {
    return {{"schema_version", kSchemaVersion}, {"kind", "run_records"}, {"seed", cfg.seed}, {"runs", cfg.runs},
            {"snr_db", cfg.snr_db}};
}

inline json to_json(const RunRecord& r, const SimulationConfig& cfg) {
    json j;
    j["snr_db"] = cfg.snr_db.at(static_cast<std::size_t>(r.snr_index));
    j["stream"] = {{"seed", cfg.seed}, {"snr_index", r.snr_index}, {"run", r.run}, {"attempts", r.attempts}};
    j["failed"] = r.failed;
    if (!r.error.empty()) j["error"] = r.error;
    json schemes = json::object();
    for (Scheme s : cfg.schemes)
        if (r.at(s).present) schemes[to_string(s)] = {{"rue_sum_rate", r.at(s).rue}, {"mue_rate", r.at(s).mue}};
    j["schemes"] = schemes;
    if (r.contract.present) {
        const auto& c = r.contract;
        j["contract"] = {{"csi", c.csi},   {"accepted", c.accepted}, {"t1", c.t1},       {"t2", c.t2},
                         {"t3", c.t3},     {"P_M1", c.P_M1},         {"P_C1", c.P_C1},   {"objective", c.objective},
                         {"item", c.agent_type}, {"rejection", c.rejection}};
    }
    return j;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace hcran
