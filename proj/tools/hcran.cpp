#include "hcran/cli.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

std::vector<std::string> split_list(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const auto& item : raw) {
        std::stringstream ss(item);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

std::vector<double> parse_snr(const std::vector<std::string>& raw) {
    std::vector<double> out;
    for (const auto& tok : split_list(raw)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw hcran::ConfigError("invalid --snr value '" + tok + "'");
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    namespace cli = hcran::cli;
    CLI::App app{"Contract-based interference coordination simulator for H-CRANs"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    int runs = 0;
    std::vector<std::string> snr_raw, schemes_raw;
    std::string csi;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (defaults apply when omitted)");
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--snr", snr_raw, "SNR values in dB, comma separated");
        sub->add_option("--csi", csi, "perfect or estimated")->check(CLI::IsMember({"perfect", "estimated"}));
    };

    cli::SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo sweep");
    add_common(simulate);
    simulate->add_option("--runs", runs, "Monte Carlo runs per SNR")->check(CLI::PositiveNumber);
    simulate->add_option("--schemes", schemes_raw, "subset of CICF,FRPC,TDIC");
    simulate->add_option("--out", sim.out_dir, "output directory");
    simulate->add_option("--workers", sim.workers, "worker threads")->check(CLI::PositiveNumber);
    simulate->add_flag("--records", sim.write_records, "also write per-run records (runs.ndjson)");

    cli::InspectOptions ins;
    auto* inspect = app.add_subcommand("inspect", "design and report the contract for one draw");
    add_common(inspect);
    inspect->add_option("--run", ins.run, "run index within the seed's stream")->check(CLI::NonNegativeNumber);

    std::string level = "quick";
    auto* validate = app.add_subcommand("validate", "run the oracle suites");
    validate->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));

    cli::ExportOptions exp;
    double export_snr = 0.0;
    auto* exporter = app.add_subcommand("export", "emit a figure's table from an aggregate file");
    exporter->add_option("aggregate", exp.aggregate_path, "aggregate.json from simulate")->required();
    exporter->add_option("--figure", exp.figure, "fig3, fig4, fig5, fig6 or fig7")->required();
    auto* export_snr_opt = exporter->add_option("--snr", export_snr, "SNR for fig7 (default: last in file)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kOk : cli::kUsage;
    }

    auto overrides = [&](CLI::App* sub) {
        cli::Overrides o;
        if (sub->count("--seed")) o.seed = seed;
        if (sub->get_option_no_throw("--runs") && sub->count("--runs")) o.runs = runs;
        o.snr_db = parse_snr(snr_raw);
        if (!csi.empty()) o.csi = csi;
        o.schemes = split_list(schemes_raw);
        return o;
    };

    try {
        if (*simulate) {
            sim.config_path = config_path;
            sim.overrides = overrides(simulate);
            return cli::cmd_simulate(sim, std::cout);
        }
        if (*inspect) {
            ins.config_path = config_path;
            ins.overrides = overrides(inspect);
            return cli::cmd_inspect(ins, std::cout);
        }
        if (*validate) return cli::cmd_validate(level, std::cout);
        if (*exporter) {
            if (export_snr_opt->count()) exp.snr_db = export_snr;
            return cli::cmd_export(exp, std::cout, std::cerr);
        }
    } catch (const hcran::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kUsage;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return cli::kRuntime;
    }
    return cli::kUsage;
}
