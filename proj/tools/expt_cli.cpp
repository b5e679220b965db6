// Batch driver: run experiment configs, summarize envelopes, dump stored fields.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "ldg/experiments.hpp"

#ifndef LDG_VERSION
#define LDG_VERSION "unknown"
#endif

namespace {
constexpr int kExitChecksFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;
constexpr const char* kOutEnv = "LDG_RESULTS_DIR";

std::string default_out() {
    const char* v = std::getenv(kOutEnv);
    return v && *v ? v : "results";
}

// --grid maps to the lattice spacing for 3D kinds and to the interval count otherwise.
void apply_overrides(ldg::ExperimentConfig& cfg, const std::string& grid, const std::string& lambda,
                     const std::string& seed, const std::string& out) {
    auto set = [&](const std::string& key, const std::string& value) {
        if (!value.empty()) cfg.params[key] = value;
    };
    const bool meridian = cfg.kind == "cigar" || cfg.kind == "pancake" || cfg.kind == "shape-sweep";
    set(meridian ? "spacing" : "N", grid);
    set("lambda", lambda);
    set("seed", seed);
    if (!out.empty()) cfg.output_dir = out;
    if (cfg.output_dir.empty()) cfg.output_dir = default_out() + "/" + cfg.kind;
}
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Liquid crystal equivariant minimization experiments"};
    app.require_subcommand(1);

    std::string config_path, grid, lambda, seed, out;
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    auto* run = app.add_subcommand("run", "Run an experiment config and write its result envelope");
    run->add_option("config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
    run->add_option("--grid", grid, "Interval count (disc kinds) or lattice spacing (cylinder kinds)");
    run->add_option("--lambda", lambda, "Coupling constant");
    run->add_option("--seed", seed, "Seed for noisy initial data");
    run->add_option("--workers", workers, "Worker threads for independent solves")->check(CLI::PositiveNumber);
    run->add_option("--out", out, std::string("Output directory (default $") + kOutEnv + "/<kind>)");

    std::vector<std::string> envelopes;
    std::string report_out;
    auto* report = app.add_subcommand("report", "Markdown summary of result envelopes");
    report->add_option("envelopes", envelopes, "Envelope JSON files");
    report->add_option("--out", report_out, "Write the report to a file instead of stdout");

    std::string field_path, csv_out;
    bool csv = false;
    auto* dump = app.add_subcommand("dump-field", "Export a stored field as CSV");
    dump->add_option("result", field_path, "Field file written by run (*.field.json)")->required();
    dump->add_flag("--csv", csv, "CSV output (the only format)");
    dump->add_option("--out", csv_out, "Write to a file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*run) {
            auto cfg = ldg::load_config(config_path);
            apply_overrides(cfg, grid, lambda, seed, out);
            const auto envelope = ldg::run_experiment(cfg, {workers, LDG_VERSION});
            const bool passed = ldg::envelope_passed(envelope);
            for (const auto& e : envelope["summary"]) {
                const auto& pass = e["pass"];
                std::cout << (pass.is_null() ? "info" : pass.get<bool>() ? "PASS" : "FAIL") << "  "
                          << e["name"].get<std::string>() << " = " << e["value"].dump() << '\n';
            }
            std::cout << "envelope: " << cfg.output_dir << "/" << cfg.kind << ".json\n";
            const bool enforce = envelope["config"]["params"].value("checks", "1") != "0";
            return enforce && !passed ? kExitChecksFailed : 0;
        }
        if (*report) {
            const std::string text = ldg::render_report(envelopes);
            if (report_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream f(report_out);
                if (!f) throw ldg::ConfigError("cannot write " + report_out);
                f << text;
            }
            return 0;
        }
        if (!csv) throw ldg::ConfigError("dump-field needs --csv");
        const std::string text = ldg::field_csv(field_path);
        if (csv_out.empty()) {
            std::cout << text;
        } else {
            std::ofstream f(csv_out);
            if (!f) throw ldg::ConfigError("cannot write " + csv_out);
            f << text;
        }
        return 0;
    } catch (const ldg::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return kExitSolver;
    }
}
