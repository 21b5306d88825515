#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nobcr/harness/experiment.hpp"
#include "nobcr/harness/report.hpp"
#include "nobcr/harness/script.hpp"

namespace fs = std::filesystem;
using namespace nobcr;

namespace {

struct RunArgs {
    std::string target;
    bool desk = false;
    std::string seeds;
    std::string out = "results";
    std::vector<std::string> variants;
    std::vector<std::string> sets;
    unsigned jobs = 1;
    bool quiet = false;
};

void parse_seeds(const std::string& text, RunOptions& opt) {
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            opt.seed_first = opt.seed_last = std::stoull(text);
        } else {
            opt.seed_first = std::stoull(text.substr(0, dots));
            opt.seed_last = std::stoull(text.substr(dots + 2));
        }
    } catch (const std::exception&) {
        throw ConfigError("bad seed range '" + text + "', expected a..b");
    }
    if (opt.seed_first == 0 || opt.seed_last < opt.seed_first)
        throw ConfigError("bad seed range '" + text + "', seeds start at 1");
}

ExperimentPreset resolve_target(const RunArgs& a) {
    for (const auto& name : preset_names())
        if (name == a.target) return make_preset(name, a.desk);
    if (!fs::exists(a.target)) throw ConfigError("'" + a.target + "' is neither a preset nor a config file");
    if (a.desk) throw ConfigError("--desk applies to presets only");
    ExperimentPreset p;
    p.name = fs::path(a.target).stem().string();
    p.description = "config file " + a.target;
    p.base = load_config(a.target);
    p.sweep_key = "none";
    p.sweep = {{"-", {}}};
    p.variants = {"config"};
    p.trials = 1;
    p.first_seed = p.base.seed;
    return p;
}

int cmd_run(const RunArgs& a) {
    ExperimentPreset preset = resolve_target(a);
    RunOptions opt;
    opt.overrides = a.sets;
    opt.variants = a.variants;
    opt.jobs = a.jobs;
    if (!a.quiet) opt.progress = &std::cerr;
    if (!a.seeds.empty()) parse_seeds(a.seeds, opt);
    for (const auto& v : opt.variants) (void)find_variant(v);

    const auto records = run_experiment(preset, opt);
    const std::string stem = preset.name + (a.desk ? "_desk" : "");
    const auto files = write_experiment(a.out, stem, records);

    const csv::Table agg = aggregate(to_table(records));
    const auto cv = agg.column("variant"), cs = agg.column("sweep_value"), cd = agg.column("delivery_ratio_mean"),
               ct = agg.column("total_transmissions_mean"), cm = agg.column("median_delay_mean");
    std::printf("%-12s %-10s %10s %14s %12s\n", "variant", preset.sweep_key.c_str(), "delivery", "transmissions",
                "median_delay");
    for (const auto& r : agg.rows)
        std::printf("%-12s %-10s %10.4f %14.1f %12.4f\n", r[cv].c_str(), r[cs].c_str(), csv::to_double(r[cd]),
                    csv::to_double(r[ct]), csv::to_double(r[cm]));
    std::printf("raw: %s\naggregate: %s\ncdf: %s\n", files.raw.c_str(), files.aggregate.c_str(), files.cdf.c_str());
    return 0;
}

int cmd_script(const std::string& file, const std::vector<std::string>& sets, const std::string& out) {
    ScriptRunner runner(sets);
    const ScriptResult res = runner.run_file(file);
    if (out.empty()) {
        write_log(std::cout, res);
    } else {
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot write " + out);
        write_log(f, res);
    }
    return 0;
}

int cmd_report(const std::string& base, const std::string& cand, const std::string& bv, const std::string& cv) {
    const auto rows = transmission_reduction(csv::read_file(base), csv::read_file(cand), bv, cv);
    write_reduction(std::cout, rows);
    return 0;
}

void cmd_list() {
    std::cout << "presets:\n";
    for (const auto& n : preset_names()) {
        const auto p = make_preset(n, false);
        std::cout << "  " << n << "  (" << p.description << "; sweeps " << p.sweep_key << ")\n";
    }
    std::cout << "variants:\n";
    for (const auto& v : known_variants()) std::cout << "  " << v.name << "  (" << v.description << ")\n";
    std::cout << "config keys and defaults:\n";
    std::cout << serialize_config(ScenarioConfig{});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Broadcast simulator for MC/U termination, lightweight XOR coding and coded redundancy"};
    app.require_subcommand(1);

    RunArgs ra;
    auto* run = app.add_subcommand("run", "Run a preset experiment or a single config file");
    run->add_option("target", ra.target, "Preset name or config file")->required();
    run->add_flag("--desk", ra.desk, "Scaled-down profile of a preset");
    run->add_option("--seeds", ra.seeds, "Seed range a..b (default: the preset's trials)");
    run->add_option("--out", ra.out, "Output directory")->capture_default_str();
    run->add_option("--variant", ra.variants, "Restrict to these variants");
    run->add_option("--set", ra.sets, "Override key=value, applied last");
    run->add_option("--jobs", ra.jobs, "Concurrent runs")->capture_default_str()->check(CLI::PositiveNumber);
    run->add_flag("--quiet", ra.quiet, "No progress lines");

    std::string script_file, script_out;
    std::vector<std::string> script_sets;
    auto* script = app.add_subcommand("script", "Replay a scenario script and print its event log");
    script->add_option("file", script_file, "Script file")->required()->check(CLI::ExistingFile);
    script->add_option("--set", script_sets, "Override key=value after the script's settings");
    script->add_option("--out", script_out, "Write the log here instead of stdout");

    std::string base_csv, cand_csv, base_variant, cand_variant;
    auto* report = app.add_subcommand("report", "Transmission reduction of a candidate against a baseline");
    report->add_option("baseline", base_csv, "Baseline raw or aggregate CSV")->required()->check(CLI::ExistingFile);
    report->add_option("candidate", cand_csv, "Candidate raw or aggregate CSV")->required()->check(CLI::ExistingFile);
    report->add_option("--baseline-variant", base_variant, "Variant to read from the baseline file");
    report->add_option("--candidate-variant", cand_variant, "Variant to read from the candidate file");

    app.add_subcommand("list", "List presets, variants and config keys");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(ra);
        if (*script) return cmd_script(script_file, script_sets, script_out);
        if (*report) return cmd_report(base_csv, cand_csv, base_variant, cand_variant);
        cmd_list();
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
