#include <iostream>

#include <CLI11.hpp>

#include "mcp/catalog.hpp"
#include "mcp/classify.hpp"
#include "mcp/report.hpp"
#include "mcp/simulate.hpp"

using namespace mcp;

int main(int argc, char** argv) {
    CLI::App app{"mcpsim: middlebox cooperation protocol path simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_path, baseline_path, attack_path, format = "text";
    std::vector<std::string> in_paths;
    int64_t seed = -1;
    bool check = false;

    auto* run = app.add_subcommand("run", "run a scenario and write a JSONL trace");
    run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--out", out_path, "output trace path (JSONL)")->required();

    auto* classify = app.add_subcommand("classify", "classify an attack trace against a baseline");
    classify->add_option("--baseline", baseline_path, "baseline trace (JSONL)")->required();
    classify->add_option("--attack", attack_path, "attack trace (JSONL)")->required();

    auto* report = app.add_subcommand("report", "summarize one or more traces");
    report->add_option("--in", in_paths, "input trace files (JSONL)")->required();
    report->add_option("--format", format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    auto* catalog = app.add_subcommand("catalog", "run the built-in attack catalog");
    catalog->add_flag("--check", check, "verify classes against expectations (exit 2 on mismatch)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            harness::ScenarioConfig cfg = harness::load_scenario_file(scenario_path);
            if (seed >= 0) cfg.seed = uint64_t(seed);
            harness::SimResult result = harness::run_scenario(cfg);
            harness::write_trace_file(result.trace, out_path);
            std::cout << "wrote " << result.trace.size() << " events to " << out_path << "\n";
        } else if (classify->parsed()) {
            Trace baseline = harness::load_trace_file(baseline_path);
            Trace attack = harness::load_trace_file(attack_path);
            auto cls = harness::classify_dp(baseline, attack);
            std::cout << observer::manipulation_class_str(cls) << "\n";
        } else if (report->parsed()) {
            std::vector<harness::TraceReport> reports;
            for (const std::string& path : in_paths)
                reports.push_back(harness::summarize_trace(path, harness::load_trace_file(path)));
            std::cout << (format == "json" ? harness::report_json(reports)
                                           : harness::report_text(reports));
        } else if (catalog->parsed()) {
            harness::CatalogOutcome out = harness::run_catalog();
            std::cout << out.text;
            if (check && !out.all_matched) {
                std::cerr << "catalog check failed: observed classes differ from expectations\n";
                return 2;
            }
        }
    } catch (const harness::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const harness::MismatchedScenarios& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
