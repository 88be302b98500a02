#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "impatience/errors.hpp"
#include "impatience/scenario.hpp"

int main(int argc, char** argv) {
    using namespace impatience;

    CLI::App app{"Simulation and exact sampling for queues with impatient customers"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::string config_path;
    std::string out_dir = ".";
    unsigned workers = 1;
    std::optional<std::uint64_t> seed_override;

    app.add_option("--config", config_path, "Scenario configuration (JSON)")->required();
    app.add_option("--out-dir", out_dir, "Directory for summary.json / detail.csv / customers.csv");
    app.add_option("--workers", workers, "Replica-level worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed-override", seed_override, "Replace source.seed");

    const std::pair<const char*, const char*> commands[] = {
        {"sample-w", "Stationary workload draws, impatience until beginning of service"},
        {"sample-s", "Stationary workload draws, impatience until end of service"},
        {"loss-begin", "Loss probability pi(b) with its bracket"},
        {"loss-end", "Loss probabilities pi(e), P(S > D) with their bracket"},
        {"regen", "DES regenerativity statistics vs. P(Y = 0) conditions"},
        {"des", "Multi-server discrete-event simulation with per-customer records"},
        {"cesaro", "Cesaro occupation measure, invariance and tightness diagnostics"},
        {"xval", "Single-server DES vs. workload recursion cross-validation"},
        {"props", "Pointwise inequality and DES inclusion property suites"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    const std::string experiment = app.get_subcommands().front()->get_name();
    ScenarioConfig cfg;
    try {
        cfg = load_config(config_path, seed_override);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ArgumentError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CapabilityError& e) {
        std::cerr << "capability error: " << e.what() << "\n";
        return kExitCapability;
    }
    return run_scenario(experiment, cfg, RunOptions{out_dir, workers}, std::cerr);
}
