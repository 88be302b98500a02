#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "impatience/des.hpp"
#include "impatience/marks.hpp"
#include "impatience/recursion.hpp"

namespace impatience {

inline constexpr const char* kToolVersion = "1.0.0";

// Experiments addressable from the command line.
inline const std::vector<std::string> kExperiments = {"sample-w", "sample-s", "loss-begin", "loss-end", "regen",
                                                      "des",      "cesaro",   "xval",       "props"};

struct ExecutionParams {
    Exactness mode = Exactness::exact;
    std::size_t samples = 1000;
    std::size_t replicas = 20;
    std::int64_t max_epochs = 1'000'000;
    std::int64_t max_depth = 1'000'000;
    std::int64_t warmup = 100'000;
    std::int64_t horizon = 10'000;
    std::int64_t n = 10'000;
    std::vector<double> levels = {0.5, 0.9, 0.99};
    int p_max = 10;
    std::size_t tuples = 100'000;
    std::size_t min_events = 100'000;
};

struct ScenarioConfig {
    std::optional<std::string> experiment;
    nlohmann::json raw;  // after seed override
    MarkSource source = MarkSource::constant({1.0, 0.0, 0.0});
    unsigned servers = 1;
    ImpatienceModel model = ImpatienceModel::begin;
    ExecutionParams exec;
};

// Throws ConfigError on malformed documents, CapabilityError/ArgumentError
// from source construction.
ScenarioConfig parse_config(const nlohmann::json& doc, std::optional<std::uint64_t> seed_override = std::nullopt);
ScenarioConfig load_config(const std::filesystem::path& path,
                           std::optional<std::uint64_t> seed_override = std::nullopt);

// FNV-1a 64 of the canonical (sorted-key) JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& doc);

// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

struct RunOptions {
    std::filesystem::path out_dir = ".";
    unsigned workers = 1;
};

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitCapability = 3, kExitContract = 4 };

// Runs one experiment, writes summary.json and detail.csv (customers.csv for
// DES runs) into out_dir and returns the process exit status. Errors are
// reported on `log` and mapped to exit codes: config 2, capability 3,
// contract violation 4.
int run_scenario(const std::string& experiment, const ScenarioConfig& config, const RunOptions& opts,
                 std::ostream& log);

}  // namespace impatience
