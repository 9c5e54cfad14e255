#pragma once

#include "hlab/config.hpp"
#include "hlab/fields.hpp"
#include "hlab/report.hpp"

#include <json.hpp>
#include <string>
#include <vector>

namespace hlab {

/// Exit statuses of a run.
enum ExitStatus : int {
    exit_pass = 0,
    exit_margin_fail = 1,
    exit_config_error = 2,
    exit_numerical_failure = 3,
};

/// One verdict of a run: an estimate report or a scalar statistic against a threshold.
struct CheckResult {
    std::string name;
    bool pass = false;
    std::string statistic;  ///< e.g. min_margin, max_relative_drift
    double value = 0.0;
    double threshold = 0.0;
    nlohmann::ordered_json detail = nlohmann::ordered_json::object();
};

struct RunSummary {
    std::string name;
    std::string experiment;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    nlohmann::ordered_json audit = nlohmann::ordered_json::object();
    std::vector<CheckResult> checks;
    int exit_code = exit_pass;
    std::string error;
    bool incomplete = false;
    double wall_seconds = 0.0;
    std::string directory;
    std::vector<std::string> artifacts;
    std::vector<RunSummary> children;  ///< sweep runs

    bool pass() const { return exit_code == exit_pass; }
    const CheckResult &check(const std::string &name) const;
};

struct RunOptions {
    /// Replaces [output] directory when non-empty.
    std::string out_dir;
    /// Parallel sweep children.
    int jobs = 1;
    /// Write summary.json, CSV and SVG artifacts.
    bool write = true;
};

/// Runs one experiment (or every child of a sweep). Errors are caught and
/// mapped to exit statuses; the summary records them.
RunSummary run(const ExperimentConfig &cfg, const RunOptions &opts = {});

/// The summary document written as summary.json (no wall-clock, so repeated
/// runs are byte-identical).
nlohmann::ordered_json summary_json(const RunSummary &summary);

/// Initial datum described by the config's [solver] block.
ScalarField initial_datum(const ExperimentConfig &cfg);

}  // namespace hlab
