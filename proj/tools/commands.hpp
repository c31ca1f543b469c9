#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chronoqa/harness.hpp"
#include "oracle.hpp"

namespace chronoqa::cli {

namespace fs = std::filesystem;

/// Resolves `p` against `workdir` unless it is absolute.
fs::path resolve(const fs::path& workdir, const fs::path& p);

/// Layering: defaults < config file < CHRONOQA_NOW_YEAR < flag overrides.
ExperimentConfig load_config(const std::optional<fs::path>& config_file,
                             const std::map<std::string, std::string>& overrides);

struct Dataset {
    Corpus corpus;
    std::vector<TripletRecord> triplets;
};

/// contexts.jsonl, questions.jsonl and (optional) triplets.jsonl of `dir`,
/// validated against the config's now_year and boundaries.
Dataset load_dataset(const fs::path& dir, const ExperimentConfig& cfg);

/// Writes contexts.jsonl, questions.jsonl, triplets.jsonl, stats.md and
/// config.json into `out_dir`.
void cmd_build(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& log);

struct TrainOptions {
    bool resume = false;
    std::optional<int> stop_after_stage;
};

/// Runs the experiment under runs_dir/<run id> and returns that directory.
/// The run id hashes the canonical config together with the corpus digest.
fs::path cmd_train(const ExperimentConfig& cfg, const fs::path& data_dir, const fs::path& runs_dir,
                   const TrainOptions& options, std::ostream& log);

/// Metrics of one checkpoint on the requested subsets (default: all up to
/// its stage) and splits, printed as a table and written as CSV.
std::vector<ReportRow> cmd_eval(const fs::path& checkpoint, const fs::path& data_dir, const ExperimentConfig& cfg,
                                const std::vector<Split>& splits, const std::vector<int>& subsets,
                                const std::optional<fs::path>& csv, std::ostream& out);

/// Side-by-side comparison of completed runs on `split`.
std::string cmd_report(const std::vector<fs::path>& run_dirs, Split split);

oracle::GradcheckResult cmd_gradcheck(const oracle::GradcheckOptions& options, std::ostream& out);

}  // namespace chronoqa::cli
