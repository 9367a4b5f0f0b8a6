#pragma once

#include <string>

#include <json.hpp>

#include "seqlab/config.hpp"

namespace seqlab {

struct RunResult {
    std::string checkpoint_path;
    std::string metrics_path;
    nlohmann::json final_eval;
};

/// Writes dataset files for `task` into `out_path`.
void run_generate(const std::string& task, uint64_t seed, int size, const std::string& out_path,
                  int max_n = 10);

/// Runs the configured pipeline (MLE / RL fine-tune / adversarial) in
/// cfg.out_dir: writes config.json, metrics.jsonl (one line per iteration),
/// periodic checkpoints, the final checkpoint.json and eval.json.
/// RL algorithms require rl.init_checkpoint.
RunResult run_train(const ExperimentConfig& cfg);

/// Evaluates a checkpoint on the configured test data; returns the report
/// and, when out_dir is set, writes eval.json plus the distribution CSVs.
nlohmann::json run_eval(const std::string& checkpoint_path, const ExperimentConfig& cfg);

/// Bound-vs-exact-KL verification table over the standard grid.
nlohmann::json run_verify_kl();
std::string format_verify_kl(const nlohmann::json& table);

}  // namespace seqlab
