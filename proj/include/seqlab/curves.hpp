#pragma once

#include <string>
#include <vector>

namespace seqlab {

struct CurveInput {
    std::string label;
    std::string metrics_path;  // JSON-lines stream
};

/// Merges metrics streams into an iteration-indexed CSV: one column per
/// input, rows for the union of iterations, missing values left empty.
/// `metric` picks the field; "auto" prefers precision, then bleu2, then
/// mean_reward (all inputs must agree on the resolved field).
std::string merge_curves(const std::vector<CurveInput>& inputs, const std::string& metric = "auto");

}  // namespace seqlab
