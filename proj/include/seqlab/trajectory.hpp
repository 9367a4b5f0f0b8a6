#pragma once

#include <functional>
#include <span>
#include <vector>

#include "seqlab/tensor.hpp"

namespace seqlab {

class ValueBaseline;

/// One sampled episode with everything the surrogate losses need. All
/// per-step vectors share the output length M; returns are recomputable
/// from rewards and gamma bit-exactly.
struct Trajectory {
    std::vector<int> input;
    std::vector<int> output;
    std::vector<double> old_log_probs;  // recorded under the sampling-time snapshot
    std::vector<double> rewards;
    std::vector<double> returns;
    std::vector<double> baselines;
    std::vector<double> advantages;
    std::vector<Tensor> states;  // decoder hidden per step
    double terminal_reward = 0.0;
    /// MIXER: leading steps forced from the reference and trained with
    /// cross entropy; 0 everywhere else.
    int supervised_prefix = 0;
    std::vector<int> reference;  // teacher tokens for the supervised prefix
};

enum class RewardKind { kCountingCorrectness, kBleu2, kDiscriminator };

struct RewardSpec {
    RewardKind kind = RewardKind::kCountingCorrectness;
    double gamma = 1.0;
};

/// Terminal reward oracle for an (input, output) episode.
using RewardFn = std::function<double(std::span<const int>, std::span<const int>)>;

/// Terminal step receives the task reward, intermediate steps 0.
void assign_rewards(Trajectory& traj, const RewardSpec& spec, const RewardFn& terminal);

/// Fills returns G_t = sum_{tau>=t} gamma^(tau-t) r_tau, baselines b_t from
/// the (optional) value network over recorded states, and advantages
/// A_t = G_t - b_t.
void compute_returns_and_advantages(Trajectory& traj, double gamma, const ValueBaseline* baseline);

}  // namespace seqlab
