#pragma once

#include <functional>
#include <optional>

#include "seqlab/baseline.hpp"
#include "seqlab/losses.hpp"
#include "seqlab/seq2seq.hpp"
#include "seqlab/trajectory.hpp"

namespace seqlab {

/// Source of training episodes; `reference` may be empty for tasks without
/// teacher outputs (the MIXER prefix and discriminator real pairs need it).
struct Episode {
    std::vector<int> input;
    std::vector<int> reference;
};

using EpisodeSource = std::function<Episode(Rng&)>;

struct RlIterationConfig {
    int batch_size = 64;
    int ppo_epochs = 4;  // optimization passes per sampled batch
    double gamma = 1.0;
    SurrogateKind kind = SurrogateKind::kReinforce;
    ClipConfig clip;
    bool normalize_advantages = false;
    int max_len = 3;
    bool stop_on_eos = false;
    int supervised_prefix = 0;  // MIXER; 0 disables teacher forcing
};

struct IterationMetrics {
    double mean_reward = 0.0;
    double mean_ratio = 1.0;
    double clip_fraction = 0.0;
    double kl_estimate = 0.0;
    double loss = 0.0;
    double baseline_loss = 0.0;
    /// Fraction of sampled episodes the judge accepts; NaN without a judge.
    double task_precision = 0.0;
};

/// One sampled trajectory under the current policy, with rewards, returns
/// and advantages filled in.
Trajectory sample_trajectory(const Seq2SeqPolicy& policy, const Episode& episode,
                             const RlIterationConfig& cfg, const RewardFn& terminal_reward,
                             const ValueBaseline* baseline, Rng& rng);

/// One training iteration shared by every algorithm:
/// sample a batch under the current policy (which thereby becomes the old
/// policy for this batch), then run `ppo_epochs` optimization passes of the
/// selected surrogate on the fixed batch (REINFORCE always runs one), then
/// one baseline regression step. Ratio statistics are reported from the last
/// optimization pass.
IterationMetrics rl_train_iteration(Seq2SeqPolicy& policy, ValueBaseline& baseline,
                                    AdamOptimizer& opt, const EpisodeSource& episodes,
                                    const RewardFn& terminal_reward, const RlIterationConfig& cfg,
                                    Rng& rng, const RewardFn* judge = nullptr);

}  // namespace seqlab
