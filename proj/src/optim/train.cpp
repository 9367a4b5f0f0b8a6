#include "seqlab/train.hpp"

#include <cmath>

#include "seqlab/errors.hpp"

namespace seqlab {

Trajectory sample_trajectory(const Seq2SeqPolicy& policy, const Episode& episode,
                             const RlIterationConfig& cfg, const RewardFn& terminal_reward,
                             const ValueBaseline* baseline, Rng& rng) {
    int prefix = std::min<int>(cfg.supervised_prefix,
                               static_cast<int>(episode.reference.size()));
    prefix = std::min(prefix, cfg.max_len);
    std::span<const int> forced(episode.reference.data(), static_cast<size_t>(prefix));
    SampleResult sample = policy.sample_with_prefix(episode.input, forced, cfg.max_len,
                                                    SampleMode::kSample, rng, cfg.stop_on_eos);
    Trajectory traj;
    traj.input = episode.input;
    traj.output = std::move(sample.tokens);
    traj.old_log_probs = std::move(sample.log_probs);
    traj.states = std::move(sample.states);
    traj.supervised_prefix = prefix;
    traj.reference = episode.reference;
    RewardSpec spec;
    spec.gamma = cfg.gamma;
    assign_rewards(traj, spec, terminal_reward);
    compute_returns_and_advantages(traj, cfg.gamma, baseline);
    return traj;
}

IterationMetrics rl_train_iteration(Seq2SeqPolicy& policy, ValueBaseline& baseline,
                                    AdamOptimizer& opt, const EpisodeSource& episodes,
                                    const RewardFn& terminal_reward, const RlIterationConfig& cfg,
                                    Rng& rng, const RewardFn* judge) {
    if (cfg.batch_size < 1) throw ConfigError("rl iteration: batch_size must be >= 1");

    // sample the batch under the current policy; recorded log-probs become
    // the old-policy scores for this iteration
    std::vector<Trajectory> batch;
    batch.reserve(static_cast<size_t>(cfg.batch_size));
    IterationMetrics metrics;
    double reward_sum = 0.0;
    double judged = 0.0;
    for (int b = 0; b < cfg.batch_size; ++b) {
        Episode ep = episodes(rng);
        batch.push_back(sample_trajectory(policy, ep, cfg, terminal_reward, &baseline, rng));
        reward_sum += batch.back().terminal_reward;
        if (judge != nullptr) judged += (*judge)(batch.back().input, batch.back().output);
    }
    metrics.mean_reward = reward_sum / cfg.batch_size;
    metrics.task_precision =
        judge != nullptr ? judged / cfg.batch_size : std::numeric_limits<double>::quiet_NaN();

    if (cfg.normalize_advantages) {
        double mean = 0.0, count = 0.0;
        for (const auto& traj : batch) {
            for (size_t i = static_cast<size_t>(traj.supervised_prefix);
                 i < traj.advantages.size(); ++i) {
                mean += traj.advantages[i];
                count += 1.0;
            }
        }
        mean /= std::max(count, 1.0);
        double var = 0.0;
        for (const auto& traj : batch) {
            for (size_t i = static_cast<size_t>(traj.supervised_prefix);
                 i < traj.advantages.size(); ++i) {
                var += (traj.advantages[i] - mean) * (traj.advantages[i] - mean);
            }
        }
        double sd = std::sqrt(var / std::max(count, 1.0)) + 1e-8;
        for (auto& traj : batch) {
            for (size_t i = static_cast<size_t>(traj.supervised_prefix);
                 i < traj.advantages.size(); ++i) {
                traj.advantages[i] = (traj.advantages[i] - mean) / sd;
            }
        }
    }

    int passes = cfg.kind == SurrogateKind::kReinforce ? 1 : cfg.ppo_epochs;
    Tape tape;
    for (int k = 0; k < passes; ++k) {
        tape.reset();
        LeafMap leaves(tape);
        SurrogateStats stats;
        Var loss = policy_surrogate_loss(leaves, policy, batch, cfg.kind, cfg.clip, &stats);
        tape.backward(loss);
        opt.step(policy.params());
        policy.params().zero_grads();
        metrics.loss = loss.item();
        metrics.mean_ratio = stats.mean_ratio;
        metrics.clip_fraction = stats.clip_fraction;
        metrics.kl_estimate = stats.kl_estimate;
    }

    metrics.baseline_loss = baseline.train_step(batch);
    return metrics;
}

}  // namespace seqlab
