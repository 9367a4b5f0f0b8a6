#include "seqlab/losses.hpp"

#include <cmath>

#include "seqlab/errors.hpp"

namespace seqlab {

namespace {
constexpr double kRatioClamp = 1e4;
}

void ClipConfig::validate() const {
    if (epsilon <= 0.0) throw ConfigError("clip: epsilon must be > 0");
    if (alpha1 <= 0.0 || beta1 <= 0.0) throw ConfigError("clip: alpha1/beta1 must be > 0");
    if (alpha2 <= 0.0 || beta2 <= 0.0 || !std::isfinite(alpha2) || !std::isfinite(beta2)) {
        throw ConfigError("clip: alpha2/beta2 must be finite and > 0");
    }
}

RatioBounds dynamic_clip_bounds(double p_old, const ClipConfig& cfg) {
    if (!(p_old > 0.0) || p_old > 1.0) {
        throw DomainError("dynamic_clip_bounds: p_old must be in (0,1], got " +
                          std::to_string(p_old));
    }
    double spread = std::sqrt(1.0 / p_old - 1.0);
    double alpha = std::min(cfg.alpha1, cfg.alpha2 * spread);
    double beta = std::min(cfg.beta1, cfg.beta2 * spread);
    return RatioBounds{std::max(0.0, 1.0 - beta), 1.0 + alpha};
}

Var policy_surrogate_loss(LeafMap& leaves, const Seq2SeqPolicy& policy,
                          std::span<const Trajectory> batch, SurrogateKind kind,
                          const ClipConfig& cfg, SurrogateStats* stats) {
    if (batch.empty()) throw DomainError("policy_surrogate_loss: empty batch");
    Tape& t = leaves.tape();
    Var total = t.constant(0.0);
    SurrogateStats local;
    double ratio_sum = 0.0;
    int clipped = 0;
    double kl_sum = 0.0;
    int rl_steps = 0;
    int all_steps = 0;
    for (const Trajectory& traj : batch) {
        std::vector<Var> log_probs = policy.sequence_log_prob_vars(leaves, traj.input, traj.output);
        for (size_t i = 0; i < log_probs.size(); ++i) {
            ++all_steps;
            if (static_cast<int>(i) < traj.supervised_prefix) {
                // teacher-forced step: plain cross entropy
                total = t.sub(total, log_probs[i]);
                continue;
            }
            ++rl_steps;
            double advantage = traj.advantages[i];
            if (kind == SurrogateKind::kReinforce) {
                total = t.sub(total, t.scale(log_probs[i], advantage));
                continue;
            }
            Var ratio = t.clip(t.exp(t.sub(log_probs[i], t.constant(traj.old_log_probs[i]))), 0.0,
                               kRatioClamp);
            double rho = ratio.item();
            RatioBounds bounds;
            if (kind == SurrogateKind::kPpoFixed) {
                bounds = RatioBounds{1.0 - cfg.epsilon, 1.0 + cfg.epsilon};
            } else {
                bounds = dynamic_clip_bounds(std::exp(traj.old_log_probs[i]), cfg);
            }
            Var unclipped = t.scale(ratio, advantage);
            Var clipped_branch = t.scale(t.clip(ratio, bounds.lo, bounds.hi), advantage);
            total = t.sub(total, t.minimum(unclipped, clipped_branch));
            ratio_sum += rho;
            kl_sum += traj.old_log_probs[i] - log_probs[i].item();
            if (rho < bounds.lo || rho > bounds.hi) ++clipped;
        }
    }
    if (stats != nullptr) {
        local.steps = rl_steps;
        if (rl_steps > 0) {
            local.mean_ratio = kind == SurrogateKind::kReinforce ? 1.0 : ratio_sum / rl_steps;
            local.clip_fraction = static_cast<double>(clipped) / rl_steps;
            local.kl_estimate = kind == SurrogateKind::kReinforce ? 0.0 : kl_sum / rl_steps;
        }
        *stats = local;
    }
    return t.scale(total, 1.0 / all_steps);
}

int mixer_prefix_len(int epoch, int output_len, int anneal_epochs) {
    if (output_len < 0 || anneal_epochs < 1) {
        throw DomainError("mixer_prefix_len: bad schedule arguments");
    }
    if (epoch < 0) epoch = 0;
    int shrink_per_epoch = (output_len + anneal_epochs - 1) / anneal_epochs;
    long prefix = static_cast<long>(output_len) - static_cast<long>(shrink_per_epoch) * epoch;
    return prefix > 0 ? static_cast<int>(prefix) : 0;
}

}  // namespace seqlab
