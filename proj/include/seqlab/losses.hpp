#pragma once

#include <limits>
#include <span>

#include "seqlab/seq2seq.hpp"
#include "seqlab/trajectory.hpp"

namespace seqlab {

/// Clipping hyperparameters. epsilon drives the fixed-bound surrogate;
/// (alpha1, alpha2, beta1, beta2) drive the per-step dynamic bounds. The
/// equivalent trust-region radius is delta = alpha2^2 / 2.
struct ClipConfig {
    double epsilon = 0.2;
    double alpha1 = std::numeric_limits<double>::infinity();
    double beta1 = std::numeric_limits<double>::infinity();
    double alpha2 = 1.0;
    double beta2 = 1.0;

    double delta() const { return 0.5 * alpha2 * alpha2; }
    void validate() const;
};

struct RatioBounds {
    double lo = 0.0;
    double hi = 0.0;
};

/// Per-step clip interval [1-beta, 1+alpha] around ratio 1, where
///   alpha = min(alpha1, alpha2 * sqrt(1/p_old - 1))
///   beta  = min(beta1,  beta2  * sqrt(1/p_old - 1))
/// and the lower edge is floored at 0 (ratios cannot be negative).
/// Low-probability actions get wide tolerances, near-certain ones get none.
RatioBounds dynamic_clip_bounds(double p_old, const ClipConfig& cfg);

enum class SurrogateKind { kReinforce, kPpoFixed, kPpoDynamic };

struct SurrogateStats {
    double mean_ratio = 1.0;
    double clip_fraction = 0.0;
    double kl_estimate = 0.0;  // mean(old - new log-prob)
    int steps = 0;
};

/// Builds the scalar policy loss for a batch of trajectories under the
/// current parameters (negated surrogate, for minimization):
///   reinforce:  -mean_t A_t log pi(a_t|s_t)
///   ppo:        -mean_t min(rho_t A_t, clip(rho_t, lo_t, hi_t) A_t)
/// with rho_t = exp(new - old log-prob), clamped to <= 1e4 before use.
/// Steps inside a trajectory's supervised prefix contribute cross entropy
/// against the reference instead (the MIXER mixed objective).
Var policy_surrogate_loss(LeafMap& leaves, const Seq2SeqPolicy& policy,
                          std::span<const Trajectory> batch, SurrogateKind kind,
                          const ClipConfig& cfg, SurrogateStats* stats = nullptr);

/// Supervised prefix length for a MIXER epoch: starts at the full output
/// length and shrinks by ceil(M / anneal_epochs) each epoch down to 0.
int mixer_prefix_len(int epoch, int output_len, int anneal_epochs);

}  // namespace seqlab
