#pragma once

#include <span>
#include <string>
#include <vector>

#include "seqlab/adam.hpp"
#include "seqlab/gru.hpp"
#include "seqlab/train.hpp"

namespace seqlab {

/// Sequence discriminator: embeds (input ++ BOS ++ output), runs a GRU over
/// the combined sequence, and maps the final hidden state through a linear
/// head and sigmoid to P(real). The BOS token marks the input/output split.
class Discriminator {
public:
    Discriminator(int vocab_size, int embed_dim, int hidden, double lr, uint64_t init_seed);

    /// P(real | input, output), strictly in (0,1); pure in (params, tokens).
    double score(std::span<const int> input, std::span<const int> output) const;

    Var score_graph(LeafMap& leaves, std::span<const int> input,
                    std::span<const int> output) const;

    /// One binary cross-entropy step (real -> 1, fake -> 0); returns the loss.
    double train_step(std::span<const Episode> real, std::span<const Episode> fake);

    /// The BCE loss node alone (no update), for gradient checks.
    Var loss_graph(LeafMap& leaves, std::span<const Episode> real,
                   std::span<const Episode> fake) const;

    void save(const std::string& path) const;
    static Discriminator load(const std::string& path);

    ParamStore& params() { return params_; }
    int vocab_size() const { return vocab_size_; }

private:
    Discriminator() = default;
    void bind();

    int vocab_size_ = 0;
    int embed_dim_ = 0;
    int hidden_ = 0;
    ParamStore params_;
    AdamOptimizer opt_{1e-3};
    GruCell gru_;
    Parameter* embedding_ = nullptr;
    Parameter* head_w_ = nullptr;
    Parameter* head_b_ = nullptr;
};

struct SeqganMetrics {
    double disc_loss = 0.0;
    double mean_fake_score = 0.0;
    IterationMetrics generator;
};

/// One adversarial round: d_steps discriminator updates on fresh real/fake
/// batches, then g_steps generator updates with the discriminator score as
/// the terminal reward, using whichever surrogate cfg.kind selects. The
/// generator pathway is rl_train_iteration itself, reward source swapped.
SeqganMetrics seqgan_iteration(Seq2SeqPolicy& generator, ValueBaseline& baseline,
                               AdamOptimizer& gen_opt, Discriminator& disc,
                               const EpisodeSource& episodes, const RlIterationConfig& cfg,
                               int d_steps, int g_steps, Rng& rng,
                               const RewardFn* judge = nullptr);

/// Warm-up: trains the discriminator on real references vs generator samples.
double pretrain_discriminator(Discriminator& disc, Seq2SeqPolicy& generator,
                              const EpisodeSource& episodes, const RlIterationConfig& cfg,
                              int steps, Rng& rng);

}  // namespace seqlab
