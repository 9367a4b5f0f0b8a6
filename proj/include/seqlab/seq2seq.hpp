#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seqlab/adam.hpp"
#include "seqlab/gru.hpp"
#include "seqlab/rng.hpp"
#include "seqlab/vocab.hpp"

namespace seqlab {

enum class SampleMode { kSample, kGreedy };

/// One decoded episode: emitted tokens, their log-probabilities under the
/// sampling policy, and the decoder hidden state each distribution was
/// computed from (the value-baseline input).
struct SampleResult {
    std::vector<int> tokens;
    std::vector<double> log_probs;
    std::vector<Tensor> states;
};

/// (input, reference) pair for supervised training.
struct TrainPair {
    std::vector<int> input;
    std::vector<int> reference;
};

/// GRU encoder-decoder stochastic policy over token sequences.
///
/// The encoder reads the input left to right from a zero state; its final
/// hidden state initializes the decoder (no attention). The decoder consumes
/// BOS plus previously emitted tokens and projects each hidden state to a
/// softmax over the vocabulary.
///
/// The numeric members (encode_values, sample_sequence, ...) run the same
/// graph-building code on a scratch tape, so sampled log-probs and scored
/// log-probs agree bit-exactly under identical parameters.
class Seq2SeqPolicy {
public:
    Seq2SeqPolicy(Vocab vocab, int hidden, uint64_t init_seed = 42);
    Seq2SeqPolicy(const Seq2SeqPolicy& other);
    Seq2SeqPolicy& operator=(const Seq2SeqPolicy& other);
    Seq2SeqPolicy(Seq2SeqPolicy&&) = default;
    Seq2SeqPolicy& operator=(Seq2SeqPolicy&&) = default;

    // --- graph builders ---
    Var embed(LeafMap& leaves, int token) const;
    Var encode(LeafMap& leaves, std::span<const int> input) const;
    struct DecodeStep {
        Var probs;
        Var hidden;
    };
    DecodeStep decode_step(LeafMap& leaves, Var hidden, int prev_token) const;
    /// Per-step log pi(output_t | input, output_{<t}); differentiable.
    std::vector<Var> sequence_log_prob_vars(LeafMap& leaves, std::span<const int> input,
                                            std::span<const int> output) const;
    /// Teacher-forced mean per-token cross entropy over a batch
    /// (EOS appended to each reference).
    Var mle_loss(LeafMap& leaves, std::span<const TrainPair> batch) const;

    // --- numeric surface (scratch tape inside) ---
    Tensor encode_values(std::span<const int> input) const;
    std::pair<Tensor, Tensor> decode_step_values(const Tensor& hidden, int prev_token) const;
    SampleResult sample_sequence(std::span<const int> input, int max_len, SampleMode mode, Rng& rng,
                                 bool stop_on_eos = true) const;
    /// Like sample_sequence, but the first `forced.size()` steps emit the
    /// given tokens (teacher forcing); log-probs and states are still
    /// recorded for every step.
    SampleResult sample_with_prefix(std::span<const int> input, std::span<const int> forced,
                                    int max_len, SampleMode mode, Rng& rng,
                                    bool stop_on_eos = true) const;
    std::vector<double> sequence_log_probs(std::span<const int> input,
                                           std::span<const int> output) const;

    // --- persistence ---
    void save(const std::string& path) const;
    static Seq2SeqPolicy load(const std::string& path);

    const Vocab& vocab() const { return vocab_; }
    int hidden() const { return hidden_; }
    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }

private:
    Seq2SeqPolicy() = default;
    void bind_cells();
    void check_token(int token) const;

    Vocab vocab_;
    int hidden_ = 0;
    ParamStore params_;
    GruCell encoder_;
    GruCell decoder_;
    Parameter* embedding_ = nullptr;  // (V, d)
    Parameter* proj_w_ = nullptr;     // (d, V)
    Parameter* proj_b_ = nullptr;     // (V)
};

struct MleConfig {
    int epochs = 10;
    int batch_size = 64;
    double lr = 1e-3;
};

struct MleReport {
    std::vector<double> epoch_mean_loss;
};

/// Teacher-forced maximum-likelihood pretraining. Shuffles per epoch, one
/// Adam step per batch, returns the mean per-token loss of every epoch.
MleReport mle_pretrain(Seq2SeqPolicy& policy, AdamOptimizer& opt,
                       const std::vector<TrainPair>& dataset, const MleConfig& cfg, Rng& rng,
                       const std::function<void(int, double)>& on_epoch = {});

}  // namespace seqlab
