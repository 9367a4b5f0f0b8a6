#pragma once

#include <array>
#include <vector>

#include <json.hpp>

#include "seqlab/corpus.hpp"
#include "seqlab/seq2seq.hpp"

namespace seqlab {

/// First-output statistics for one input length N.
struct FirstOutputStats {
    int n = 0;            // input length
    int inputs = 0;       // test inputs of this length
    /// Mean over inputs of the exact first-step softmax, restricted to the
    /// ten digit tokens (plus lumped non-digit mass).
    std::array<double, 10> mean_exact_dist{};
    double other_mass = 0.0;
    /// Empirical first-token distribution over the sampled decodes.
    std::array<double, 10> empirical_dist{};
    double empirical_other = 0.0;
    /// Total-variation distance of the mean exact distribution from the
    /// ground-truth uniform-over-{0..N-1}.
    double tv_exact_vs_truth = 0.0;
    double tv_empirical_vs_truth = 0.0;
    /// Mean over inputs of Var over the ten digit probabilities.
    double mean_variance = 0.0;
};

struct CountingEvalReport {
    double precision = 0.0;  // sampled decoding, correct / total
    int inputs = 0;
    int samples_per_input = 0;
    std::vector<FirstOutputStats> per_length;

    nlohmann::json to_json() const;
    std::string first_output_csv() const;
    std::string variance_csv() const;
};

CountingEvalReport evaluate_counting(const Seq2SeqPolicy& policy,
                                     const std::vector<TrainPair>& test_set, int samples_per_input,
                                     uint64_t seed);

struct CorpusEvalReport {
    double bleu2_sampled = 0.0;  // mean exact BLEU-2 over sampled decodes
    double bleu2_greedy = 0.0;   // exact BLEU-2 of the greedy decode
    int inputs = 0;
    int samples_per_input = 0;

    nlohmann::json to_json() const;
};

CorpusEvalReport evaluate_corpus(const Seq2SeqPolicy& policy,
                                 const std::vector<ReferenceSet>& test_sets, int samples_per_input,
                                 uint64_t seed, int max_len);

/// Strips everything from the first EOS on (BLEU candidates are words only).
std::vector<int> strip_eos(std::span<const int> tokens);

}  // namespace seqlab
