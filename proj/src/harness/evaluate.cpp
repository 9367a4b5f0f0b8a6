#include "seqlab/evaluate.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "seqlab/bleu.hpp"
#include "seqlab/counting.hpp"
#include "seqlab/errors.hpp"

namespace seqlab {

using nlohmann::json;

std::vector<int> strip_eos(std::span<const int> tokens) {
    std::vector<int> out;
    for (int t : tokens) {
        if (t == Vocab::kEos) break;
        out.push_back(t);
    }
    return out;
}

namespace {

struct LengthAccum {
    int inputs = 0;
    std::array<double, 10> exact_sum{};
    double other_sum = 0.0;
    std::array<long, 10> empirical_counts{};
    long empirical_other = 0;
    long samples = 0;
    double variance_sum = 0.0;
};

double tv_distance(const std::array<double, 10>& dist, double other, int n) {
    double tv = other;
    for (int d = 0; d < 10; ++d) {
        double truth = d < n ? 1.0 / n : 0.0;
        tv += std::fabs(dist[static_cast<size_t>(d)] - truth);
    }
    return 0.5 * tv;
}

}  // namespace

CountingEvalReport evaluate_counting(const Seq2SeqPolicy& policy,
                                     const std::vector<TrainPair>& test_set, int samples_per_input,
                                     uint64_t seed) {
    if (test_set.empty()) throw DomainError("evaluate_counting: empty test set");
    CountingEvalReport report;
    report.inputs = static_cast<int>(test_set.size());
    report.samples_per_input = samples_per_input;

    Rng rng(seed);
    std::map<int, LengthAccum> by_length;
    long correct = 0;
    long total = 0;
    for (const TrainPair& pair : test_set) {
        int n = static_cast<int>(pair.input.size());
        LengthAccum& acc = by_length[n];
        ++acc.inputs;

        // exact first-step distribution
        Tensor h = policy.encode_values(pair.input);
        auto [probs, h1] = policy.decode_step_values(h, Vocab::kBos);
        double digit_mass = 0.0;
        double mean = 0.0;
        std::array<double, 10> digit_probs{};
        for (int d = 0; d < 10; ++d) {
            digit_probs[static_cast<size_t>(d)] = probs[digit_to_token(d)];
            digit_mass += digit_probs[static_cast<size_t>(d)];
            mean += digit_probs[static_cast<size_t>(d)];
        }
        mean /= 10.0;
        double var = 0.0;
        for (int d = 0; d < 10; ++d) {
            double diff = digit_probs[static_cast<size_t>(d)] - mean;
            var += diff * diff;
        }
        var /= 10.0;
        acc.variance_sum += var;
        for (int d = 0; d < 10; ++d) acc.exact_sum[static_cast<size_t>(d)] += digit_probs[static_cast<size_t>(d)];
        acc.other_sum += 1.0 - digit_mass;

        // sampled decodes for precision and the empirical first-token counts
        for (int s = 0; s < samples_per_input; ++s) {
            SampleResult sample =
                policy.sample_sequence(pair.input, 3, SampleMode::kSample, rng, false);
            ++total;
            if (counting_correct_tokens(pair.input, sample.tokens)) ++correct;
            int first_digit = token_to_digit(sample.tokens.front());
            if (first_digit >= 0) {
                ++acc.empirical_counts[static_cast<size_t>(first_digit)];
            } else {
                ++acc.empirical_other;
            }
            ++acc.samples;
        }
    }
    report.precision = static_cast<double>(correct) / static_cast<double>(total);

    for (auto& [n, acc] : by_length) {
        FirstOutputStats stats;
        stats.n = n;
        stats.inputs = acc.inputs;
        for (int d = 0; d < 10; ++d) {
            stats.mean_exact_dist[static_cast<size_t>(d)] =
                acc.exact_sum[static_cast<size_t>(d)] / acc.inputs;
            stats.empirical_dist[static_cast<size_t>(d)] =
                static_cast<double>(acc.empirical_counts[static_cast<size_t>(d)]) / acc.samples;
        }
        stats.other_mass = acc.other_sum / acc.inputs;
        stats.empirical_other = static_cast<double>(acc.empirical_other) / acc.samples;
        stats.tv_exact_vs_truth = tv_distance(stats.mean_exact_dist, stats.other_mass, n);
        stats.tv_empirical_vs_truth = tv_distance(stats.empirical_dist, stats.empirical_other, n);
        stats.mean_variance = acc.variance_sum / acc.inputs;
        report.per_length.push_back(stats);
    }
    return report;
}

json CountingEvalReport::to_json() const {
    json per_n = json::array();
    for (const FirstOutputStats& s : per_length) {
        per_n.push_back({{"n", s.n},
                         {"inputs", s.inputs},
                         {"mean_exact_dist", s.mean_exact_dist},
                         {"other_mass", s.other_mass},
                         {"empirical_dist", s.empirical_dist},
                         {"empirical_other", s.empirical_other},
                         {"tv_exact_vs_truth", s.tv_exact_vs_truth},
                         {"tv_empirical_vs_truth", s.tv_empirical_vs_truth},
                         {"mean_variance", s.mean_variance}});
    }
    return json{{"task", "counting"},
                {"precision", precision},
                {"inputs", inputs},
                {"samples_per_input", samples_per_input},
                {"first_output", per_n}};
}

std::string CountingEvalReport::first_output_csv() const {
    std::ostringstream os;
    os << "n,inputs";
    for (int d = 0; d < 10; ++d) os << ",exact_p" << d;
    for (int d = 0; d < 10; ++d) os << ",empirical_p" << d;
    os << ",tv_exact,tv_empirical\n";
    os.precision(17);
    for (const FirstOutputStats& s : per_length) {
        os << s.n << "," << s.inputs;
        for (double p : s.mean_exact_dist) os << "," << p;
        for (double p : s.empirical_dist) os << "," << p;
        os << "," << s.tv_exact_vs_truth << "," << s.tv_empirical_vs_truth << "\n";
    }
    return os.str();
}

std::string CountingEvalReport::variance_csv() const {
    std::ostringstream os;
    os << "n,mean_variance\n";
    os.precision(17);
    for (const FirstOutputStats& s : per_length) {
        os << s.n << "," << s.mean_variance << "\n";
    }
    return os.str();
}

CorpusEvalReport evaluate_corpus(const Seq2SeqPolicy& policy,
                                 const std::vector<ReferenceSet>& test_sets, int samples_per_input,
                                 uint64_t seed, int max_len) {
    if (test_sets.empty()) throw DomainError("evaluate_corpus: empty test set");
    CorpusEvalReport report;
    report.inputs = static_cast<int>(test_sets.size());
    report.samples_per_input = samples_per_input;
    Rng rng(seed);
    double sampled_sum = 0.0;
    double greedy_sum = 0.0;
    for (const ReferenceSet& set : test_sets) {
        SampleResult greedy =
            policy.sample_sequence(set.input, max_len, SampleMode::kGreedy, rng, true);
        std::vector<int> words = strip_eos(greedy.tokens);
        greedy_sum += words.empty() ? 0.0 : bleu2(words, set.references, /*smoothed=*/false);
        double input_sum = 0.0;
        for (int s = 0; s < samples_per_input; ++s) {
            SampleResult sample =
                policy.sample_sequence(set.input, max_len, SampleMode::kSample, rng, true);
            std::vector<int> sample_words = strip_eos(sample.tokens);
            input_sum += sample_words.empty()
                             ? 0.0
                             : bleu2(sample_words, set.references, /*smoothed=*/false);
        }
        sampled_sum += input_sum / samples_per_input;
    }
    report.bleu2_greedy = greedy_sum / report.inputs;
    report.bleu2_sampled = sampled_sum / report.inputs;
    return report;
}

json CorpusEvalReport::to_json() const {
    return json{{"task", "corpus"},
                {"bleu2_sampled", bleu2_sampled},
                {"bleu2_greedy", bleu2_greedy},
                {"inputs", inputs},
                {"samples_per_input", samples_per_input}};
}

}  // namespace seqlab
