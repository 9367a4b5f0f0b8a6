#include "seqlab/generate.hpp"

#include <sstream>
#include <vector>

#include "seqlab/corpus.hpp"
#include "seqlab/counting.hpp"
#include "seqlab/rng.hpp"

namespace seqlab {

namespace {

std::string join_digits(std::span<const int> digits) {
    std::ostringstream os;
    for (size_t i = 0; i < digits.size(); ++i) {
        if (i) os << " ";
        os << digits[i];
    }
    return os.str();
}

struct ToyInput {
    std::string text;
    std::vector<std::string> responses;
};

/// Question grammar over a small word pool. Response sets are built
/// deterministically from the seed: each input keeps between 2 and 5 of its
/// candidate answers.
std::vector<ToyInput> build_toy_grammar(Rng& rng) {
    const std::vector<std::string> verbs = {"like", "want", "see", "need"};
    const std::vector<std::string> objects = {"tea", "rice", "fish", "books", "music", "games"};
    std::vector<ToyInput> inputs;
    for (const auto& v : verbs) {
        for (const auto& o : objects) {
            ToyInput in;
            in.text = "do you " + v + " " + o;
            std::vector<std::string> candidates = {
                "yes i " + v + " " + o,
                "i " + v + " " + o,
                "no i do not " + v + " " + o,
                "i really " + v + " " + o,
                "maybe i " + v + " " + o,
            };
            rng.shuffle(candidates);
            int keep = rng.uniform_int(2, 5);
            in.responses.assign(candidates.begin(), candidates.begin() + keep);
            inputs.push_back(std::move(in));
        }
    }
    for (const auto& v : verbs) {
        ToyInput in;
        in.text = "what do you " + v;
        std::vector<std::string> candidates;
        for (const auto& o : objects) candidates.push_back("i " + v + " " + o);
        rng.shuffle(candidates);
        int keep = rng.uniform_int(2, 5);
        in.responses.assign(candidates.begin(), candidates.begin() + keep);
        inputs.push_back(std::move(in));
    }
    return inputs;
}

}  // namespace

void generate_counting_file(const std::string& path, uint64_t seed, int size, int max_n) {
    Rng rng(seed);
    std::vector<std::pair<std::string, std::string>> lines;
    lines.reserve(static_cast<size_t>(size));
    for (int i = 0; i < size; ++i) {
        CountingInstance inst = gen_counting_instance(rng, max_n);
        lines.emplace_back(join_digits(inst.digits),
                           join_digits(std::span<const int>(inst.reference)));
    }
    write_corpus(path, lines);
}

void generate_toy_corpus_file(const std::string& path, uint64_t seed, int size) {
    // the grammar is part of the task definition: fixed response sets, so
    // train and test files drawn with different seeds stay consistent
    Rng grammar_rng(7);
    std::vector<ToyInput> grammar = build_toy_grammar(grammar_rng);
    Rng rng(seed);
    std::vector<std::pair<std::string, std::string>> lines;
    lines.reserve(static_cast<size_t>(size));
    for (int i = 0; i < size; ++i) {
        const ToyInput& in = grammar[static_cast<size_t>(
            rng.uniform_int(0, static_cast<int>(grammar.size()) - 1))];
        const std::string& resp = in.responses[static_cast<size_t>(
            rng.uniform_int(0, static_cast<int>(in.responses.size()) - 1))];
        lines.emplace_back(in.text, resp);
    }
    write_corpus(path, lines);
}

}  // namespace seqlab
