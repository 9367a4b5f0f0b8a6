#pragma once

#include <string>
#include <vector>

#include "seqlab/seq2seq.hpp"
#include "seqlab/vocab.hpp"

namespace seqlab {

/// An input with its one-to-many valid responses, in token ids.
struct ReferenceSet {
    std::vector<int> input;
    std::vector<std::vector<int>> references;
};

struct Corpus {
    Vocab vocab;
    /// Grouped by input; references deduplicated.
    std::vector<ReferenceSet> sets;
    /// One pair per source line (multiplicity preserved), grouped by input.
    std::vector<TrainPair> line_pairs;
};

/// Loads a TAB-separated "input<TAB>response" file (UTF-8, LF), groups lines
/// by exact input-string match, tokenizes on whitespace, and builds a vocab
/// from the sorted unique tokens. Parse failures name the line number.
Corpus load_corpus(const std::string& path);

/// Tokenizes against an existing vocab instead of building one
/// (evaluation data must share the training vocab).
std::vector<ReferenceSet> load_corpus_with_vocab(const std::string& path, const Vocab& vocab);

/// Per-line pairs tokenized against an existing vocab.
std::vector<TrainPair> load_corpus_with_vocab_pairs(const std::string& path, const Vocab& vocab);

void write_corpus(const std::string& path,
                  const std::vector<std::pair<std::string, std::string>>& lines);

}  // namespace seqlab
