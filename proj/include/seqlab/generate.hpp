#pragma once

#include <cstdint>
#include <string>

namespace seqlab {

/// Writes `size` counting instances as corpus-format lines
/// ("9 2 3<TAB>0 9 2"). Same (seed, size, max_n) gives byte-identical files.
void generate_counting_file(const std::string& path, uint64_t seed, int size, int max_n = 10);

/// Writes a toy one-to-many corpus: a fixed small grammar of question-style
/// inputs, each paired with 2-5 distinct valid responses; `size` lines are
/// drawn uniformly over (input, response). Vocabulary stays under 50 tokens.
void generate_toy_corpus_file(const std::string& path, uint64_t seed, int size);

}  // namespace seqlab
