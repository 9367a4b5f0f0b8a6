#pragma once

#include <span>
#include <vector>

namespace seqlab {

/// BLEU-2: geometric mean of modified unigram and bigram precision (clipped
/// counts, max over references per n-gram) times the brevity penalty
/// exp(min(0, 1 - r/c)) with r the closest-length reference (ties go to the
/// shorter one).
///
/// With `smoothed` set, a zero n-gram match count is replaced by 1e-9 so the
/// score stays strictly positive (the reward variant); otherwise any zero
/// precision zeroes the score (the evaluation variant).
double bleu2(std::span<const int> candidate, const std::vector<std::vector<int>>& references,
             bool smoothed);

}  // namespace seqlab
