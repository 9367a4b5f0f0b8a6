#include "seqlab/bleu.hpp"

#include <cmath>
#include <cstdlib>
#include <unordered_map>

#include "seqlab/errors.hpp"

namespace seqlab {

namespace {

using NgramCounts = std::unordered_map<uint64_t, int>;

uint64_t ngram_key(std::span<const int> seq, size_t start, int n) {
    uint64_t key = static_cast<uint64_t>(n);
    for (int i = 0; i < n; ++i) {
        key = key * 1000003ULL + static_cast<uint64_t>(seq[start + static_cast<size_t>(i)] + 1);
    }
    return key;
}

NgramCounts count_ngrams(std::span<const int> seq, int n) {
    NgramCounts counts;
    if (static_cast<int>(seq.size()) >= n) {
        for (size_t i = 0; i + static_cast<size_t>(n) <= seq.size(); ++i) {
            ++counts[ngram_key(seq, i, n)];
        }
    }
    return counts;
}

}  // namespace

double bleu2(std::span<const int> candidate, const std::vector<std::vector<int>>& references,
             bool smoothed) {
    if (candidate.empty()) throw DomainError("bleu2: empty candidate");
    if (references.empty()) throw DomainError("bleu2: no references");

    double log_precision_sum = 0.0;
    for (int n = 1; n <= 2; ++n) {
        NgramCounts cand = count_ngrams(candidate, n);
        NgramCounts max_ref;
        for (const auto& ref : references) {
            NgramCounts rc = count_ngrams(ref, n);
            for (const auto& [key, count] : rc) {
                int& slot = max_ref[key];
                if (count > slot) slot = count;
            }
        }
        int matched = 0;
        int total = 0;
        for (const auto& [key, count] : cand) {
            total += count;
            auto it = max_ref.find(key);
            if (it != max_ref.end()) matched += std::min(count, it->second);
        }
        double numerator = static_cast<double>(matched);
        if (matched == 0) {
            if (!smoothed) return 0.0;
            numerator = 1e-9;
        }
        log_precision_sum += std::log(numerator / std::max(total, 1));
    }

    int c = static_cast<int>(candidate.size());
    int r = static_cast<int>(references.front().size());
    for (const auto& ref : references) {
        int len = static_cast<int>(ref.size());
        int best = std::abs(len - c) - std::abs(r - c);
        if (best < 0 || (best == 0 && len < r)) r = len;
    }
    double bp = c >= r ? 1.0 : std::exp(1.0 - static_cast<double>(r) / c);
    return bp * std::exp(0.5 * log_precision_sum);
}

}  // namespace seqlab
