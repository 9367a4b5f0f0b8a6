#include "seqlab/counting.hpp"

#include "seqlab/errors.hpp"

namespace seqlab {

CountingInstance gen_counting_instance(Rng& rng, int max_n) {
    if (max_n < 1 || max_n > 10) throw DomainError("gen_counting_instance: max_n must be in [1,10]");
    CountingInstance inst;
    int n = rng.uniform_int(1, max_n);
    inst.digits.resize(static_cast<size_t>(n));
    for (int& d : inst.digits) d = rng.uniform_int(0, 9);
    inst.position = rng.uniform_int(1, n);
    inst.reference = {inst.position - 1, inst.digits[static_cast<size_t>(inst.position - 1)],
                      n - inst.position};
    return inst;
}

bool counting_correct(std::span<const int> input_digits, std::span<const int> output_digits) {
    if (output_digits.size() != 3) return false;
    int n = static_cast<int>(input_digits.size());
    int t = output_digits[0] + 1;
    if (t < 1 || t > n) return false;
    return output_digits[1] == input_digits[static_cast<size_t>(t - 1)] &&
           output_digits[2] == n - t;
}

std::vector<std::array<int, 3>> counting_valid_outputs(std::span<const int> input_digits) {
    int n = static_cast<int>(input_digits.size());
    std::vector<std::array<int, 3>> outputs;
    outputs.reserve(static_cast<size_t>(n));
    for (int t = 1; t <= n; ++t) {
        outputs.push_back({t - 1, input_digits[static_cast<size_t>(t - 1)], n - t});
    }
    return outputs;
}

std::vector<double> counting_truth_distribution(int n) {
    if (n < 1 || n > 10) throw DomainError("counting_truth_distribution: n must be in [1,10]");
    std::vector<double> dist(10, 0.0);
    for (int i = 0; i < n; ++i) dist[static_cast<size_t>(i)] = 1.0 / n;
    return dist;
}

int digit_to_token(int digit) {
    if (digit < 0 || digit > 9) throw DomainError("digit out of range");
    return digit + 3;
}

int token_to_digit(int token) {
    int d = token - 3;
    return (d >= 0 && d <= 9) ? d : -1;
}

std::vector<int> digits_to_tokens(std::span<const int> digits) {
    std::vector<int> tokens;
    tokens.reserve(digits.size());
    for (int d : digits) tokens.push_back(digit_to_token(d));
    return tokens;
}

bool tokens_to_digits(std::span<const int> tokens, std::vector<int>& out) {
    out.clear();
    out.reserve(tokens.size());
    for (int t : tokens) {
        int d = token_to_digit(t);
        if (d < 0) return false;
        out.push_back(d);
    }
    return true;
}

bool counting_correct_tokens(std::span<const int> input_tokens,
                             std::span<const int> output_tokens) {
    std::vector<int> input_digits, output_digits;
    if (!tokens_to_digits(input_tokens, input_digits)) return false;
    if (!tokens_to_digits(output_tokens, output_digits)) return false;
    return counting_correct(input_digits, output_digits);
}

std::vector<TrainPair> make_counting_dataset(uint64_t seed, int size, int max_n) {
    Rng rng(seed);
    std::vector<TrainPair> dataset;
    dataset.reserve(static_cast<size_t>(size));
    for (int i = 0; i < size; ++i) {
        CountingInstance inst = gen_counting_instance(rng, max_n);
        TrainPair pair;
        pair.input = digits_to_tokens(inst.digits);
        pair.reference = digits_to_tokens(std::span<const int>(inst.reference));
        dataset.push_back(std::move(pair));
    }
    return dataset;
}

}  // namespace seqlab
