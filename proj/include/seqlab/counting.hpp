#pragma once

#include <array>
#include <span>
#include <vector>

#include "seqlab/rng.hpp"
#include "seqlab/seq2seq.hpp"
#include "seqlab/vocab.hpp"

namespace seqlab {

/// One instance of the synthetic counting task: the environment picks a
/// position t in the input digit string and the valid answer encodes it as
/// (t-1, digits[t-1], N-t).
struct CountingInstance {
    std::vector<int> digits;       // values 0-9, length 1..10
    int position = 1;              // 1-based t
    std::array<int, 3> reference;  // (t-1, x_t, N-t)
};

/// N uniform on 1..max_n, digits uniform on 0-9, t uniform on 1..N.
CountingInstance gen_counting_instance(Rng& rng, int max_n = 10);

/// True iff output has length 3 and encodes a valid position for the input.
/// Malformed outputs (wrong length, out-of-range digits) are simply wrong.
bool counting_correct(std::span<const int> input_digits, std::span<const int> output_digits);

/// All valid outputs for an input: one per position t. Always exactly N.
std::vector<std::array<int, 3>> counting_valid_outputs(std::span<const int> input_digits);

/// Distribution of the first output token over digit values 0..9:
/// uniform on 0..N-1, zero elsewhere.
std::vector<double> counting_truth_distribution(int n);

// --- token mapping against the counting vocab (digit d <-> id d+3) ---

int digit_to_token(int digit);
/// -1 when the token is not a digit.
int token_to_digit(int token);
std::vector<int> digits_to_tokens(std::span<const int> digits);
/// Returns false if any token is not a digit (out contains partial data).
bool tokens_to_digits(std::span<const int> tokens, std::vector<int>& out);

/// Correctness of a token-level episode (input and output as vocab ids).
bool counting_correct_tokens(std::span<const int> input_tokens, std::span<const int> output_tokens);

/// Deterministic (input, reference) training pairs in token space.
std::vector<TrainPair> make_counting_dataset(uint64_t seed, int size, int max_n = 10);

}  // namespace seqlab
