#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "seqlab/counting.hpp"
#include "seqlab/errors.hpp"
#include "seqlab/grad_check.hpp"
#include "seqlab/seq2seq.hpp"

using namespace seqlab;

namespace {

Seq2SeqPolicy small_policy(int hidden = 16, uint64_t seed = 42) {
    return Seq2SeqPolicy(Vocab::counting(), hidden, seed);
}

}  // namespace

TEST_CASE("encode is deterministic and input-sensitive") {
    Seq2SeqPolicy policy = small_policy();
    std::vector<int> a = digits_to_tokens(std::vector<int>{9, 2, 3});
    std::vector<int> b = digits_to_tokens(std::vector<int>{9, 2});
    Tensor h1 = policy.encode_values(a);
    Tensor h2 = policy.encode_values(a);
    CHECK(h1.data == h2.data);  // bitwise
    Tensor h3 = policy.encode_values(b);
    CHECK(h1.data != h3.data);
}

TEST_CASE("hidden state components stay inside (-1, 1)") {
    Seq2SeqPolicy policy = small_policy(32, 3);
    Rng rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        CountingInstance inst = gen_counting_instance(rng);
        Tensor h = policy.encode_values(digits_to_tokens(inst.digits));
        for (double v : h.data) {
            CHECK(v > -1.0);
            CHECK(v < 1.0);
        }
    }
}

TEST_CASE("encode rejects unknown token ids and empty input") {
    Seq2SeqPolicy policy = small_policy();
    std::vector<int> bad = {99};
    CHECK_THROWS_AS(policy.encode_values(bad), DomainError);
    std::vector<int> empty;
    CHECK_THROWS_AS(policy.encode_values(empty), DomainError);
}

TEST_CASE("decode_step emits a valid distribution, deterministically") {
    Seq2SeqPolicy policy = small_policy();
    Tensor h = policy.encode_values(digits_to_tokens(std::vector<int>{1, 2, 3}));
    auto [p1, h1] = policy.decode_step_values(h, Vocab::kBos);
    auto [p2, h2] = policy.decode_step_values(h, Vocab::kBos);
    CHECK(p1.data == p2.data);
    CHECK(h1.data == h2.data);
    double sum = 0.0;
    for (double v : p1.data) {
        CHECK(v > 0.0);
        sum += v;
    }
    CHECK(std::fabs(sum - 1.0) < 1e-12);
}

TEST_CASE("zero projection weights give the uniform distribution") {
    Seq2SeqPolicy policy = small_policy();
    for (double& v : policy.params().get("proj.w").value.data) v = 0.0;
    for (double& v : policy.params().get("proj.b").value.data) v = 0.0;
    Tensor h = policy.encode_values(digits_to_tokens(std::vector<int>{7}));
    auto [probs, hn] = policy.decode_step_values(h, Vocab::kBos);
    for (double v : probs.data) CHECK(v == doctest::Approx(1.0 / 13).epsilon(1e-12));
}

TEST_CASE("greedy decoding is a pure function of params and input") {
    Seq2SeqPolicy policy = small_policy(24, 9);
    std::vector<int> input = digits_to_tokens(std::vector<int>{4, 4, 1});
    Rng r1(1), r2(2);
    SampleResult a = policy.sample_sequence(input, 3, SampleMode::kGreedy, r1, false);
    SampleResult b = policy.sample_sequence(input, 3, SampleMode::kGreedy, r2, false);
    CHECK(a.tokens == b.tokens);
    CHECK(a.log_probs == b.log_probs);
}

TEST_CASE("sampled token frequencies match the softmax within 3-sigma binomial bounds") {
    Seq2SeqPolicy policy = small_policy();
    std::vector<int> input = digits_to_tokens(std::vector<int>{5, 1});
    Tensor h = policy.encode_values(input);
    auto [probs, hn] = policy.decode_step_values(h, Vocab::kBos);

    const int n = 100000;
    Rng rng(123);
    std::vector<long> counts(static_cast<size_t>(probs.numel()), 0);
    for (int i = 0; i < n; ++i) {
        SampleResult s = policy.sample_sequence(input, 1, SampleMode::kSample, rng, false);
        ++counts[static_cast<size_t>(s.tokens[0])];
    }
    for (int tok = 0; tok < probs.numel(); ++tok) {
        double p = probs[tok];
        double sigma = std::sqrt(p * (1.0 - p) / n);
        double freq = static_cast<double>(counts[static_cast<size_t>(tok)]) / n;
        CHECK(std::fabs(freq - p) <= 3.0 * sigma + 1e-12);
    }
}

TEST_CASE("recorded log-probs equal the log of decode_step probabilities, exactly") {
    Seq2SeqPolicy policy = small_policy();
    std::vector<int> input = digits_to_tokens(std::vector<int>{3, 1, 4});
    Rng rng(77);
    SampleResult s = policy.sample_sequence(input, 3, SampleMode::kSample, rng, false);
    Tensor h = policy.encode_values(input);
    int prev = Vocab::kBos;
    for (size_t t = 0; t < s.tokens.size(); ++t) {
        auto [probs, hn] = policy.decode_step_values(h, prev);
        CHECK(s.log_probs[t] == std::log(probs[s.tokens[t]]));  // bitwise
        h = hn;
        prev = s.tokens[t];
    }
}

TEST_CASE("scoring a decoded sequence reproduces the recorded log-probs bit-exactly") {
    Seq2SeqPolicy policy = small_policy(32, 4);
    std::vector<int> input = digits_to_tokens(std::vector<int>{9, 2, 3});
    Rng rng(5);
    SampleResult greedy = policy.sample_sequence(input, 3, SampleMode::kGreedy, rng, false);
    std::vector<double> scored = policy.sequence_log_probs(input, greedy.tokens);
    CHECK(scored == greedy.log_probs);

    SampleResult sampled = policy.sample_sequence(input, 3, SampleMode::kSample, rng, false);
    CHECK(policy.sequence_log_probs(input, sampled.tokens) == sampled.log_probs);
}

TEST_CASE("per-step scores exponentiate to probabilities <= 1") {
    Seq2SeqPolicy policy = small_policy();
    std::vector<int> input = digits_to_tokens(std::vector<int>{2, 2});
    Rng rng(8);
    SampleResult s = policy.sample_sequence(input, 3, SampleMode::kSample, rng, false);
    for (double lp : s.log_probs) CHECK(std::exp(lp) <= 1.0);
}

TEST_CASE("score ratio under untouched params is exactly 1 per step") {
    Seq2SeqPolicy policy = small_policy(24, 13);
    Seq2SeqPolicy snapshot = policy;  // frozen copy
    std::vector<int> input = digits_to_tokens(std::vector<int>{1, 2, 3, 4});
    Rng rng(3);
    SampleResult s = policy.sample_sequence(input, 3, SampleMode::kSample, rng, false);
    std::vector<double> new_scores = policy.sequence_log_probs(input, s.tokens);
    std::vector<double> old_scores = snapshot.sequence_log_probs(input, s.tokens);
    for (size_t t = 0; t < s.tokens.size(); ++t) {
        CHECK(std::exp(new_scores[t] - old_scores[t]) == 1.0);
    }
}

TEST_CASE("snapshot stays frozen while the original trains") {
    Seq2SeqPolicy policy = small_policy();
    Seq2SeqPolicy snapshot = policy;
    std::vector<double> frozen = snapshot.params().get("proj.b").value.data;
    policy.params().get("proj.b").value[0] += 1.0;
    CHECK(snapshot.params().get("proj.b").value.data == frozen);
}

TEST_CASE("MLE gradient passes grad_check on a 2-step toy sequence") {
    Seq2SeqPolicy policy = small_policy(6, 21);
    std::vector<TrainPair> batch = {
        {digits_to_tokens(std::vector<int>{1, 2}), digits_to_tokens(std::vector<int>{0, 1})}};
    auto build = [&](Tape& t) {
        LeafMap leaves(t);
        return policy.mle_loss(leaves, batch);
    };
    GradCheckReport report = grad_check(build, policy.params(), 1e-5, 1e-4);
    CHECK(report.pass);
}

TEST_CASE("a single pair is memorized: greedy decode reproduces the reference") {
    Seq2SeqPolicy policy = small_policy(24, 1);
    std::vector<TrainPair> dataset = {
        {digits_to_tokens(std::vector<int>{7, 4}), digits_to_tokens(std::vector<int>{0, 7, 1})}};
    AdamOptimizer opt(1e-2);
    Rng rng(2);
    MleConfig cfg;
    cfg.epochs = 150;
    cfg.batch_size = 1;
    MleReport report = mle_pretrain(policy, opt, dataset, cfg, rng);
    CHECK(report.epoch_mean_loss.back() < report.epoch_mean_loss.front());
    Rng sample_rng(1);
    SampleResult out =
        policy.sample_sequence(dataset[0].input, 3, SampleMode::kGreedy, sample_rng, false);
    CHECK(out.tokens == dataset[0].reference);
}

TEST_CASE("copy-task loss falls from about ln|V| toward 0") {
    // two-token vocab usage: copy the single input digit twice
    Seq2SeqPolicy policy = small_policy(24, 11);
    std::vector<TrainPair> dataset;
    for (int d : {0, 1}) {
        dataset.push_back({digits_to_tokens(std::vector<int>{d}),
                           digits_to_tokens(std::vector<int>{d, d})});
    }
    AdamOptimizer opt(1e-2);
    Rng rng(4);
    MleConfig cfg;
    cfg.epochs = 200;
    cfg.batch_size = 2;
    MleReport report = mle_pretrain(policy, opt, dataset, cfg, rng);
    CHECK(report.epoch_mean_loss.front() > 1.5);  // ln 13 = 2.56 at init
    CHECK(report.epoch_mean_loss.back() < 0.15);  // approaches ln(1) = 0
}

TEST_CASE("mle_pretrain rejects an empty dataset") {
    Seq2SeqPolicy policy = small_policy();
    AdamOptimizer opt(1e-3);
    Rng rng(1);
    std::vector<TrainPair> empty;
    CHECK_THROWS_AS(mle_pretrain(policy, opt, empty, MleConfig{}, rng), DomainError);
}

TEST_CASE("policy checkpoints round-trip through save/load bit-exactly") {
    Seq2SeqPolicy policy = small_policy(12, 31);
    auto path = std::filesystem::temp_directory_path() / "seqlab_policy_test.json";
    policy.save(path.string());
    Seq2SeqPolicy loaded = Seq2SeqPolicy::load(path.string());
    CHECK(loaded.hidden() == policy.hidden());
    CHECK(loaded.vocab() == policy.vocab());
    for (auto& [name, p] : policy.params()) {
        CHECK(loaded.params().get(name).value.data == p.value.data);
    }
    // the loaded policy scores identically
    std::vector<int> input = digits_to_tokens(std::vector<int>{5});
    std::vector<int> output = digits_to_tokens(std::vector<int>{0, 5, 0});
    CHECK(loaded.sequence_log_probs(input, output) == policy.sequence_log_probs(input, output));
    std::filesystem::remove(path);
}

TEST_CASE("sample_sequence stops at EOS only when asked") {
    Seq2SeqPolicy policy = small_policy();
    // tilt the projection so EOS dominates
    Parameter& b = policy.params().get("proj.b");
    b.value[Vocab::kEos] = 25.0;
    std::vector<int> input = digits_to_tokens(std::vector<int>{1});
    Rng rng(6);
    SampleResult stopped = policy.sample_sequence(input, 5, SampleMode::kGreedy, rng, true);
    CHECK(stopped.tokens.size() == 1);
    CHECK(stopped.tokens[0] == Vocab::kEos);
    SampleResult fixed = policy.sample_sequence(input, 5, SampleMode::kGreedy, rng, false);
    CHECK(fixed.tokens.size() == 5);
}
