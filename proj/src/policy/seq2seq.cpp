#include "seqlab/seq2seq.hpp"

#include <algorithm>
#include <cmath>

#include "seqlab/checkpoint.hpp"
#include "seqlab/errors.hpp"

namespace seqlab {

Seq2SeqPolicy::Seq2SeqPolicy(Vocab vocab, int hidden, uint64_t init_seed)
    : vocab_(std::move(vocab)), hidden_(hidden) {
    Rng rng(init_seed);
    Parameter& emb = params_.create("embedding", {vocab_.size(), hidden_});
    init_uniform(emb, rng, 0.08);
    encoder_ = GruCell::create(params_, "encoder", hidden_, hidden_, rng);
    decoder_ = GruCell::create(params_, "decoder", hidden_, hidden_, rng);
    Parameter& pw = params_.create("proj.w", {hidden_, vocab_.size()});
    init_uniform(pw, rng, 0.08);
    Parameter& pb = params_.create("proj.b", {vocab_.size()});
    init_uniform(pb, rng, 0.08);
    bind_cells();
}

Seq2SeqPolicy::Seq2SeqPolicy(const Seq2SeqPolicy& other)
    : vocab_(other.vocab_), hidden_(other.hidden_), params_(other.params_) {
    bind_cells();
}

Seq2SeqPolicy& Seq2SeqPolicy::operator=(const Seq2SeqPolicy& other) {
    if (this != &other) {
        vocab_ = other.vocab_;
        hidden_ = other.hidden_;
        params_ = other.params_;
        bind_cells();
    }
    return *this;
}

void Seq2SeqPolicy::bind_cells() {
    encoder_ = GruCell::bind(params_, "encoder", hidden_, hidden_);
    decoder_ = GruCell::bind(params_, "decoder", hidden_, hidden_);
    embedding_ = &params_.get("embedding");
    proj_w_ = &params_.get("proj.w");
    proj_b_ = &params_.get("proj.b");
}

void Seq2SeqPolicy::check_token(int token) const {
    if (token < 0 || token >= vocab_.size()) {
        throw DomainError("token id " + std::to_string(token) + " outside vocab of size " +
                          std::to_string(vocab_.size()));
    }
}

Var Seq2SeqPolicy::embed(LeafMap& leaves, int token) const {
    check_token(token);
    return leaves.tape().gather_row(leaves.get(*embedding_), token);
}

Var Seq2SeqPolicy::encode(LeafMap& leaves, std::span<const int> input) const {
    if (input.empty()) throw DomainError("encode: empty input");
    Tape& t = leaves.tape();
    Var h = t.constant(Tensor({hidden_}, 0.0));
    for (int token : input) h = encoder_.step(leaves, embed(leaves, token), h);
    return h;
}

Seq2SeqPolicy::DecodeStep Seq2SeqPolicy::decode_step(LeafMap& leaves, Var hidden,
                                                     int prev_token) const {
    Tape& t = leaves.tape();
    Var h = decoder_.step(leaves, embed(leaves, prev_token), hidden);
    Var logits = t.add(t.matmul(h, leaves.get(*proj_w_)), leaves.get(*proj_b_));
    return DecodeStep{t.softmax(logits), h};
}

std::vector<Var> Seq2SeqPolicy::sequence_log_prob_vars(LeafMap& leaves, std::span<const int> input,
                                                       std::span<const int> output) const {
    if (output.empty()) throw DomainError("sequence_log_probs: empty output");
    Tape& t = leaves.tape();
    Var h = encode(leaves, input);
    int prev = Vocab::kBos;
    std::vector<Var> log_probs;
    log_probs.reserve(output.size());
    for (int token : output) {
        check_token(token);
        DecodeStep step = decode_step(leaves, h, prev);
        log_probs.push_back(t.log(t.gather_row(step.probs, token)));
        h = step.hidden;
        prev = token;
    }
    return log_probs;
}

Var Seq2SeqPolicy::mle_loss(LeafMap& leaves, std::span<const TrainPair> batch) const {
    if (batch.empty()) throw DomainError("mle_loss: empty batch");
    Tape& t = leaves.tape();
    Var total = t.constant(0.0);
    int tokens = 0;
    for (const TrainPair& pair : batch) {
        std::vector<int> target(pair.reference.begin(), pair.reference.end());
        target.push_back(Vocab::kEos);
        for (Var lp : sequence_log_prob_vars(leaves, pair.input, target)) {
            total = t.add(total, lp);
            ++tokens;
        }
    }
    return t.scale(total, -1.0 / tokens);
}

Tensor Seq2SeqPolicy::encode_values(std::span<const int> input) const {
    Tape tape;
    LeafMap leaves(tape);
    return encode(leaves, input).val();
}

std::pair<Tensor, Tensor> Seq2SeqPolicy::decode_step_values(const Tensor& hidden,
                                                            int prev_token) const {
    Tape tape;
    LeafMap leaves(tape);
    DecodeStep step = decode_step(leaves, tape.constant(hidden), prev_token);
    return {step.probs.val(), step.hidden.val()};
}

SampleResult Seq2SeqPolicy::sample_sequence(std::span<const int> input, int max_len,
                                            SampleMode mode, Rng& rng, bool stop_on_eos) const {
    return sample_with_prefix(input, {}, max_len, mode, rng, stop_on_eos);
}

SampleResult Seq2SeqPolicy::sample_with_prefix(std::span<const int> input,
                                               std::span<const int> forced, int max_len,
                                               SampleMode mode, Rng& rng, bool stop_on_eos) const {
    if (max_len < 1) throw DomainError("sample_sequence: max_len must be >= 1");
    Tape tape;
    LeafMap leaves(tape);
    Var h = encode(leaves, input);
    int prev = Vocab::kBos;
    SampleResult result;
    for (int step_idx = 0; step_idx < max_len; ++step_idx) {
        DecodeStep step = decode_step(leaves, h, prev);
        const Tensor& probs = step.probs.val();
        int token;
        if (step_idx < static_cast<int>(forced.size())) {
            token = forced[static_cast<size_t>(step_idx)];
            check_token(token);
        } else if (mode == SampleMode::kGreedy) {
            token = 0;
            for (int i = 1; i < probs.numel(); ++i) {
                if (probs[i] > probs[token]) token = i;  // ties keep the lowest id
            }
        } else {
            token = rng.categorical(std::span<const double>(probs.data));
        }
        result.tokens.push_back(token);
        result.log_probs.push_back(std::log(probs[token]));
        result.states.push_back(step.hidden.val());
        h = step.hidden;
        prev = token;
        if (stop_on_eos && token == Vocab::kEos) break;
    }
    return result;
}

std::vector<double> Seq2SeqPolicy::sequence_log_probs(std::span<const int> input,
                                                      std::span<const int> output) const {
    Tape tape;
    LeafMap leaves(tape);
    std::vector<Var> vars = sequence_log_prob_vars(leaves, input, output);
    std::vector<double> out;
    out.reserve(vars.size());
    for (Var v : vars) out.push_back(v.item());
    return out;
}

void Seq2SeqPolicy::save(const std::string& path) const {
    nlohmann::json j = params_to_json(params_);
    j["format"] = "seqlab.model";
    j["kind"] = "policy";
    j["hidden"] = hidden_;
    j["vocab"] = vocab_.to_json();
    write_json_file(path, j);
}

Seq2SeqPolicy Seq2SeqPolicy::load(const std::string& path) {
    nlohmann::json j = load_json_file(path);
    if (j.value("format", "") != "seqlab.model" || j.value("kind", "") != "policy") {
        throw ParseError("'" + path + "' is not a policy checkpoint");
    }
    Seq2SeqPolicy policy;
    policy.vocab_ = Vocab::from_json(j.at("vocab"));
    policy.hidden_ = j.at("hidden").get<int>();
    j["format"] = "seqlab.params";
    params_from_json(j, policy.params_);
    policy.bind_cells();
    return policy;
}

MleReport mle_pretrain(Seq2SeqPolicy& policy, AdamOptimizer& opt,
                       const std::vector<TrainPair>& dataset, const MleConfig& cfg, Rng& rng,
                       const std::function<void(int, double)>& on_epoch) {
    if (dataset.empty()) throw DomainError("mle_pretrain: empty dataset");
    MleReport report;
    std::vector<size_t> order(dataset.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Tape tape;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        int batches = 0;
        std::vector<TrainPair> batch;
        for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
            batch.clear();
            size_t end = std::min(order.size(), start + cfg.batch_size);
            for (size_t i = start; i < end; ++i) batch.push_back(dataset[order[i]]);
            tape.reset();
            LeafMap leaves(tape);
            Var loss = policy.mle_loss(leaves, batch);
            tape.backward(loss);
            opt.step(policy.params());
            policy.params().zero_grads();
            loss_sum += loss.item();
            ++batches;
        }
        double mean = loss_sum / batches;
        report.epoch_mean_loss.push_back(mean);
        if (on_epoch) on_epoch(epoch, mean);
    }
    return report;
}

}  // namespace seqlab
