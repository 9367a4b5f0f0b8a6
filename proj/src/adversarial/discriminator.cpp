#include "seqlab/discriminator.hpp"

#include "seqlab/checkpoint.hpp"
#include "seqlab/errors.hpp"
#include "seqlab/vocab.hpp"

namespace seqlab {

Discriminator::Discriminator(int vocab_size, int embed_dim, int hidden, double lr,
                             uint64_t init_seed)
    : vocab_size_(vocab_size), embed_dim_(embed_dim), hidden_(hidden), opt_(lr) {
    Rng rng(init_seed);
    Parameter& emb = params_.create("disc.embedding", {vocab_size, embed_dim});
    init_uniform(emb, rng, 0.08);
    gru_ = GruCell::create(params_, "disc.gru", embed_dim, hidden, rng);
    Parameter& hw = params_.create("disc.head.w", {hidden, 1});
    init_uniform(hw, rng, 0.08);
    Parameter& hb = params_.create("disc.head.b", {1});
    init_uniform(hb, rng, 0.08);
    bind();
}

void Discriminator::bind() {
    embedding_ = &params_.get("disc.embedding");
    gru_ = GruCell::bind(params_, "disc.gru", embed_dim_, hidden_);
    head_w_ = &params_.get("disc.head.w");
    head_b_ = &params_.get("disc.head.b");
}

Var Discriminator::score_graph(LeafMap& leaves, std::span<const int> input,
                               std::span<const int> output) const {
    Tape& t = leaves.tape();
    std::vector<int> tokens(input.begin(), input.end());
    tokens.push_back(Vocab::kBos);
    tokens.insert(tokens.end(), output.begin(), output.end());
    Var h = t.constant(Tensor({hidden_}, 0.0));
    for (int token : tokens) {
        if (token < 0 || token >= vocab_size_) {
            throw DomainError("discriminator: token id " + std::to_string(token) +
                              " outside vocab of size " + std::to_string(vocab_size_));
        }
        Var x = t.gather_row(leaves.get(*embedding_), token);
        h = gru_.step(leaves, x, h);
    }
    Var logit = t.add(t.matmul(h, leaves.get(*head_w_)), leaves.get(*head_b_));
    // keep the score away from exact 0/1 so the BCE log stays in-domain
    return t.clip(t.sigmoid(logit), 1e-12, 1.0 - 1e-12);
}

double Discriminator::score(std::span<const int> input, std::span<const int> output) const {
    Tape tape;
    LeafMap leaves(tape);
    return score_graph(leaves, input, output).item();
}

Var Discriminator::loss_graph(LeafMap& leaves, std::span<const Episode> real,
                              std::span<const Episode> fake) const {
    if (real.empty() || fake.empty()) {
        throw DomainError("discriminator loss: real and fake batches must be non-empty");
    }
    Tape& t = leaves.tape();
    Var total = t.constant(0.0);
    for (const Episode& ep : real) {
        total = t.sub(total, t.log(score_graph(leaves, ep.input, ep.reference)));
    }
    Var one = t.constant(1.0);
    for (const Episode& ep : fake) {
        Var s = score_graph(leaves, ep.input, ep.reference);
        total = t.sub(total, t.log(t.sub(one, s)));
    }
    return t.scale(total, 1.0 / static_cast<double>(real.size() + fake.size()));
}

double Discriminator::train_step(std::span<const Episode> real, std::span<const Episode> fake) {
    Tape tape;
    LeafMap leaves(tape);
    Var loss = loss_graph(leaves, real, fake);
    tape.backward(loss);
    opt_.step(params_);
    params_.zero_grads();
    return loss.item();
}

void Discriminator::save(const std::string& path) const {
    nlohmann::json j = params_to_json(params_);
    j["format"] = "seqlab.model";
    j["kind"] = "discriminator";
    j["vocab_size"] = vocab_size_;
    j["embed_dim"] = embed_dim_;
    j["hidden"] = hidden_;
    write_json_file(path, j);
}

Discriminator Discriminator::load(const std::string& path) {
    nlohmann::json j = load_json_file(path);
    if (j.value("format", "") != "seqlab.model" || j.value("kind", "") != "discriminator") {
        throw ParseError("'" + path + "' is not a discriminator checkpoint");
    }
    Discriminator disc;
    disc.vocab_size_ = j.at("vocab_size").get<int>();
    disc.embed_dim_ = j.at("embed_dim").get<int>();
    disc.hidden_ = j.at("hidden").get<int>();
    j["format"] = "seqlab.params";
    params_from_json(j, disc.params_);
    disc.bind();
    return disc;
}

namespace {

std::vector<Episode> sample_fakes(Seq2SeqPolicy& generator, const std::vector<Episode>& reals,
                                  const RlIterationConfig& cfg, Rng& rng) {
    std::vector<Episode> fakes;
    fakes.reserve(reals.size());
    for (const Episode& ep : reals) {
        SampleResult s = generator.sample_sequence(ep.input, cfg.max_len, SampleMode::kSample, rng,
                                                   cfg.stop_on_eos);
        fakes.push_back(Episode{ep.input, std::move(s.tokens)});
    }
    return fakes;
}

std::vector<Episode> draw_reals(const EpisodeSource& episodes, int count, Rng& rng) {
    std::vector<Episode> reals;
    reals.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) reals.push_back(episodes(rng));
    return reals;
}

}  // namespace

SeqganMetrics seqgan_iteration(Seq2SeqPolicy& generator, ValueBaseline& baseline,
                               AdamOptimizer& gen_opt, Discriminator& disc,
                               const EpisodeSource& episodes, const RlIterationConfig& cfg,
                               int d_steps, int g_steps, Rng& rng, const RewardFn* judge) {
    SeqganMetrics metrics;
    for (int d = 0; d < d_steps; ++d) {
        std::vector<Episode> reals = draw_reals(episodes, cfg.batch_size, rng);
        std::vector<Episode> fakes = sample_fakes(generator, reals, cfg, rng);
        metrics.disc_loss = disc.train_step(reals, fakes);
    }
    RewardFn disc_reward = [&disc](std::span<const int> input, std::span<const int> output) {
        return disc.score(input, output);
    };
    double fake_score_sum = 0.0;
    for (int g = 0; g < g_steps; ++g) {
        metrics.generator =
            rl_train_iteration(generator, baseline, gen_opt, episodes, disc_reward, cfg, rng, judge);
        fake_score_sum += metrics.generator.mean_reward;
    }
    metrics.mean_fake_score = g_steps > 0 ? fake_score_sum / g_steps : 0.0;
    return metrics;
}

double pretrain_discriminator(Discriminator& disc, Seq2SeqPolicy& generator,
                              const EpisodeSource& episodes, const RlIterationConfig& cfg,
                              int steps, Rng& rng) {
    double loss = 0.0;
    for (int i = 0; i < steps; ++i) {
        std::vector<Episode> reals = draw_reals(episodes, cfg.batch_size, rng);
        std::vector<Episode> fakes = sample_fakes(generator, reals, cfg, rng);
        loss = disc.train_step(reals, fakes);
    }
    return loss;
}

}  // namespace seqlab
