#include "seqlab/runner.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>

#include "seqlab/bleu.hpp"
#include "seqlab/checkpoint.hpp"
#include "seqlab/counting.hpp"
#include "seqlab/discriminator.hpp"
#include "seqlab/errors.hpp"
#include "seqlab/evaluate.hpp"
#include "seqlab/generate.hpp"
#include "seqlab/klbound.hpp"
#include "seqlab/train.hpp"

namespace seqlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Single-writer JSON-lines stream.
class MetricsWriter {
public:
    explicit MetricsWriter(const std::string& path) : out_(path) {
        if (!out_) throw IoError("cannot open '" + path + "' for writing");
    }
    void write(const json& j) { out_ << j.dump() << "\n"; }
    void flush() { out_.flush(); }

private:
    std::ofstream out_;
};

struct TaskData {
    Vocab vocab;
    std::vector<TrainPair> train_pairs;
    std::vector<TrainPair> test_pairs;        // counting
    std::vector<ReferenceSet> train_sets;     // corpus
    std::vector<ReferenceSet> test_sets;      // corpus
};

TaskData load_task_data(const ExperimentConfig& cfg) {
    TaskData data;
    if (cfg.task == "counting") {
        data.vocab = Vocab::counting();
        if (!cfg.data.train_path.empty()) {
            data.train_pairs =
                load_corpus_with_vocab_pairs(cfg.data.train_path, data.vocab);
        } else {
            data.train_pairs =
                make_counting_dataset(cfg.data.train_seed, cfg.data.train_size, cfg.data.max_n);
        }
        if (!cfg.data.test_path.empty()) {
            data.test_pairs = load_corpus_with_vocab_pairs(cfg.data.test_path, data.vocab);
        } else {
            data.test_pairs =
                make_counting_dataset(cfg.data.test_seed, cfg.data.test_size, cfg.data.max_n);
        }
    } else {
        Corpus corpus = load_corpus(cfg.data.train_path);
        data.vocab = corpus.vocab;
        data.train_pairs = corpus.line_pairs;
        data.train_sets = corpus.sets;
        std::string test_path =
            cfg.data.test_path.empty() ? cfg.data.train_path : cfg.data.test_path;
        data.test_sets = load_corpus_with_vocab(test_path, data.vocab);
    }
    return data;
}

/// Reward oracle for the configured task: counting correctness or smoothed
/// BLEU-2 against the input's reference set.
RewardFn make_reward(const ExperimentConfig& cfg, const TaskData& data) {
    if (cfg.task == "counting") {
        return [](std::span<const int> input, std::span<const int> output) {
            return counting_correct_tokens(input, output) ? 1.0 : 0.0;
        };
    }
    // index reference sets by input tokens
    auto index = std::make_shared<std::map<std::vector<int>, const ReferenceSet*>>();
    for (const ReferenceSet& set : data.train_sets) {
        (*index)[set.input] = &set;
    }
    return [index](std::span<const int> input, std::span<const int> output) {
        auto it = index->find(std::vector<int>(input.begin(), input.end()));
        if (it == index->end()) throw StateError("no references for sampled input");
        std::vector<int> words = strip_eos(output);
        if (words.empty()) return 0.0;
        return bleu2(words, it->second->references, /*smoothed=*/true);
    };
}

EpisodeSource make_episode_source(const ExperimentConfig& cfg, const TaskData& data) {
    if (cfg.task == "counting") {
        int max_n = cfg.data.max_n;
        return [max_n](Rng& rng) {
            CountingInstance inst = gen_counting_instance(rng, max_n);
            Episode ep;
            ep.input = digits_to_tokens(inst.digits);
            ep.reference = digits_to_tokens(std::span<const int>(inst.reference));
            return ep;
        };
    }
    auto sets = std::make_shared<std::vector<ReferenceSet>>(data.train_sets);
    return [sets](Rng& rng) {
        const ReferenceSet& set =
            (*sets)[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(sets->size()) - 1))];
        Episode ep;
        ep.input = set.input;
        ep.reference = set.references[static_cast<size_t>(
            rng.uniform_int(0, static_cast<int>(set.references.size()) - 1))];
        return ep;
    };
}

json evaluate_checkpointed(const ExperimentConfig& cfg, const Seq2SeqPolicy& policy,
                           const TaskData& data, uint64_t eval_seed) {
    if (cfg.task == "counting") {
        return evaluate_counting(policy, data.test_pairs, cfg.eval.samples_per_input, eval_seed)
            .to_json();
    }
    return evaluate_corpus(policy, data.test_sets, cfg.eval.samples_per_input, eval_seed,
                           cfg.max_len())
        .to_json();
}

std::string checkpoint_name(int iteration) {
    std::ostringstream os;
    os << "checkpoint_" << std::setw(6) << std::setfill('0') << iteration << ".json";
    return os.str();
}

void write_eval_artifacts(const ExperimentConfig& cfg, const Seq2SeqPolicy& policy,
                          const TaskData& data, uint64_t eval_seed, json& out) {
    if (cfg.task == "counting") {
        CountingEvalReport report =
            evaluate_counting(policy, data.test_pairs, cfg.eval.samples_per_input, eval_seed);
        out = report.to_json();
        if (!cfg.out_dir.empty()) {
            std::ofstream fo(fs::path(cfg.out_dir) / "first_output.csv");
            fo << report.first_output_csv();
            std::ofstream var(fs::path(cfg.out_dir) / "variance.csv");
            var << report.variance_csv();
        }
    } else {
        out = evaluate_corpus(policy, data.test_sets, cfg.eval.samples_per_input, eval_seed,
                              cfg.max_len())
                  .to_json();
    }
    if (!cfg.out_dir.empty()) {
        write_json_file((fs::path(cfg.out_dir) / "eval.json").string(), out);
    }
}

/// Full test-set evaluation merged into a metrics record (eval.interval).
void add_periodic_eval(const ExperimentConfig& cfg, const Seq2SeqPolicy& policy,
                       const TaskData& data, int index, json& record) {
    uint64_t eval_seed = Rng::derive(cfg.seed, 1000 + static_cast<uint64_t>(index));
    if (cfg.task == "counting") {
        record["eval_precision"] =
            evaluate_counting(policy, data.test_pairs, cfg.eval.samples_per_input, eval_seed)
                .precision;
    } else {
        record["eval_bleu2"] = evaluate_corpus(policy, data.test_sets, cfg.eval.samples_per_input,
                                               eval_seed, cfg.max_len())
                                   .bleu2_sampled;
    }
}

RunResult run_mle(const ExperimentConfig& cfg, const TaskData& data, MetricsWriter& metrics) {
    Seq2SeqPolicy policy(data.vocab, cfg.resolved_hidden(), Rng::derive(cfg.seed, 0));
    AdamOptimizer opt(cfg.mle.lr);
    Rng train_rng(Rng::derive(cfg.seed, 1));
    MleConfig mle_cfg{cfg.mle.epochs, cfg.mle.batch_size, cfg.mle.lr};
    mle_pretrain(policy, opt, data.train_pairs, mle_cfg, train_rng,
                 [&](int epoch, double loss) {
                     json record{{"iteration", epoch}, {"loss", loss}};
                     if (cfg.eval.interval > 0 && (epoch + 1) % cfg.eval.interval == 0) {
                         add_periodic_eval(cfg, policy, data, epoch, record);
                     }
                     metrics.write(record);
                     metrics.flush();
                 });
    RunResult result;
    result.checkpoint_path = (fs::path(cfg.out_dir) / "checkpoint.json").string();
    policy.save(result.checkpoint_path);
    write_eval_artifacts(cfg, policy, data, Rng::derive(cfg.seed, 2), result.final_eval);
    return result;
}

json iteration_record(const ExperimentConfig& cfg, int iteration, const IterationMetrics& m) {
    json record{{"iteration", iteration},
                {"mean_reward", m.mean_reward},
                {"mean_ratio", m.mean_ratio},
                {"clip_fraction", m.clip_fraction},
                {"kl_estimate", m.kl_estimate},
                {"loss", m.loss},
                {"baseline_loss", m.baseline_loss}};
    if (cfg.task == "counting") {
        record["precision"] = m.task_precision;
    } else {
        record["bleu2"] = m.mean_reward;  // terminal reward is smoothed BLEU-2
    }
    return record;
}

RunResult run_rl(const ExperimentConfig& cfg, const TaskData& data, MetricsWriter& metrics) {
    if (cfg.rl.init_checkpoint.empty()) {
        throw StateError("algorithm '" + cfg.algorithm +
                         "' requires rl.init_checkpoint (pretrain first)");
    }
    Seq2SeqPolicy policy = Seq2SeqPolicy::load(cfg.rl.init_checkpoint);
    if (!(policy.vocab() == data.vocab)) {
        throw StateError("checkpoint vocab does not match the task vocab");
    }
    ValueBaseline baseline(policy.hidden(), cfg.baseline.hidden, cfg.baseline.lr,
                           Rng::derive(cfg.seed, 3));
    AdamOptimizer opt(cfg.rl.lr);
    Rng train_rng(Rng::derive(cfg.seed, 1));

    RlIterationConfig it_cfg;
    it_cfg.batch_size = cfg.rl.batch_size;
    it_cfg.ppo_epochs = cfg.rl.ppo_epochs;
    it_cfg.gamma = cfg.rl.gamma;
    it_cfg.kind = surrogate_for(cfg.algorithm, cfg.seqgan.optimizer);
    it_cfg.clip = cfg.clip;
    it_cfg.normalize_advantages = cfg.rl.normalize_advantages;
    it_cfg.max_len = cfg.max_len();
    it_cfg.stop_on_eos = cfg.stop_on_eos();

    EpisodeSource episodes = make_episode_source(cfg, data);
    RewardFn reward = make_reward(cfg, data);
    RewardFn judge = [](std::span<const int> input, std::span<const int> output) {
        return counting_correct_tokens(input, output) ? 1.0 : 0.0;
    };
    const RewardFn* judge_ptr = cfg.task == "counting" ? &judge : nullptr;

    for (int iteration = 0; iteration < cfg.rl.iterations; ++iteration) {
        if (cfg.algorithm == "mixer") {
            int epoch = iteration / cfg.mixer.iters_per_epoch;
            it_cfg.supervised_prefix = mixer_prefix_len(epoch, cfg.max_len(), cfg.mixer.anneal_epochs);
        }
        IterationMetrics m = rl_train_iteration(policy, baseline, opt, episodes, reward, it_cfg,
                                                train_rng, judge_ptr);
        json record = iteration_record(cfg, iteration, m);
        if (cfg.eval.interval > 0 && (iteration + 1) % cfg.eval.interval == 0) {
            add_periodic_eval(cfg, policy, data, iteration, record);
        }
        metrics.write(record);
        metrics.flush();
        if (cfg.checkpoint_interval > 0 && (iteration + 1) % cfg.checkpoint_interval == 0) {
            policy.save((fs::path(cfg.out_dir) / checkpoint_name(iteration + 1)).string());
        }
    }

    RunResult result;
    result.checkpoint_path = (fs::path(cfg.out_dir) / "checkpoint.json").string();
    policy.save(result.checkpoint_path);
    write_eval_artifacts(cfg, policy, data, Rng::derive(cfg.seed, 2), result.final_eval);
    return result;
}

RunResult run_seqgan(const ExperimentConfig& cfg, const TaskData& data, MetricsWriter& metrics) {
    if (cfg.rl.init_checkpoint.empty()) {
        throw StateError("seqgan requires rl.init_checkpoint (pretrain first)");
    }
    Seq2SeqPolicy policy = Seq2SeqPolicy::load(cfg.rl.init_checkpoint);
    if (!(policy.vocab() == data.vocab)) {
        throw StateError("checkpoint vocab does not match the task vocab");
    }
    ValueBaseline baseline(policy.hidden(), cfg.baseline.hidden, cfg.baseline.lr,
                           Rng::derive(cfg.seed, 3));
    AdamOptimizer opt(cfg.rl.lr);
    Discriminator disc(data.vocab.size(), cfg.seqgan.disc_embed, cfg.seqgan.disc_hidden,
                       cfg.seqgan.disc_lr, Rng::derive(cfg.seed, 4));
    Rng train_rng(Rng::derive(cfg.seed, 1));

    RlIterationConfig it_cfg;
    it_cfg.batch_size = cfg.rl.batch_size;
    it_cfg.ppo_epochs = cfg.rl.ppo_epochs;
    it_cfg.gamma = cfg.rl.gamma;
    it_cfg.kind = surrogate_for(cfg.algorithm, cfg.seqgan.optimizer);
    it_cfg.clip = cfg.clip;
    it_cfg.normalize_advantages = cfg.rl.normalize_advantages;
    it_cfg.max_len = cfg.max_len();
    it_cfg.stop_on_eos = cfg.stop_on_eos();

    EpisodeSource episodes = make_episode_source(cfg, data);
    RewardFn judge = [](std::span<const int> input, std::span<const int> output) {
        return counting_correct_tokens(input, output) ? 1.0 : 0.0;
    };
    const RewardFn* judge_ptr = cfg.task == "counting" ? &judge : nullptr;

    pretrain_discriminator(disc, policy, episodes, it_cfg, cfg.seqgan.disc_pretrain_steps,
                           train_rng);
    for (int iteration = 0; iteration < cfg.rl.iterations; ++iteration) {
        SeqganMetrics m = seqgan_iteration(policy, baseline, opt, disc, episodes, it_cfg,
                                           cfg.seqgan.d_steps, cfg.seqgan.g_steps, train_rng,
                                           judge_ptr);
        json record = iteration_record(cfg, iteration, m.generator);
        record["disc_loss"] = m.disc_loss;
        record["mean_fake_score"] = m.mean_fake_score;
        metrics.write(record);
        if (cfg.checkpoint_interval > 0 && (iteration + 1) % cfg.checkpoint_interval == 0) {
            policy.save((fs::path(cfg.out_dir) / checkpoint_name(iteration + 1)).string());
        }
    }
    metrics.flush();

    RunResult result;
    result.checkpoint_path = (fs::path(cfg.out_dir) / "checkpoint.json").string();
    policy.save(result.checkpoint_path);
    disc.save((fs::path(cfg.out_dir) / "discriminator.json").string());
    write_eval_artifacts(cfg, policy, data, Rng::derive(cfg.seed, 2), result.final_eval);
    return result;
}

}  // namespace

void run_generate(const std::string& task, uint64_t seed, int size, const std::string& out_path,
                  int max_n) {
    if (task == "counting") {
        generate_counting_file(out_path, seed, size, max_n);
    } else if (task == "corpus") {
        generate_toy_corpus_file(out_path, seed, size);
    } else {
        throw ConfigError("unknown task '" + task + "'");
    }
}

RunResult run_train(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.out_dir.empty()) throw ConfigError("out_dir is required");
    fs::create_directories(cfg.out_dir);
    write_json_file((fs::path(cfg.out_dir) / "config.json").string(), cfg.to_json());

    TaskData data = load_task_data(cfg);
    MetricsWriter metrics((fs::path(cfg.out_dir) / "metrics.jsonl").string());

    RunResult result;
    if (cfg.algorithm == "mle") {
        result = run_mle(cfg, data, metrics);
    } else if (cfg.algorithm == "seqgan") {
        result = run_seqgan(cfg, data, metrics);
    } else {
        result = run_rl(cfg, data, metrics);
    }
    result.metrics_path = (fs::path(cfg.out_dir) / "metrics.jsonl").string();
    return result;
}

nlohmann::json run_eval(const std::string& checkpoint_path, const ExperimentConfig& cfg) {
    Seq2SeqPolicy policy = Seq2SeqPolicy::load(checkpoint_path);
    TaskData data = load_task_data(cfg);
    if (!(policy.vocab() == data.vocab)) {
        throw StateError("checkpoint vocab does not match the task vocab");
    }
    json out;
    if (!cfg.out_dir.empty()) fs::create_directories(cfg.out_dir);
    write_eval_artifacts(cfg, policy, data, Rng::derive(cfg.seed, 2), out);
    return out;
}

nlohmann::json run_verify_kl() {
    const std::vector<double> p_olds = {0.05, 0.1, 0.3, 0.5, 0.8};
    const std::vector<double> deltas = {1e-6, 1e-5, 5e-5};
    std::vector<KlVerifyRow> rows = kl_bound_verification_table(p_olds, deltas);
    bool pass = true;
    json out_rows = json::array();
    for (const KlVerifyRow& row : rows) {
        bool row_ok = row.rel_err <= 0.10;
        pass = pass && row_ok;
        out_rows.push_back({{"p_old", row.p_old},
                            {"delta", row.delta},
                            {"alpha", row.alpha},
                            {"exact_kl", row.exact_kl},
                            {"rel_err", row.rel_err},
                            {"pass", row_ok}});
    }
    // error must shrink as delta shrinks, per p_old
    for (double p : p_olds) {
        std::vector<double> errs;
        for (const KlVerifyRow& row : rows) {
            if (row.p_old == p) errs.push_back(row.rel_err);  // deltas ascend per p
        }
        for (size_t i = 1; i < errs.size(); ++i) {
            if (errs[i - 1] > errs[i]) pass = false;
        }
    }
    return json{{"rows", out_rows}, {"pass", pass}};
}

std::string format_verify_kl(const nlohmann::json& table) {
    std::ostringstream os;
    os << std::setw(8) << "p_old" << std::setw(12) << "delta" << std::setw(14) << "alpha_max"
       << std::setw(16) << "exact_kl" << std::setw(12) << "rel_err" << std::setw(8) << "ok"
       << "\n";
    for (const auto& row : table.at("rows")) {
        os << std::setw(8) << row.at("p_old").get<double>() << std::setw(12)
           << row.at("delta").get<double>() << std::setw(14) << row.at("alpha").get<double>()
           << std::setw(16) << row.at("exact_kl").get<double>() << std::setw(12)
           << row.at("rel_err").get<double>() << std::setw(8)
           << (row.at("pass").get<bool>() ? "yes" : "NO") << "\n";
    }
    os << (table.at("pass").get<bool>() ? "PASS" : "FAIL")
       << ": exact KL within 10% of delta at the bound, error shrinking with delta\n";
    return os.str();
}

}  // namespace seqlab
