// seqlab command-line interface. Thin layer over the C API: subcommands
// build the JSON experiment config (file + flag overrides) and hand it to
// libseqlab.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "seqlab.h"

namespace {

using nlohmann::json;

struct ConfigFlags {
    std::string config_path;
    std::string task;
    std::string algorithm;
    std::optional<uint64_t> seed;
    std::string out_dir;
    std::optional<int> hidden;
    std::string train_path;
    std::string test_path;
    std::optional<int> train_size;
    std::optional<int> test_size;
    std::optional<int> epochs;
    std::optional<int> iterations;
    std::optional<int> batch_size;
    std::optional<double> lr;
    std::string init_checkpoint;
    std::string seqgan_optimizer;
    std::optional<double> epsilon;
    std::optional<int> samples_per_input;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON experiment config file");
    cmd->add_option("--task", flags.task, "counting | corpus");
    cmd->add_option("--seed", flags.seed, "master seed");
    cmd->add_option("--out", flags.out_dir, "run output directory");
    cmd->add_option("--hidden", flags.hidden, "GRU hidden size");
    cmd->add_option("--train-data", flags.train_path, "training corpus file");
    cmd->add_option("--test-data", flags.test_path, "test corpus file");
    cmd->add_option("--train-size", flags.train_size, "generated training set size");
    cmd->add_option("--test-size", flags.test_size, "generated test set size");
    cmd->add_option("--epochs", flags.epochs, "MLE epochs");
    cmd->add_option("--iterations", flags.iterations, "RL iterations");
    cmd->add_option("--batch-size", flags.batch_size, "batch size (MLE and RL)");
    cmd->add_option("--lr", flags.lr, "learning rate override");
    cmd->add_option("--init", flags.init_checkpoint, "pretrain checkpoint for RL algorithms");
    cmd->add_option("--seqgan-optimizer", flags.seqgan_optimizer,
                    "generator update under seqgan: pg | ppo | ppo_dynamic");
    cmd->add_option("--epsilon", flags.epsilon, "fixed clipping bound");
    cmd->add_option("--eval-samples", flags.samples_per_input, "sampled decodes per test input");
}

json build_config(const ConfigFlags& flags) {
    json cfg = json::object();
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in) throw std::runtime_error("cannot open config '" + flags.config_path + "'");
        in >> cfg;
    }
    auto section = [&cfg](const char* name) -> json& {
        if (!cfg.contains(name)) cfg[name] = json::object();
        return cfg[name];
    };
    if (!flags.task.empty()) cfg["task"] = flags.task;
    if (!flags.algorithm.empty()) cfg["algorithm"] = flags.algorithm;
    if (flags.seed) cfg["seed"] = *flags.seed;
    if (!flags.out_dir.empty()) cfg["out_dir"] = flags.out_dir;
    if (flags.hidden) section("model")["hidden"] = *flags.hidden;
    if (!flags.train_path.empty()) section("data")["train_path"] = flags.train_path;
    if (!flags.test_path.empty()) section("data")["test_path"] = flags.test_path;
    if (flags.train_size) section("data")["train_size"] = *flags.train_size;
    if (flags.test_size) section("data")["test_size"] = *flags.test_size;
    if (flags.epochs) section("mle")["epochs"] = *flags.epochs;
    if (flags.iterations) section("rl")["iterations"] = *flags.iterations;
    if (flags.batch_size) {
        section("mle")["batch_size"] = *flags.batch_size;
        section("rl")["batch_size"] = *flags.batch_size;
    }
    if (flags.lr) {
        section("mle")["lr"] = *flags.lr;
        section("rl")["lr"] = *flags.lr;
    }
    if (!flags.init_checkpoint.empty()) section("rl")["init_checkpoint"] = flags.init_checkpoint;
    if (!flags.seqgan_optimizer.empty()) section("seqgan")["optimizer"] = flags.seqgan_optimizer;
    if (flags.epsilon) section("clip")["epsilon"] = *flags.epsilon;
    if (flags.samples_per_input) section("eval")["samples_per_input"] = *flags.samples_per_input;
    return cfg;
}

int fail(seqlab_ctx* ctx, seqlab_status status) {
    std::cerr << "error (" << status << "): " << seqlab_last_error(ctx) << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"seqlab: policy optimization for conditional sequence generation"};
    app.require_subcommand(1);

    seqlab_ctx* ctx = seqlab_ctx_new();

    // generate
    auto* gen = app.add_subcommand("generate", "write a dataset file");
    std::string gen_task = "counting";
    uint64_t gen_seed = 1;
    int gen_size = 50000;
    int gen_max_n = 10;
    std::string gen_out;
    gen->add_option("--task", gen_task, "counting | corpus");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--size", gen_size, "number of lines");
    gen->add_option("--max-n", gen_max_n, "counting input length bound");
    gen->add_option("--out", gen_out, "output file")->required();

    // pretrain / train
    ConfigFlags pretrain_flags;
    auto* pretrain = app.add_subcommand("pretrain", "maximum-likelihood pretraining");
    add_config_flags(pretrain, pretrain_flags);

    ConfigFlags train_flags;
    auto* train = app.add_subcommand("train", "train with the configured algorithm");
    train->add_option("--algorithm", train_flags.algorithm,
                      "mle | reinforce | mixer | ppo | ppo_dynamic | seqgan");
    add_config_flags(train, train_flags);

    // eval
    ConfigFlags eval_flags;
    std::string eval_checkpoint;
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    eval->add_option("--checkpoint", eval_checkpoint, "model checkpoint")->required();
    add_config_flags(eval, eval_flags);

    // curves
    auto* curves = app.add_subcommand("curves", "merge metrics streams into a CSV");
    std::vector<std::string> curve_inputs;
    std::string curve_metric = "auto";
    std::string curve_out;
    curves->add_option("inputs", curve_inputs, "metrics.jsonl files (label=path or path)")
        ->required();
    curves->add_option("--metric", curve_metric, "precision | bleu2 | mean_reward | auto");
    curves->add_option("--out", curve_out, "output CSV (stdout when omitted)");

    // verify-kl
    auto* verify = app.add_subcommand("verify-kl", "trust-region bound vs exact KL table");
    bool verify_json = false;
    verify->add_flag("--json", verify_json, "print the raw JSON table");

    CLI11_PARSE(app, argc, argv);

    int rc = 0;
    if (gen->parsed()) {
        seqlab_status s =
            seqlab_generate(ctx, gen_task.c_str(), gen_seed, gen_size, gen_out.c_str(), gen_max_n);
        if (s != SEQLAB_OK) rc = fail(ctx, s);
        else std::cout << "wrote " << gen_out << "\n";
    } else if (pretrain->parsed() || train->parsed()) {
        ConfigFlags& flags = pretrain->parsed() ? pretrain_flags : train_flags;
        if (pretrain->parsed()) flags.algorithm = "mle";
        json cfg = build_config(flags);
        if (!cfg.contains("algorithm") && train->parsed()) {
            std::cerr << "error: --algorithm (or a config file) is required\n";
            rc = 1;
        } else {
            char* checkpoint = nullptr;
            seqlab_status s = seqlab_train(ctx, cfg.dump().c_str(), &checkpoint);
            if (s != SEQLAB_OK) {
                rc = fail(ctx, s);
            } else {
                std::cout << "checkpoint: " << checkpoint << "\n";
                seqlab_string_free(checkpoint);
            }
        }
    } else if (eval->parsed()) {
        json cfg = build_config(eval_flags);
        char* report = nullptr;
        seqlab_status s = seqlab_eval(ctx, eval_checkpoint.c_str(), cfg.dump().c_str(), &report);
        if (s != SEQLAB_OK) {
            rc = fail(ctx, s);
        } else {
            std::cout << report << "\n";
            seqlab_string_free(report);
        }
    } else if (curves->parsed()) {
        std::vector<std::string> labels, paths;
        for (const std::string& spec : curve_inputs) {
            size_t eq = spec.find('=');
            if (eq == std::string::npos) {
                labels.push_back(spec);
                paths.push_back(spec);
            } else {
                labels.push_back(spec.substr(0, eq));
                paths.push_back(spec.substr(eq + 1));
            }
        }
        std::vector<const char*> label_ptrs, path_ptrs;
        for (size_t i = 0; i < labels.size(); ++i) {
            label_ptrs.push_back(labels[i].c_str());
            path_ptrs.push_back(paths[i].c_str());
        }
        char* csv = nullptr;
        seqlab_status s = seqlab_curves(ctx, label_ptrs.data(), path_ptrs.data(),
                                        static_cast<int>(labels.size()), curve_metric.c_str(), &csv);
        if (s != SEQLAB_OK) {
            rc = fail(ctx, s);
        } else {
            if (curve_out.empty()) {
                std::cout << csv;
            } else {
                std::ofstream out(curve_out);
                out << csv;
                std::cout << "wrote " << curve_out << "\n";
            }
            seqlab_string_free(csv);
        }
    } else if (verify->parsed()) {
        char* table = nullptr;
        seqlab_status s = seqlab_verify_kl(ctx, &table);
        if (table != nullptr) {
            json t = json::parse(table);
            if (verify_json) {
                std::cout << table << "\n";
            } else {
                // compact fixed-width table
                std::ostringstream os;
                os << "p_old\tdelta\talpha_max\texact_kl\trel_err\tok\n";
                for (const auto& row : t.at("rows")) {
                    os << row.at("p_old").get<double>() << "\t" << row.at("delta").get<double>()
                       << "\t" << row.at("alpha").get<double>() << "\t"
                       << row.at("exact_kl").get<double>() << "\t" << row.at("rel_err").get<double>()
                       << "\t" << (row.at("pass").get<bool>() ? "yes" : "NO") << "\n";
                }
                os << (t.at("pass").get<bool>() ? "PASS" : "FAIL") << "\n";
                std::cout << os.str();
            }
            seqlab_string_free(table);
        }
        if (s != SEQLAB_OK) rc = fail(ctx, s);
    }

    seqlab_ctx_free(ctx);
    return rc;
}
