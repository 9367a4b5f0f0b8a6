#include "seqlab/config.hpp"

#include <cmath>
#include <set>

#include "seqlab/checkpoint.hpp"
#include "seqlab/errors.hpp"

namespace seqlab {

using nlohmann::json;

namespace {

json inf_aware(double v) {
    if (std::isinf(v)) return json("inf");
    return json(v);
}

double parse_inf_aware(const json& j, const char* field) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        throw ConfigError(std::string("clip.") + field + ": expected a number or \"inf\"");
    }
    return j.get<double>();
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ClipConfig default_clip(const std::string& algorithm, const std::string& seqgan_optimizer) {
    ClipConfig clip;
    if (algorithm == "seqgan" && seqgan_optimizer == "ppo_dynamic") {
        clip.alpha1 = 10.0;
        clip.beta1 = 0.5;
        clip.alpha2 = 0.2;
        clip.beta2 = 0.2;
    }
    return clip;
}

SurrogateKind surrogate_for(const std::string& algorithm, const std::string& seqgan_optimizer) {
    std::string key = algorithm == "seqgan" ? seqgan_optimizer : algorithm;
    if (key == "ppo") return SurrogateKind::kPpoFixed;
    if (key == "ppo_dynamic") return SurrogateKind::kPpoDynamic;
    return SurrogateKind::kReinforce;  // reinforce, mixer, pg
}

int ExperimentConfig::resolved_hidden() const {
    if (model.hidden > 0) return model.hidden;
    return task == "counting" ? 128 : 512;
}

void ExperimentConfig::validate() const {
    static const std::set<std::string> kTasks = {"counting", "corpus"};
    static const std::set<std::string> kAlgos = {"mle", "reinforce", "mixer",
                                                 "ppo", "ppo_dynamic", "seqgan"};
    static const std::set<std::string> kGanOpt = {"pg", "ppo", "ppo_dynamic"};
    if (!kTasks.count(task)) throw ConfigError("unknown task '" + task + "'");
    if (!kAlgos.count(algorithm)) throw ConfigError("unknown algorithm '" + algorithm + "'");
    if (algorithm == "seqgan" && !kGanOpt.count(seqgan.optimizer)) {
        throw ConfigError("unknown seqgan optimizer '" + seqgan.optimizer + "'");
    }
    if (resolved_hidden() < 1) throw ConfigError("model.hidden must be positive");
    if (task == "corpus" && data.train_path.empty()) {
        throw ConfigError("corpus task requires data.train_path");
    }
    if (data.max_n < 1 || data.max_n > 10) throw ConfigError("data.max_n must be in [1,10]");
    if (mle.epochs < 0 || mle.batch_size < 1 || mle.lr <= 0.0) {
        throw ConfigError("invalid mle section");
    }
    if (rl.iterations < 0 || rl.batch_size < 1 || rl.lr < 0.0 || rl.ppo_epochs < 1) {
        throw ConfigError("invalid rl section");
    }
    if (rl.gamma < 0.0 || rl.gamma > 1.0) throw ConfigError("rl.gamma must be in [0,1]");
    clip.validate();
    if (mixer.anneal_epochs < 1 || mixer.iters_per_epoch < 1) {
        throw ConfigError("invalid mixer section");
    }
    if (seqgan.d_steps < 0 || seqgan.g_steps < 1 || seqgan.disc_pretrain_steps < 0 ||
        seqgan.disc_embed < 1 || seqgan.disc_hidden < 1 || seqgan.disc_lr <= 0.0) {
        throw ConfigError("invalid seqgan section");
    }
    if (baseline.hidden < 1 || baseline.lr <= 0.0) throw ConfigError("invalid baseline section");
    if (eval.samples_per_input < 1 || eval.interval < 0) throw ConfigError("invalid eval section");
    if (checkpoint_interval < 0) throw ConfigError("checkpoint_interval must be >= 0");
}

json ExperimentConfig::to_json() const {
    json j;
    j["task"] = task;
    j["algorithm"] = algorithm;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    j["model"] = {{"hidden", resolved_hidden()}};
    j["data"] = {{"train_path", data.train_path}, {"test_path", data.test_path},
                 {"train_size", data.train_size}, {"test_size", data.test_size},
                 {"train_seed", data.train_seed}, {"test_seed", data.test_seed},
                 {"max_n", data.max_n}};
    j["mle"] = {{"epochs", mle.epochs}, {"batch_size", mle.batch_size}, {"lr", mle.lr}};
    j["rl"] = {{"iterations", rl.iterations},       {"batch_size", rl.batch_size},
               {"lr", rl.lr},                       {"gamma", rl.gamma},
               {"ppo_epochs", rl.ppo_epochs},       {"normalize_advantages", rl.normalize_advantages},
               {"init_checkpoint", rl.init_checkpoint}};
    j["clip"] = {{"epsilon", clip.epsilon},
                 {"alpha1", inf_aware(clip.alpha1)},
                 {"beta1", inf_aware(clip.beta1)},
                 {"alpha2", clip.alpha2},
                 {"beta2", clip.beta2}};
    j["mixer"] = {{"anneal_epochs", mixer.anneal_epochs},
                  {"iters_per_epoch", mixer.iters_per_epoch}};
    j["seqgan"] = {{"optimizer", seqgan.optimizer},
                   {"d_steps", seqgan.d_steps},
                   {"g_steps", seqgan.g_steps},
                   {"disc_pretrain_steps", seqgan.disc_pretrain_steps},
                   {"disc_embed", seqgan.disc_embed},
                   {"disc_hidden", seqgan.disc_hidden},
                   {"disc_lr", seqgan.disc_lr}};
    j["baseline"] = {{"hidden", baseline.hidden}, {"lr", baseline.lr}};
    j["eval"] = {{"samples_per_input", eval.samples_per_input}, {"interval", eval.interval}};
    j["checkpoint_interval"] = checkpoint_interval;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig cfg;
    read(j, "task", cfg.task);
    read(j, "algorithm", cfg.algorithm);
    read(j, "seed", cfg.seed);
    read(j, "out_dir", cfg.out_dir);
    if (j.contains("model")) read(j.at("model"), "hidden", cfg.model.hidden);
    if (j.contains("data")) {
        const json& d = j.at("data");
        read(d, "train_path", cfg.data.train_path);
        read(d, "test_path", cfg.data.test_path);
        read(d, "train_size", cfg.data.train_size);
        read(d, "test_size", cfg.data.test_size);
        read(d, "train_seed", cfg.data.train_seed);
        read(d, "test_seed", cfg.data.test_seed);
        read(d, "max_n", cfg.data.max_n);
    }
    if (j.contains("mle")) {
        const json& m = j.at("mle");
        read(m, "epochs", cfg.mle.epochs);
        read(m, "batch_size", cfg.mle.batch_size);
        read(m, "lr", cfg.mle.lr);
    }
    if (j.contains("rl")) {
        const json& r = j.at("rl");
        read(r, "iterations", cfg.rl.iterations);
        read(r, "batch_size", cfg.rl.batch_size);
        read(r, "lr", cfg.rl.lr);
        read(r, "gamma", cfg.rl.gamma);
        read(r, "ppo_epochs", cfg.rl.ppo_epochs);
        read(r, "normalize_advantages", cfg.rl.normalize_advantages);
        read(r, "init_checkpoint", cfg.rl.init_checkpoint);
    }
    if (j.contains("seqgan")) {
        const json& s = j.at("seqgan");
        read(s, "optimizer", cfg.seqgan.optimizer);
        read(s, "d_steps", cfg.seqgan.d_steps);
        read(s, "g_steps", cfg.seqgan.g_steps);
        read(s, "disc_pretrain_steps", cfg.seqgan.disc_pretrain_steps);
        read(s, "disc_embed", cfg.seqgan.disc_embed);
        read(s, "disc_hidden", cfg.seqgan.disc_hidden);
        read(s, "disc_lr", cfg.seqgan.disc_lr);
    }
    cfg.clip = default_clip(cfg.algorithm, cfg.seqgan.optimizer);
    if (j.contains("clip")) {
        const json& c = j.at("clip");
        read(c, "epsilon", cfg.clip.epsilon);
        if (c.contains("alpha1")) cfg.clip.alpha1 = parse_inf_aware(c.at("alpha1"), "alpha1");
        if (c.contains("beta1")) cfg.clip.beta1 = parse_inf_aware(c.at("beta1"), "beta1");
        read(c, "alpha2", cfg.clip.alpha2);
        read(c, "beta2", cfg.clip.beta2);
    }
    if (j.contains("mixer")) {
        const json& m = j.at("mixer");
        read(m, "anneal_epochs", cfg.mixer.anneal_epochs);
        read(m, "iters_per_epoch", cfg.mixer.iters_per_epoch);
    }
    if (j.contains("baseline")) {
        const json& b = j.at("baseline");
        read(b, "hidden", cfg.baseline.hidden);
        read(b, "lr", cfg.baseline.lr);
    }
    if (j.contains("eval")) {
        const json& e = j.at("eval");
        read(e, "samples_per_input", cfg.eval.samples_per_input);
        read(e, "interval", cfg.eval.interval);
    }
    read(j, "checkpoint_interval", cfg.checkpoint_interval);
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    return from_json(load_json_file(path));
}

}  // namespace seqlab
