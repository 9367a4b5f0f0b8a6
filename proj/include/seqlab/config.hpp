#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "seqlab/losses.hpp"

namespace seqlab {

/// Everything a run needs, serializable to JSON. A run directory gets the
/// resolved config written next to its outputs, so any result is
/// reproducible from its directory: (config, seed) fixes the metrics stream
/// bit-exactly.
struct ExperimentConfig {
    std::string task = "counting";     // counting | corpus
    std::string algorithm = "mle";     // mle | reinforce | mixer | ppo | ppo_dynamic | seqgan
    uint64_t seed = 42;
    std::string out_dir;

    struct Model {
        int hidden = 0;  // 0 resolves to the task default (128 counting, 512 corpus)
    } model;

    struct Data {
        std::string train_path;  // corpus-format file; empty counting data regenerates
        std::string test_path;
        int train_size = 50000;
        int test_size = 5000;
        uint64_t train_seed = 1;
        uint64_t test_seed = 2;
        int max_n = 10;  // counting input length bound
    } data;

    struct Mle {
        int epochs = 10;
        int batch_size = 64;
        double lr = 1e-3;
    } mle;

    struct Rl {
        int iterations = 200;
        int batch_size = 64;
        double lr = 1e-4;
        double gamma = 1.0;
        int ppo_epochs = 4;
        bool normalize_advantages = false;
        std::string init_checkpoint;
    } rl;

    ClipConfig clip;  // defaults resolved per algorithm when absent from JSON

    struct Mixer {
        int anneal_epochs = 10;
        int iters_per_epoch = 10;
    } mixer;

    struct Seqgan {
        std::string optimizer = "pg";  // pg | ppo | ppo_dynamic
        int d_steps = 1;
        int g_steps = 1;
        int disc_pretrain_steps = 50;
        int disc_embed = 64;
        int disc_hidden = 64;
        double disc_lr = 1e-3;
    } seqgan;

    struct Baseline {
        int hidden = 64;
        double lr = 1e-3;
    } baseline;

    struct Eval {
        int samples_per_input = 10;
        int interval = 0;  // 0: evaluate only at the end of the run
    } eval;

    int checkpoint_interval = 50;

    int resolved_hidden() const;
    int max_len() const { return task == "counting" ? 3 : 20; }
    bool stop_on_eos() const { return task != "counting"; }

    /// Throws ConfigError on invalid or inconsistent settings.
    void validate() const;

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);

    bool operator==(const ExperimentConfig& other) const {
        return to_json() == other.to_json();
    }
};

/// Per-algorithm clipping defaults (grid-search winners): dynamic bounds use
/// alpha1=beta1=inf, alpha2=beta2=1 except under seqgan where
/// alpha1=10, beta1=0.5, alpha2=beta2=0.2; fixed clipping uses epsilon=0.2.
ClipConfig default_clip(const std::string& algorithm, const std::string& seqgan_optimizer);

SurrogateKind surrogate_for(const std::string& algorithm, const std::string& seqgan_optimizer);

}  // namespace seqlab
