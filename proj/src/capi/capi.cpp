#include "seqlab.h"

#include <cstring>
#include <string>

#include "seqlab/config.hpp"
#include "seqlab/curves.hpp"
#include "seqlab/errors.hpp"
#include "seqlab/runner.hpp"

struct seqlab_ctx {
    std::string last_error;
};

namespace {

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

seqlab_status classify(seqlab_ctx* ctx, const std::exception& e) {
    if (ctx != nullptr) ctx->last_error = e.what();
    if (dynamic_cast<const seqlab::ConfigError*>(&e)) return SEQLAB_ERR_CONFIG;
    if (dynamic_cast<const seqlab::IoError*>(&e)) return SEQLAB_ERR_IO;
    if (dynamic_cast<const seqlab::ParseError*>(&e)) return SEQLAB_ERR_PARSE;
    if (dynamic_cast<const seqlab::StateError*>(&e)) return SEQLAB_ERR_STATE;
    if (dynamic_cast<const seqlab::NumericError*>(&e)) return SEQLAB_ERR_NUMERIC;
    if (dynamic_cast<const seqlab::ShapeError*>(&e) ||
        dynamic_cast<const seqlab::DomainError*>(&e)) {
        return SEQLAB_ERR_INVALID_ARGUMENT;
    }
    return SEQLAB_ERR_INTERNAL;
}

template <typename F>
seqlab_status guarded(seqlab_ctx* ctx, F&& fn) {
    if (ctx == nullptr) return SEQLAB_ERR_INVALID_ARGUMENT;
    ctx->last_error.clear();
    try {
        return fn();
    } catch (const std::exception& e) {
        return classify(ctx, e);
    } catch (...) {
        ctx->last_error = "unknown error";
        return SEQLAB_ERR_INTERNAL;
    }
}

seqlab_status require(seqlab_ctx* ctx, bool ok, const char* what) {
    if (ok) return SEQLAB_OK;
    ctx->last_error = std::string(what) + " must not be null";
    return SEQLAB_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* seqlab_version(void) { return "1.0.0"; }

seqlab_ctx* seqlab_ctx_new(void) { return new (std::nothrow) seqlab_ctx(); }

void seqlab_ctx_free(seqlab_ctx* ctx) { delete ctx; }

const char* seqlab_last_error(const seqlab_ctx* ctx) {
    return ctx == nullptr ? "" : ctx->last_error.c_str();
}

seqlab_status seqlab_generate(seqlab_ctx* ctx, const char* task, uint64_t seed, int size,
                              const char* out_path, int max_n) {
    return guarded(ctx, [&]() -> seqlab_status {
        if (seqlab_status s = require(ctx, task != nullptr, "task"); s != SEQLAB_OK) return s;
        if (seqlab_status s = require(ctx, out_path != nullptr, "out_path"); s != SEQLAB_OK)
            return s;
        seqlab::run_generate(task, seed, size, out_path, max_n > 0 ? max_n : 10);
        return SEQLAB_OK;
    });
}

seqlab_status seqlab_train(seqlab_ctx* ctx, const char* config_json, char** checkpoint_out) {
    return guarded(ctx, [&]() -> seqlab_status {
        if (seqlab_status s = require(ctx, config_json != nullptr, "config_json"); s != SEQLAB_OK)
            return s;
        seqlab::ExperimentConfig cfg =
            seqlab::ExperimentConfig::from_json(nlohmann::json::parse(config_json));
        seqlab::RunResult result = seqlab::run_train(cfg);
        if (checkpoint_out != nullptr) *checkpoint_out = dup_string(result.checkpoint_path);
        return SEQLAB_OK;
    });
}

seqlab_status seqlab_eval(seqlab_ctx* ctx, const char* checkpoint_path, const char* config_json,
                          char** report_out) {
    return guarded(ctx, [&]() -> seqlab_status {
        if (seqlab_status s = require(ctx, checkpoint_path != nullptr, "checkpoint_path");
            s != SEQLAB_OK)
            return s;
        if (seqlab_status s = require(ctx, config_json != nullptr, "config_json"); s != SEQLAB_OK)
            return s;
        seqlab::ExperimentConfig cfg =
            seqlab::ExperimentConfig::from_json(nlohmann::json::parse(config_json));
        nlohmann::json report = seqlab::run_eval(checkpoint_path, cfg);
        if (report_out != nullptr) *report_out = dup_string(report.dump(2));
        return SEQLAB_OK;
    });
}

seqlab_status seqlab_curves(seqlab_ctx* ctx, const char* const* labels, const char* const* paths,
                            int n, const char* metric, char** csv_out) {
    return guarded(ctx, [&]() -> seqlab_status {
        if (seqlab_status s = require(ctx, labels != nullptr && paths != nullptr, "labels/paths");
            s != SEQLAB_OK)
            return s;
        if (seqlab_status s = require(ctx, csv_out != nullptr, "csv_out"); s != SEQLAB_OK)
            return s;
        if (n < 1) {
            ctx->last_error = "at least one metrics stream is required";
            return SEQLAB_ERR_INVALID_ARGUMENT;
        }
        std::vector<seqlab::CurveInput> inputs;
        inputs.reserve(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            inputs.push_back({labels[i], paths[i]});
        }
        std::string csv =
            seqlab::merge_curves(inputs, metric != nullptr ? metric : "auto");
        *csv_out = dup_string(csv);
        return SEQLAB_OK;
    });
}

seqlab_status seqlab_verify_kl(seqlab_ctx* ctx, char** table_json_out) {
    return guarded(ctx, [&]() -> seqlab_status {
        nlohmann::json table = seqlab::run_verify_kl();
        if (table_json_out != nullptr) *table_json_out = dup_string(table.dump(2));
        return table.at("pass").get<bool>() ? SEQLAB_OK : SEQLAB_ERR_NUMERIC;
    });
}

void seqlab_string_free(char* s) { delete[] s; }

}  // extern "C"
