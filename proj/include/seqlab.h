/*
 * seqlab C API: policy-optimization experiments for conditional sequence
 * generation behind a stable extern-C surface.
 *
 * All entry points operate on an opaque context that carries the last error
 * message. Commands take the same JSON configuration the CLI writes into run
 * directories; results land on disk (run directories, dataset files) and,
 * where noted, in a returned string the caller frees with
 * seqlab_string_free().
 */
#ifndef SEQLAB_H
#define SEQLAB_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum seqlab_status {
    SEQLAB_OK = 0,
    SEQLAB_ERR_INVALID_ARGUMENT = 1, /* bad parameters, shape/domain violations */
    SEQLAB_ERR_CONFIG = 2,           /* invalid configuration */
    SEQLAB_ERR_IO = 3,               /* file read/write failure */
    SEQLAB_ERR_PARSE = 4,            /* malformed file */
    SEQLAB_ERR_STATE = 5,            /* e.g. RL fine-tune without a pretrain checkpoint */
    SEQLAB_ERR_NUMERIC = 6,          /* NaN/Inf surfaced in a computation */
    SEQLAB_ERR_INTERNAL = 7
} seqlab_status;

typedef struct seqlab_ctx seqlab_ctx;

const char* seqlab_version(void);

seqlab_ctx* seqlab_ctx_new(void);
void seqlab_ctx_free(seqlab_ctx* ctx);

/* Message for the most recent failure on this context; empty if none. */
const char* seqlab_last_error(const seqlab_ctx* ctx);

/* Writes a dataset file. task is "counting" or "corpus"; max_n bounds the
 * counting input length (pass 0 for the default of 10). */
seqlab_status seqlab_generate(seqlab_ctx* ctx, const char* task, uint64_t seed, int size,
                              const char* out_path, int max_n);

/* Runs the pipeline described by a JSON experiment config (MLE pretraining,
 * RL fine-tuning or the adversarial loop, per config.algorithm). Outputs go
 * to config.out_dir. When checkpoint_out is non-null it receives the final
 * checkpoint path. */
seqlab_status seqlab_train(seqlab_ctx* ctx, const char* config_json, char** checkpoint_out);

/* Evaluates a checkpoint against the config's test data. The JSON report is
 * returned through report_out and, when config.out_dir is set, written to
 * disk alongside the distribution CSVs. */
seqlab_status seqlab_eval(seqlab_ctx* ctx, const char* checkpoint_path, const char* config_json,
                          char** report_out);

/* Merges metrics streams into an iteration-indexed CSV (see the CLI's
 * curves subcommand). labels and paths are parallel arrays of length n. */
seqlab_status seqlab_curves(seqlab_ctx* ctx, const char* const* labels, const char* const* paths,
                            int n, const char* metric, char** csv_out);

/* Runs the KL trust-region bound verification and returns the table as
 * JSON: {"rows": [...], "pass": bool}. */
seqlab_status seqlab_verify_kl(seqlab_ctx* ctx, char** table_json_out);

void seqlab_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SEQLAB_H */
