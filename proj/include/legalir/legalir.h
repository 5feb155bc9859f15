/*
 * C interface to the legalir hybrid retrieval engine.
 *
 * Every object is an opaque handle created by a *_load / *_build / *_rank
 * function and released by the matching *_free. Functions return a
 * lir_status; on failure lir_last_error() describes the problem for the
 * calling thread. Strings returned through char** are owned by the caller
 * and released with lir_string_free. Borrowed const char* results stay valid
 * until the owning handle is freed.
 */
#ifndef LEGALIR_H
#define LEGALIR_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(LEGALIR_BUILDING)
#    define LEGALIR_API __declspec(dllexport)
#  else
#    define LEGALIR_API __declspec(dllimport)
#  endif
#else
#  define LEGALIR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lir_status {
    LIR_OK = 0,
    LIR_E_INVALID_ARGUMENT = 1,
    LIR_E_IO = 2,
    LIR_E_PARSE = 3,
    LIR_E_VALIDATION = 4,
    LIR_E_RANGE = 5,
    LIR_E_DOMAIN = 6,
    LIR_E_TRANSPORT = 7,
    LIR_E_BUILD = 8,
    LIR_E_NOMEM = 9,
    LIR_E_INTERNAL = 10
} lir_status;

typedef struct lir_corpus lir_corpus;
typedef struct lir_qa lir_qa;
typedef struct lir_lexical lir_lexical;
typedef struct lir_dense lir_dense;
typedef struct lir_queries lir_queries;
typedef struct lir_run lir_run;

typedef enum lir_unit { LIR_UNIT_SYLLABLE = 0, LIR_UNIT_WORD = 1 } lir_unit;

typedef enum lir_fusion_kind {
    LIR_FUSION_SQRT_PROD = 0,
    LIR_FUSION_PROD = 1,
    LIR_FUSION_LINEAR = 2,
    LIR_FUSION_LEXICAL_ONLY = 3,
    LIR_FUSION_SEMANTIC_ONLY = 4
} lir_fusion_kind;

typedef struct lir_tokenizer_config {
    lir_unit unit;
    int lowercase;
    const char* stopword_path; /* NULL: no stopword removal */
} lir_tokenizer_config;

typedef struct lir_bm25_params {
    double k1;
    double b;
    double delta;
} lir_bm25_params;

typedef struct lir_fusion {
    lir_fusion_kind kind;
    double alpha; /* read only for LIR_FUSION_LINEAR */
} lir_fusion;

typedef struct lir_histogram {
    size_t counts[4]; /* <100 (lengths up to 100), 101-256, 257-512, 513+ */
    double proportions[4];
    size_t total;
} lir_histogram;

typedef struct lir_coverage {
    size_t distinct_referenced;
    double fraction;
    size_t corpus_articles;
    size_t dangling;
} lir_coverage;

typedef struct lir_top3_summary {
    size_t queries;
    double min;
    double mean;
    double max;
} lir_top3_summary;

typedef struct lir_run_options {
    lir_fusion fusion;
    size_t depth;          /* hits kept per query */
    size_t candidate_pool; /* 0: fuse over the whole corpus */
    size_t threads;        /* 0: hardware concurrency */
} lir_run_options;

typedef struct lir_eval_options {
    size_t k;
    double threshold;
    size_t max_k;
} lir_eval_options;

typedef struct lir_eval_summary {
    size_t num_queries;
    double recall_at_k;
    double f2;
} lir_eval_summary;

typedef struct lir_grid {
    double start;
    double step;
    double end;
} lir_grid;

typedef struct lir_sweep_summary {
    double best_threshold;
    double best_f2;
    size_t points;
} lir_sweep_summary;

typedef struct lir_mine_summary {
    size_t k;
    size_t queries;
    size_t pairs;
    size_t warnings;
} lir_mine_summary;

/* Library metadata and errors */
LEGALIR_API const char* lir_version(void);
LEGALIR_API int lir_index_format_version(void);
LEGALIR_API int lir_run_format_version(void);
LEGALIR_API int lir_pair_format_version(void);
LEGALIR_API const char* lir_last_error(void);
LEGALIR_API const char* lir_status_name(lir_status status);
LEGALIR_API void lir_string_free(char* s);

LEGALIR_API void lir_tokenizer_config_default(lir_tokenizer_config* cfg);
LEGALIR_API void lir_bm25_params_default(lir_bm25_params* params);
LEGALIR_API void lir_run_options_default(lir_run_options* options);
LEGALIR_API void lir_eval_options_default(lir_eval_options* options);
LEGALIR_API lir_status lir_parse_unit(const char* name, lir_unit* out);
LEGALIR_API lir_status lir_parse_fusion(const char* name, lir_fusion_kind* out);

/* Scoring primitives */
LEGALIR_API lir_status lir_fuse(double lexical, double semantic, const lir_fusion* method, double* out);
LEGALIR_API lir_status lir_cosine(const double* u, const double* v, size_t dim, double* out);
/* Tokens joined by single spaces. */
LEGALIR_API lir_status lir_tokenize(const char* text, const lir_tokenizer_config* cfg, char** out);

/* Corpus */
LEGALIR_API lir_status lir_corpus_load(const char* path, lir_corpus** out);
LEGALIR_API lir_status lir_corpus_save(const lir_corpus* corpus, const char* path);
LEGALIR_API void lir_corpus_free(lir_corpus* corpus);
LEGALIR_API size_t lir_corpus_num_documents(const lir_corpus* corpus);
LEGALIR_API size_t lir_corpus_num_articles(const lir_corpus* corpus);
LEGALIR_API lir_status lir_corpus_article(const lir_corpus* corpus, size_t position, const char** law_id,
                                          const char** article_id);
LEGALIR_API lir_status lir_corpus_length_histogram(const lir_corpus* corpus, lir_unit unit, lir_histogram* out);

/* QA dataset */
LEGALIR_API lir_status lir_qa_load(const char* path, lir_qa** out);
LEGALIR_API void lir_qa_free(lir_qa* qa);
LEGALIR_API size_t lir_qa_size(const lir_qa* qa);
LEGALIR_API size_t lir_qa_num_warnings(const lir_qa* qa);
LEGALIR_API const char* lir_qa_warning(const lir_qa* qa, size_t index);
LEGALIR_API const char* lir_qa_question(const lir_qa* qa, size_t index);
/* dangling_json may be NULL; otherwise receives a JSON array of refs. */
LEGALIR_API lir_status lir_qa_coverage(const lir_corpus* corpus, const lir_qa* qa, lir_coverage* out,
                                       char** dangling_json);

/* Lexical (BM25+) index */
LEGALIR_API lir_status lir_lexical_build(const lir_corpus* corpus, const lir_tokenizer_config* cfg,
                                         const lir_bm25_params* params, lir_lexical** out);
LEGALIR_API lir_status lir_lexical_save(const lir_lexical* index, const char* path);
LEGALIR_API lir_status lir_lexical_load(const char* path, lir_lexical** out);
LEGALIR_API void lir_lexical_free(lir_lexical* index);
LEGALIR_API size_t lir_lexical_num_docs(const lir_lexical* index);
LEGALIR_API size_t lir_lexical_vocabulary_size(const lir_lexical* index);
LEGALIR_API double lir_lexical_avgdl(const lir_lexical* index);
LEGALIR_API lir_status lir_lexical_score(const lir_lexical* index, const char* query, size_t position, double* out);
/* positions/scores must hold k entries; *n_out receives min(k, num_docs). */
LEGALIR_API lir_status lir_lexical_top_k(const lir_lexical* index, const char* query, size_t k, size_t* positions,
                                         double* scores, size_t* n_out);
LEGALIR_API lir_status lir_lexical_top3(const lir_lexical* index, const lir_qa* qa, lir_top3_summary* out);

/* Dense index */
LEGALIR_API lir_status lir_dense_load(const char* path, const lir_corpus* corpus, lir_dense** out);
LEGALIR_API void lir_dense_free(lir_dense* index);
LEGALIR_API size_t lir_dense_dim(const lir_dense* index);
LEGALIR_API size_t lir_dense_size(const lir_dense* index);
/* The query is normalized before scoring. */
LEGALIR_API lir_status lir_dense_top_k(const lir_dense* index, const double* query, size_t dim, size_t k,
                                       size_t* positions, double* scores, size_t* n_out);

/* Embeds every article's combined text through a provider query source. */
LEGALIR_API lir_status lir_dense_embed(const lir_corpus* corpus, lir_queries* provider, lir_dense** out);

/* Query vector sources: a q<n> vector file or an HTTP embedding provider. */
LEGALIR_API lir_status lir_queries_from_file(const char* path, lir_queries** out);
LEGALIR_API lir_status lir_queries_from_provider(const char* url, lir_queries** out);
LEGALIR_API void lir_queries_free(lir_queries* queries);
LEGALIR_API size_t lir_queries_dim(const lir_queries* queries);
/* Provider sources only; writes a unit vector of length dim. */
LEGALIR_API lir_status lir_queries_embed(lir_queries* queries, const char* text, double* out, size_t dim);

/* File sources only; copies the unit vector stored for q<query_id>. */
LEGALIR_API lir_status lir_queries_vector(const lir_queries* queries, size_t query_id, double* out, size_t dim);

/* Runs */
LEGALIR_API lir_status lir_run_rank(const lir_lexical* lexical, const lir_dense* dense, const lir_qa* qa,
                                    lir_queries* queries, const lir_run_options* options, lir_run** out);
LEGALIR_API lir_status lir_run_load(const char* path, lir_run** out);
LEGALIR_API lir_status lir_run_save(const lir_run* run, const char* path);
LEGALIR_API void lir_run_free(lir_run* run);
LEGALIR_API size_t lir_run_size(const lir_run* run);

/* Ranks one query and applies the threshold band. query_vector may be NULL,
 * in which case the text is embedded through `queries` when needed. */
LEGALIR_API lir_status lir_search(const lir_lexical* lexical, const lir_dense* dense, lir_queries* queries,
                                  const char* text, const double* query_vector, size_t dim,
                                  const lir_run_options* options, double threshold, size_t max_k, char** json_out);

/* Evaluation */
LEGALIR_API lir_status lir_evaluate(const lir_run* run, const lir_qa* qa, const lir_eval_options* options,
                                    lir_eval_summary* summary, char** report_json, char** per_query_tsv);
LEGALIR_API lir_status lir_sweep(const lir_run* run, const lir_qa* qa, const lir_grid* grid, size_t max_k,
                                 lir_sweep_summary* summary, char** json_out, char** curve_csv);

/* Hard-negative mining. k = 0 selects the round default. warnings may be
 * NULL; otherwise receives newline-separated messages. */
LEGALIR_API lir_status lir_mine(const lir_qa* qa, const lir_run* run, int round, size_t k, const char* out_path,
                                lir_mine_summary* summary, char** warnings);

#ifdef __cplusplus
}
#endif

#endif /* LEGALIR_H */
