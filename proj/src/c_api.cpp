#include "legalir/legalir.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include <json.hpp>

#include "legalir/bm25.hpp"
#include "legalir/corpus.hpp"
#include "legalir/dense.hpp"
#include "legalir/error.hpp"
#include "legalir/eval.hpp"
#include "legalir/fusion.hpp"
#include "legalir/miner.hpp"
#include "legalir/pipeline.hpp"
#include "legalir/provider.hpp"
#include "legalir/run_file.hpp"
#include "legalir/text.hpp"
#include "legalir/version.hpp"

struct lir_corpus {
    legalir::Corpus corpus;
};

struct lir_qa {
    legalir::QASet set;
};

struct lir_lexical {
    legalir::Bm25Index index;
};

struct lir_dense {
    legalir::DenseIndex index;
};

struct lir_queries {
    std::optional<legalir::QueryVectorFile> file;
    std::unique_ptr<legalir::QueryEmbedder> embedder;
    std::size_t dim = 0;
};

struct lir_run {
    legalir::Run run;
};

namespace {

using namespace legalir;

thread_local std::string g_last_error;

lir_status to_status(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::kInvalidArgument: return LIR_E_INVALID_ARGUMENT;
        case ErrorKind::kIo: return LIR_E_IO;
        case ErrorKind::kParse: return LIR_E_PARSE;
        case ErrorKind::kValidation: return LIR_E_VALIDATION;
        case ErrorKind::kRange: return LIR_E_RANGE;
        case ErrorKind::kDomain: return LIR_E_DOMAIN;
        case ErrorKind::kTransport: return LIR_E_TRANSPORT;
        case ErrorKind::kBuild: return LIR_E_BUILD;
    }
    return LIR_E_INTERNAL;
}

template <typename Fn>
lir_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return LIR_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e.kind());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return LIR_E_NOMEM;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return LIR_E_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return LIR_E_INTERNAL;
    }
}

template <typename... Ptrs>
void require(const char* what, Ptrs... ptrs) {
    if (((ptrs == nullptr) || ...)) throw Error(ErrorKind::kInvalidArgument, std::string("null argument to ") + what);
}

char* dup_string(const std::string& s) {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

void emit(char** out, const std::string& s) {
    if (out != nullptr) *out = dup_string(s);
}

TokenUnit to_unit(lir_unit unit) {
    switch (unit) {
        case LIR_UNIT_SYLLABLE: return TokenUnit::kSyllable;
        case LIR_UNIT_WORD: return TokenUnit::kWord;
    }
    throw Error(ErrorKind::kInvalidArgument, "invalid token unit");
}

FusionMethod to_method(const lir_fusion& f) {
    switch (f.kind) {
        case LIR_FUSION_SQRT_PROD: return FusionMethod(FusionKind::kSqrtProd);
        case LIR_FUSION_PROD: return FusionMethod(FusionKind::kProd);
        case LIR_FUSION_LINEAR: return FusionMethod::linear(f.alpha);
        case LIR_FUSION_LEXICAL_ONLY: return FusionMethod(FusionKind::kLexicalOnly);
        case LIR_FUSION_SEMANTIC_ONLY: return FusionMethod(FusionKind::kSemanticOnly);
    }
    throw Error(ErrorKind::kInvalidArgument, "invalid fusion kind");
}

Tokenizer to_tokenizer(const lir_tokenizer_config* cfg) {
    lir_tokenizer_config c;
    lir_tokenizer_config_default(&c);
    if (cfg != nullptr) c = *cfg;
    TokenizerConfig tc;
    tc.unit = to_unit(c.unit);
    tc.lowercase = c.lowercase != 0;
    if (c.stopword_path != nullptr && *c.stopword_path != '\0') tc.stopword_path = c.stopword_path;
    return Tokenizer(tc);
}

void copy_ranked(const std::vector<RankedDoc>& docs, size_t* positions, double* scores, size_t* n_out) {
    for (std::size_t i = 0; i < docs.size(); ++i) {
        positions[i] = docs[i].position;
        scores[i] = docs[i].score;
    }
    *n_out = docs.size();
}

// Query vector for a record, from a vector file (by id) or the provider (by text).
EmbeddingVector query_vector(lir_queries& q, const QARecord& rec) {
    if (q.file) return q.file->at(rec.query_id);
    return q.embedder->embed_query(rec.question);
}

nlohmann::ordered_json hits_json(const std::vector<ScoredHit>& hits) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& h : hits) {
        arr.push_back({{"law_id", h.ref.law_id},
                       {"article_id", h.ref.article_id},
                       {"lexical", h.lexical},
                       {"semantic", h.semantic},
                       {"fused", h.fused}});
    }
    return arr;
}

}  // namespace

extern "C" {

const char* lir_version(void) { return kEngineVersion; }
int lir_index_format_version(void) { return static_cast<int>(Bm25Index::kFormatVersion); }
int lir_run_format_version(void) { return Run::kFormatVersion; }
int lir_pair_format_version(void) { return kPairFormatVersion; }
const char* lir_last_error(void) { return g_last_error.c_str(); }

const char* lir_status_name(lir_status status) {
    switch (status) {
        case LIR_OK: return "ok";
        case LIR_E_INVALID_ARGUMENT: return "invalid argument";
        case LIR_E_IO: return "I/O error";
        case LIR_E_PARSE: return "parse error";
        case LIR_E_VALIDATION: return "validation error";
        case LIR_E_RANGE: return "range error";
        case LIR_E_DOMAIN: return "domain error";
        case LIR_E_TRANSPORT: return "transport error";
        case LIR_E_BUILD: return "build error";
        case LIR_E_NOMEM: return "out of memory";
        case LIR_E_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void lir_string_free(char* s) { std::free(s); }

void lir_tokenizer_config_default(lir_tokenizer_config* cfg) {
    if (cfg == nullptr) return;
    cfg->unit = LIR_UNIT_WORD;
    cfg->lowercase = 1;
    cfg->stopword_path = nullptr;
}

void lir_bm25_params_default(lir_bm25_params* params) {
    if (params == nullptr) return;
    const Bm25Params d;
    params->k1 = d.k1;
    params->b = d.b;
    params->delta = d.delta;
}

void lir_run_options_default(lir_run_options* options) {
    if (options == nullptr) return;
    options->fusion.kind = LIR_FUSION_SQRT_PROD;
    options->fusion.alpha = 0.0;
    options->depth = 100;
    options->candidate_pool = 0;
    options->threads = 0;
}

void lir_eval_options_default(lir_eval_options* options) {
    if (options == nullptr) return;
    options->k = 20;
    options->threshold = 0.0;
    options->max_k = 20;
}

lir_status lir_parse_unit(const char* name, lir_unit* out) {
    return guarded([&] {
        require("lir_parse_unit", name, out);
        *out = parse_token_unit(name) == TokenUnit::kSyllable ? LIR_UNIT_SYLLABLE : LIR_UNIT_WORD;
    });
}

lir_status lir_parse_fusion(const char* name, lir_fusion_kind* out) {
    return guarded([&] {
        require("lir_parse_fusion", name, out);
        *out = static_cast<lir_fusion_kind>(parse_fusion_kind(name));
    });
}

lir_status lir_fuse(double lexical, double semantic, const lir_fusion* method, double* out) {
    return guarded([&] {
        require("lir_fuse", method, out);
        *out = fuse(lexical, semantic, to_method(*method));
    });
}

lir_status lir_cosine(const double* u, const double* v, size_t dim, double* out) {
    return guarded([&] {
        require("lir_cosine", u, v, out);
        *out = cosine({u, dim}, {v, dim});
    });
}

lir_status lir_tokenize(const char* text, const lir_tokenizer_config* cfg, char** out) {
    return guarded([&] {
        require("lir_tokenize", text, out);
        const auto tokens = to_tokenizer(cfg).terms(text);
        std::string joined;
        for (const auto& t : tokens) {
            if (!joined.empty()) joined += ' ';
            joined += t;
        }
        *out = dup_string(joined);
    });
}

lir_status lir_corpus_load(const char* path, lir_corpus** out) {
    return guarded([&] {
        require("lir_corpus_load", path, out);
        *out = nullptr;
        *out = new lir_corpus{load_corpus(path)};
    });
}

lir_status lir_corpus_save(const lir_corpus* corpus, const char* path) {
    return guarded([&] {
        require("lir_corpus_save", corpus, path);
        save_corpus(corpus->corpus, path);
    });
}

void lir_corpus_free(lir_corpus* corpus) { delete corpus; }
size_t lir_corpus_num_documents(const lir_corpus* corpus) { return corpus ? corpus->corpus.num_documents() : 0; }
size_t lir_corpus_num_articles(const lir_corpus* corpus) { return corpus ? corpus->corpus.size() : 0; }

lir_status lir_corpus_article(const lir_corpus* corpus, size_t position, const char** law_id,
                              const char** article_id) {
    return guarded([&] {
        require("lir_corpus_article", corpus, law_id, article_id);
        const auto& a = corpus->corpus.at(position);
        *law_id = a.ref.law_id.c_str();
        *article_id = a.ref.article_id.c_str();
    });
}

lir_status lir_corpus_length_histogram(const lir_corpus* corpus, lir_unit unit, lir_histogram* out) {
    return guarded([&] {
        require("lir_corpus_length_histogram", corpus, out);
        const auto h = length_histogram(corpus->corpus, to_unit(unit));
        for (std::size_t i = 0; i < LengthHistogram::kBuckets; ++i) {
            out->counts[i] = h.counts[i];
            out->proportions[i] = h.proportion(i);
        }
        out->total = h.total();
    });
}

lir_status lir_qa_load(const char* path, lir_qa** out) {
    return guarded([&] {
        require("lir_qa_load", path, out);
        *out = nullptr;
        *out = new lir_qa{load_qa(path)};
    });
}

void lir_qa_free(lir_qa* qa) { delete qa; }
size_t lir_qa_size(const lir_qa* qa) { return qa ? qa->set.records.size() : 0; }
size_t lir_qa_num_warnings(const lir_qa* qa) { return qa ? qa->set.warnings.size() : 0; }

const char* lir_qa_warning(const lir_qa* qa, size_t index) {
    if (qa == nullptr || index >= qa->set.warnings.size()) return nullptr;
    return qa->set.warnings[index].c_str();
}

const char* lir_qa_question(const lir_qa* qa, size_t index) {
    if (qa == nullptr || index >= qa->set.records.size()) return nullptr;
    return qa->set.records[index].question.c_str();
}

lir_status lir_qa_coverage(const lir_corpus* corpus, const lir_qa* qa, lir_coverage* out, char** dangling_json) {
    return guarded([&] {
        require("lir_qa_coverage", corpus, qa, out);
        const auto cov = qa_coverage(corpus->corpus, qa->set.records);
        out->distinct_referenced = cov.distinct_referenced;
        out->fraction = cov.fraction;
        out->corpus_articles = cov.corpus_articles;
        out->dangling = cov.dangling.size();
        if (dangling_json != nullptr) {
            auto arr = nlohmann::ordered_json::array();
            for (const auto& r : cov.dangling) arr.push_back({{"law_id", r.law_id}, {"article_id", r.article_id}});
            *dangling_json = dup_string(arr.dump());
        }
    });
}

lir_status lir_lexical_build(const lir_corpus* corpus, const lir_tokenizer_config* cfg, const lir_bm25_params* params,
                             lir_lexical** out) {
    return guarded([&] {
        require("lir_lexical_build", corpus, out);
        *out = nullptr;
        Bm25Params p;
        if (params != nullptr) p = {params->k1, params->b, params->delta};
        *out = new lir_lexical{Bm25Index::build(corpus->corpus, to_tokenizer(cfg), p)};
    });
}

lir_status lir_lexical_save(const lir_lexical* index, const char* path) {
    return guarded([&] {
        require("lir_lexical_save", index, path);
        index->index.save(path);
    });
}

lir_status lir_lexical_load(const char* path, lir_lexical** out) {
    return guarded([&] {
        require("lir_lexical_load", path, out);
        *out = nullptr;
        *out = new lir_lexical{Bm25Index::load(path)};
    });
}

void lir_lexical_free(lir_lexical* index) { delete index; }
size_t lir_lexical_num_docs(const lir_lexical* index) { return index ? index->index.num_docs() : 0; }
size_t lir_lexical_vocabulary_size(const lir_lexical* index) { return index ? index->index.vocabulary_size() : 0; }
double lir_lexical_avgdl(const lir_lexical* index) { return index ? index->index.avgdl() : 0.0; }

lir_status lir_lexical_score(const lir_lexical* index, const char* query, size_t position, double* out) {
    return guarded([&] {
        require("lir_lexical_score", index, query, out);
        *out = index->index.score(index->index.query_terms(query), position);
    });
}

lir_status lir_lexical_top_k(const lir_lexical* index, const char* query, size_t k, size_t* positions, double* scores,
                             size_t* n_out) {
    return guarded([&] {
        require("lir_lexical_top_k", index, query, positions, scores, n_out);
        if (k == 0) throw Error(ErrorKind::kInvalidArgument, "k must be >= 1");
        copy_ranked(index->index.top_k(index->index.query_terms(query), k), positions, scores, n_out);
    });
}

lir_status lir_lexical_top3(const lir_lexical* index, const lir_qa* qa, lir_top3_summary* out) {
    return guarded([&] {
        require("lir_lexical_top3", index, qa, out);
        std::vector<TokenStream> queries;
        for (const auto& rec : qa->set.records) queries.push_back(index->index.query_terms(rec.question));
        const auto s = index->index.top3_average(queries);
        out->queries = s.per_query.size();
        out->min = s.min;
        out->mean = s.mean;
        out->max = s.max;
    });
}

lir_status lir_dense_load(const char* path, const lir_corpus* corpus, lir_dense** out) {
    return guarded([&] {
        require("lir_dense_load", path, corpus, out);
        *out = nullptr;
        *out = new lir_dense{load_vectors(path, corpus->corpus)};
    });
}

void lir_dense_free(lir_dense* index) { delete index; }
size_t lir_dense_dim(const lir_dense* index) { return index ? index->index.dim() : 0; }
size_t lir_dense_size(const lir_dense* index) { return index ? index->index.size() : 0; }

lir_status lir_dense_top_k(const lir_dense* index, const double* query, size_t dim, size_t k, size_t* positions,
                           double* scores, size_t* n_out) {
    return guarded([&] {
        require("lir_dense_top_k", index, query, positions, scores, n_out);
        if (k == 0) throw Error(ErrorKind::kInvalidArgument, "k must be >= 1");
        const auto unit = normalized({query, dim});
        copy_ranked(index->index.top_k(unit, k), positions, scores, n_out);
    });
}

lir_status lir_dense_embed(const lir_corpus* corpus, lir_queries* provider, lir_dense** out) {
    return guarded([&] {
        require("lir_dense_embed", corpus, provider, out);
        *out = nullptr;
        if (!provider->embedder) throw Error(ErrorKind::kInvalidArgument, "query source has no embedding provider");
        std::vector<std::string> texts;
        texts.reserve(corpus->corpus.size());
        for (const auto& a : corpus->corpus.articles()) texts.push_back(a.combined);
        const auto vectors = provider->embedder->provider().embed(texts);
        *out = new lir_dense{DenseIndex(provider->dim, vectors, "provider")};
    });
}

lir_status lir_queries_from_file(const char* path, lir_queries** out) {
    return guarded([&] {
        require("lir_queries_from_file", path, out);
        *out = nullptr;
        auto q = std::make_unique<lir_queries>();
        q->file = QueryVectorFile::load(path);
        q->dim = q->file->dim();
        *out = q.release();
    });
}

lir_status lir_queries_from_provider(const char* url, lir_queries** out) {
    return guarded([&] {
        require("lir_queries_from_provider", url, out);
        *out = nullptr;
        auto provider = std::make_shared<HttpEmbeddingProvider>(url);
        auto q = std::make_unique<lir_queries>();
        q->dim = provider->dim();
        q->embedder = std::make_unique<QueryEmbedder>(provider, q->dim);
        *out = q.release();
    });
}

void lir_queries_free(lir_queries* queries) { delete queries; }
size_t lir_queries_dim(const lir_queries* queries) { return queries ? queries->dim : 0; }

lir_status lir_queries_embed(lir_queries* queries, const char* text, double* out, size_t dim) {
    return guarded([&] {
        require("lir_queries_embed", queries, text, out);
        if (!queries->embedder) throw Error(ErrorKind::kInvalidArgument, "query source has no embedding provider");
        const auto v = queries->embedder->embed_query(text);
        if (v.size() != dim) {
            throw Error(ErrorKind::kValidation, "provider dimension " + std::to_string(v.size()) + " differs from " +
                                                    std::to_string(dim));
        }
        std::copy(v.begin(), v.end(), out);
    });
}

lir_status lir_queries_vector(const lir_queries* queries, size_t query_id, double* out, size_t dim) {
    return guarded([&] {
        require("lir_queries_vector", queries, out);
        if (!queries->file) throw Error(ErrorKind::kInvalidArgument, "query source is not a vector file");
        const auto& v = queries->file->at(query_id);
        if (v.size() != dim) {
            throw Error(ErrorKind::kValidation, "query vector dimension " + std::to_string(v.size()) + " differs from " +
                                                    std::to_string(dim));
        }
        std::copy(v.begin(), v.end(), out);
    });
}

lir_status lir_run_rank(const lir_lexical* lexical, const lir_dense* dense, const lir_qa* qa, lir_queries* queries,
                        const lir_run_options* options, lir_run** out) {
    return guarded([&] {
        require("lir_run_rank", lexical, qa, out);
        *out = nullptr;
        lir_run_options o;
        lir_run_options_default(&o);
        if (options != nullptr) o = *options;

        RunOptions ro;
        ro.method = to_method(o.fusion);
        ro.depth = o.depth;
        ro.rank.candidate_pool = o.candidate_pool;
        ro.threads = o.threads;

        QueryVectorFn fn;
        if (ro.method.uses_semantic()) {
            if (queries == nullptr) throw Error(ErrorKind::kInvalidArgument, "semantic fusion needs query vectors");
            if (queries->embedder) {
                std::vector<std::string> texts;
                for (const auto& rec : qa->set.records) texts.push_back(rec.question);
                queries->embedder->embed_queries(texts);
            }
            fn = [queries](const QARecord& rec) { return query_vector(*queries, rec); };
        }
        auto run = rank_queries(lexical->index, dense ? &dense->index : nullptr, qa->set.records, fn, ro);
        *out = new lir_run{std::move(run)};
    });
}

lir_status lir_run_load(const char* path, lir_run** out) {
    return guarded([&] {
        require("lir_run_load", path, out);
        *out = nullptr;
        *out = new lir_run{Run::load(path)};
    });
}

lir_status lir_run_save(const lir_run* run, const char* path) {
    return guarded([&] {
        require("lir_run_save", run, path);
        run->run.save(path);
    });
}

void lir_run_free(lir_run* run) { delete run; }
size_t lir_run_size(const lir_run* run) { return run ? run->run.size() : 0; }

lir_status lir_search(const lir_lexical* lexical, const lir_dense* dense, lir_queries* queries, const char* text,
                      const double* query_vector, size_t dim, const lir_run_options* options, double threshold,
                      size_t max_k, char** json_out) {
    return guarded([&] {
        require("lir_search", lexical, text, json_out);
        lir_run_options o;
        lir_run_options_default(&o);
        if (options != nullptr) o = *options;
        const auto method = to_method(o.fusion);

        EmbeddingVector qvec;
        if (method.uses_semantic()) {
            if (query_vector != nullptr) {
                qvec = normalized({query_vector, dim});
            } else if (queries != nullptr && queries->embedder) {
                qvec = queries->embedder->embed_query(text);
            } else {
                throw Error(ErrorKind::kInvalidArgument, "semantic fusion needs a query vector or a provider");
            }
        }
        const auto terms = lexical->index.query_terms(text);
        auto hits = rank(lexical->index, dense ? &dense->index : nullptr, terms, qvec, method,
                         RankOptions{o.candidate_pool});
        const auto selected = hits.empty() ? std::vector<ScoredHit>{} : select(hits, {threshold, max_k});
        if (hits.size() > o.depth) hits.resize(o.depth);

        nlohmann::ordered_json doc;
        doc["query"] = text;
        doc["terms"] = terms;
        doc["fusion"] = std::string(to_string(method.kind()));
        doc["threshold"] = threshold;
        doc["selected"] = hits_json(selected);
        doc["hits"] = hits_json(hits);
        *json_out = dup_string(doc.dump());
    });
}

lir_status lir_evaluate(const lir_run* run, const lir_qa* qa, const lir_eval_options* options,
                        lir_eval_summary* summary, char** report_json, char** per_query) {
    return guarded([&] {
        require("lir_evaluate", run, qa);
        lir_eval_options o;
        lir_eval_options_default(&o);
        if (options != nullptr) o = *options;
        const auto report = evaluate(run->run, qa->set.records, {o.k, {o.threshold, o.max_k}});
        if (summary != nullptr) *summary = {report.per_query.size(), report.recall_at_k, report.f2};
        emit(report_json, report_to_json(report));
        emit(per_query, per_query_tsv(report));
    });
}

lir_status lir_sweep(const lir_run* run, const lir_qa* qa, const lir_grid* grid, size_t max_k,
                     lir_sweep_summary* summary, char** json_out, char** curve_csv) {
    return guarded([&] {
        require("lir_sweep", run, qa);
        ThresholdGrid g;
        if (grid != nullptr) g = {grid->start, grid->step, grid->end};
        const auto result = sweep_threshold(run->run, qa->set.records, g.points(), max_k);
        if (summary != nullptr) *summary = {result.best_threshold, result.best_f2, result.curve.size()};
        emit(json_out, sweep_to_json(result));
        emit(curve_csv, sweep_curve_csv(result));
    });
}

lir_status lir_mine(const lir_qa* qa, const lir_run* run, int round, size_t k, const char* out_path,
                    lir_mine_summary* summary, char** warnings) {
    return guarded([&] {
        require("lir_mine", qa, run, out_path);
        MiningConfig cfg = MiningConfig::for_round(round);
        if (k != 0) cfg.k = k;
        const auto result = mine(qa->set.records, run->run, cfg);
        export_pairs(result.pairs, out_path);
        if (summary != nullptr) *summary = {cfg.k, qa->set.records.size(), result.pairs.size(), result.warnings.size()};
        if (warnings != nullptr) {
            std::string joined;
            for (const auto& w : result.warnings) joined += w + '\n';
            *warnings = dup_string(joined);
        }
    });
}

}  // extern "C"
