// Command-line front end. Talks to the engine only through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "legalir/legalir.h"

namespace {

using ojson = nlohmann::ordered_json;

struct Failure {
    int exit_code;
    std::string message;
};

void check(lir_status status, const std::string& context) {
    if (status == LIR_OK) return;
    throw Failure{1, context + ": " + lir_status_name(status) + ": " + lir_last_error()};
}

[[noreturn]] void usage_error(const std::string& message) { throw Failure{2, message}; }

template <typename T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};

using CorpusPtr = std::unique_ptr<lir_corpus, Deleter<lir_corpus, lir_corpus_free>>;
using QaPtr = std::unique_ptr<lir_qa, Deleter<lir_qa, lir_qa_free>>;
using LexicalPtr = std::unique_ptr<lir_lexical, Deleter<lir_lexical, lir_lexical_free>>;
using DensePtr = std::unique_ptr<lir_dense, Deleter<lir_dense, lir_dense_free>>;
using QueriesPtr = std::unique_ptr<lir_queries, Deleter<lir_queries, lir_queries_free>>;
using RunPtr = std::unique_ptr<lir_run, Deleter<lir_run, lir_run_free>>;

// Owns a malloc'ed string returned by the library.
class OwnedString {
public:
    OwnedString() = default;
    OwnedString(const OwnedString&) = delete;
    OwnedString& operator=(const OwnedString&) = delete;
    ~OwnedString() { lir_string_free(ptr_); }

    char** out() { return &ptr_; }
    std::string str() const { return ptr_ ? std::string(ptr_) : std::string(); }

private:
    char* ptr_ = nullptr;
};

CorpusPtr load_corpus(const std::string& path) {
    lir_corpus* c = nullptr;
    check(lir_corpus_load(path.c_str(), &c), "loading corpus");
    return CorpusPtr(c);
}

QaPtr load_qa(const std::string& path) {
    lir_qa* q = nullptr;
    check(lir_qa_load(path.c_str(), &q), "loading QA");
    QaPtr qa(q);
    for (std::size_t i = 0; i < lir_qa_num_warnings(qa.get()); ++i) {
        std::cerr << "warning: " << lir_qa_warning(qa.get(), i) << '\n';
    }
    return qa;
}

RunPtr load_run(const std::string& path) {
    lir_run* r = nullptr;
    check(lir_run_load(path.c_str(), &r), "loading run");
    return RunPtr(r);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw Failure{1, path + ": cannot write file"};
}

void summary_line(ojson summary) {
    std::cout << summary.dump() << std::endl;
}

struct TokenizerOptions {
    std::string unit = "word";
    std::string stopwords;
    bool no_lowercase = false;

    void add(CLI::App* cmd, const std::string& names = "--tokenizer") {
        cmd->add_option(names, unit, "Token unit: syllable or word")
            ->check(CLI::IsMember({"syllable", "word"}))
            ->capture_default_str();
        cmd->add_option("--stopwords", stopwords, "Stopword file (one token per line)");
        cmd->add_flag("--no-lowercase", no_lowercase, "Keep original case");
    }

    lir_tokenizer_config config() const {
        lir_tokenizer_config cfg;
        lir_tokenizer_config_default(&cfg);
        check(lir_parse_unit(unit.c_str(), &cfg.unit), "tokenizer");
        cfg.lowercase = no_lowercase ? 0 : 1;
        cfg.stopword_path = stopwords.empty() ? nullptr : stopwords.c_str();
        return cfg;
    }
};

struct Bm25Options {
    lir_bm25_params params{};

    Bm25Options() { lir_bm25_params_default(&params); }

    void add(CLI::App* cmd) {
        cmd->add_option("--k1", params.k1, "BM25+ k1")->capture_default_str();
        cmd->add_option("--b", params.b, "BM25+ b")->capture_default_str();
        cmd->add_option("--delta", params.delta, "BM25+ delta")->capture_default_str();
    }
};

// Either a prebuilt index or a corpus to index on the fly.
struct LexicalSource {
    std::string index_path;
    std::string corpus_path;
    TokenizerOptions tokenizer;
    Bm25Options bm25;

    void add(CLI::App* cmd, bool corpus_required = false) {
        auto* corpus = cmd->add_option("--corpus", corpus_path, "Corpus file (JSON lines)");
        cmd->add_option("--index", index_path, "Prebuilt BM25+ index");
        if (corpus_required) corpus->required();
        tokenizer.add(cmd);
        bm25.add(cmd);
    }

    LexicalPtr open(const lir_corpus* corpus) const {
        lir_lexical* idx = nullptr;
        if (!index_path.empty()) {
            check(lir_lexical_load(index_path.c_str(), &idx), "loading index " + index_path);
        } else if (corpus != nullptr) {
            const auto cfg = tokenizer.config();
            check(lir_lexical_build(corpus, &cfg, &bm25.params, &idx), "building BM25+ index");
        } else {
            usage_error("either --index or --corpus is required");
        }
        return LexicalPtr(idx);
    }
};

struct FusionOptions {
    std::string fusion = "sqrt_prod";
    std::optional<double> alpha;
    std::size_t candidate_pool = 0;

    void add(CLI::App* cmd) {
        cmd->add_option("--fusion", fusion, "sqrt_prod | prod | linear | lexical_only | semantic_only")
            ->check(CLI::IsMember({"sqrt_prod", "prod", "linear", "lexical_only", "semantic_only"}))
            ->capture_default_str();
        cmd->add_option("--alpha", alpha, "Semantic weight for linear fusion");
        cmd->add_option("--candidate-pool", candidate_pool, "Fuse only the BM25+ top N (0 = whole corpus)")
            ->capture_default_str();
    }

    lir_fusion method() const {
        lir_fusion f{};
        check(lir_parse_fusion(fusion.c_str(), &f.kind), "fusion");
        if (f.kind == LIR_FUSION_LINEAR) {
            if (!alpha) usage_error("--fusion linear requires --alpha");
            f.alpha = *alpha;
        } else if (alpha) {
            usage_error("--alpha is only valid with --fusion linear");
        }
        return f;
    }

    bool semantic() const { return fusion != "lexical_only"; }
};

struct VectorOptions {
    std::string vectors;
    std::string query_vectors;
    std::string provider;

    void add(CLI::App* cmd) {
        cmd->add_option("--vectors", vectors, "Article vector file");
        cmd->add_option("--query-vectors", query_vectors, "Query vector file (ids q<n>)");
        cmd->add_option("--provider", provider, "Embedding provider base URL");
    }

    QueriesPtr open_queries() const {
        lir_queries* q = nullptr;
        if (!query_vectors.empty()) {
            check(lir_queries_from_file(query_vectors.c_str(), &q), "loading query vectors");
        } else if (!provider.empty()) {
            check(lir_queries_from_provider(provider.c_str(), &q), "connecting to provider " + provider);
        } else {
            usage_error("semantic fusion needs --query-vectors or --provider");
        }
        return QueriesPtr(q);
    }

    // Article vectors from a file, else embedded through the provider.
    DensePtr open_dense(const lir_corpus* corpus, lir_queries* queries) const {
        lir_dense* d = nullptr;
        if (!vectors.empty()) {
            check(lir_dense_load(vectors.c_str(), corpus, &d), "loading vectors");
        } else if (!provider.empty() && queries != nullptr) {
            QueriesPtr owned;
            if (query_vectors.empty()) {
                check(lir_dense_embed(corpus, queries, &d), "embedding articles");
            } else {
                lir_queries* p = nullptr;
                check(lir_queries_from_provider(provider.c_str(), &p), "connecting to provider " + provider);
                owned.reset(p);
                check(lir_dense_embed(corpus, owned.get(), &d), "embedding articles");
            }
        } else {
            usage_error("semantic fusion needs --vectors or --provider");
        }
        return DensePtr(d);
    }
};

const char* kBucketLabels[4] = {"<100", "101-256", "257-512", "513+"};

int cmd_stats(const std::string& corpus_path, const TokenizerOptions& tok, const std::string& qa_path, bool top3,
              const std::string& out_path) {
    auto corpus = load_corpus(corpus_path);
    const auto cfg = tok.config();
    lir_histogram h{};
    check(lir_corpus_length_histogram(corpus.get(), cfg.unit, &h), "length histogram");

    std::printf("documents %zu\narticles  %zu\n\n", lir_corpus_num_documents(corpus.get()),
                lir_corpus_num_articles(corpus.get()));
    std::printf("%-10s %10s %11s\n", "length", "amount", "proportion");
    for (int i = 0; i < 4; ++i) std::printf("%-10s %10zu %10.2f%%\n", kBucketLabels[i], h.counts[i], 100.0 * h.proportions[i]);

    ojson summary;
    summary["command"] = "stats";
    summary["status"] = "ok";
    summary["documents"] = lir_corpus_num_documents(corpus.get());
    summary["articles"] = lir_corpus_num_articles(corpus.get());
    summary["unit"] = tok.unit;
    auto& buckets = summary["histogram"] = ojson::array();
    for (int i = 0; i < 4; ++i) {
        buckets.push_back({{"bucket", kBucketLabels[i]}, {"count", h.counts[i]}, {"proportion", h.proportions[i]}});
    }

    if (!qa_path.empty()) {
        auto qa = load_qa(qa_path);
        lir_coverage cov{};
        OwnedString dangling;
        check(lir_qa_coverage(corpus.get(), qa.get(), &cov, dangling.out()), "QA coverage");
        std::printf("\nqa queries %zu\nreferenced articles %zu (%.2f%% of corpus)\ndangling refs %zu\n",
                    lir_qa_size(qa.get()), cov.distinct_referenced, 100.0 * cov.fraction, cov.dangling);
        summary["qa"] = {{"queries", lir_qa_size(qa.get())},
                         {"distinct_referenced", cov.distinct_referenced},
                         {"fraction", cov.fraction},
                         {"dangling", ojson::parse(dangling.str())}};
        if (top3) {
            lir_lexical* idx = nullptr;
            const Bm25Options bm25;
            check(lir_lexical_build(corpus.get(), &cfg, &bm25.params, &idx), "building BM25+ index");
            LexicalPtr lexical(idx);
            lir_top3_summary t{};
            check(lir_lexical_top3(lexical.get(), qa.get(), &t), "top-3 average");
            std::printf("bm25+ top-3 average: min %.4f mean %.4f max %.4f\n", t.min, t.mean, t.max);
            summary["top3_average"] = {{"queries", t.queries}, {"min", t.min}, {"mean", t.mean}, {"max", t.max}};
        }
    } else if (top3) {
        usage_error("--top3 requires --qa");
    }
    if (!out_path.empty()) write_file(out_path, summary.dump(2) + "\n");
    summary_line(summary);
    return 0;
}

void print_ranked(const std::vector<std::size_t>& pos, const std::vector<double>& scores, std::size_t n,
                  const lir_corpus* corpus) {
    for (std::size_t i = 0; i < n; ++i) {
        const char* law = "";
        const char* art = "";
        if (corpus != nullptr) check(lir_corpus_article(corpus, pos[i], &law, &art), "article lookup");
        std::printf("%3zu  %-24s %-12s %.6f\n", i + 1, law, art, scores[i]);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid BM25+ / dense retrieval engine for article-level legal corpora"};
    app.set_version_flag("--version", std::string("legalir ") + lir_version() + " (index format " +
                                          std::to_string(lir_index_format_version()) + ", run format " +
                                          std::to_string(lir_run_format_version()) + ", pair format " +
                                          std::to_string(lir_pair_format_version()) + ")");
    app.require_subcommand(1);

    // stats
    auto* stats = app.add_subcommand("stats", "Corpus size, article length buckets and QA coverage");
    std::string stats_corpus, stats_qa, stats_out;
    TokenizerOptions stats_tok;
    bool stats_top3 = false;
    stats->add_option("--corpus", stats_corpus, "Corpus file")->required();
    stats_tok.add(stats, "--unit,--tokenizer");
    stats->add_option("--qa", stats_qa, "QA file for coverage statistics");
    stats->add_flag("--top3", stats_top3, "Report the mean of the top-3 BM25+ scores per query");
    stats->add_option("--out", stats_out, "Write the JSON summary here");

    // build-lexical
    auto* build = app.add_subcommand("build-lexical", "Build and save a BM25+ index");
    std::string build_corpus, build_out;
    TokenizerOptions build_tok;
    Bm25Options build_bm25;
    build->add_option("--corpus", build_corpus, "Corpus file")->required();
    build_tok.add(build);
    build_bm25.add(build);
    build->add_option("--out", build_out, "Index output path")->required();

    // bm25-search
    auto* bsearch = app.add_subcommand("bm25-search", "BM25+ ranking for one query or a QA file");
    LexicalSource bs_src;
    std::string bs_query, bs_qa, bs_out;
    std::size_t bs_k = 100;
    bs_src.add(bsearch);
    bsearch->add_option("--query", bs_query, "Query text");
    bsearch->add_option("--qa", bs_qa, "Rank every QA question");
    bsearch->add_option("--k", bs_k, "Hits per query")->capture_default_str()->check(CLI::PositiveNumber);
    bsearch->add_option("--out", bs_out, "Run file output (with --qa)");

    // load-vectors
    auto* loadv = app.add_subcommand("load-vectors", "Validate an article vector file against a corpus");
    std::string lv_corpus, lv_vectors;
    loadv->add_option("--corpus", lv_corpus, "Corpus file")->required();
    loadv->add_option("--vectors", lv_vectors, "Vector file")->required();

    // search
    auto* search = app.add_subcommand("search", "Hybrid ranking and threshold selection for one query");
    LexicalSource s_src;
    FusionOptions s_fusion;
    VectorOptions s_vec;
    std::string s_query, s_qa, s_out;
    std::optional<std::size_t> s_query_id;
    double s_threshold = 0.0;
    std::size_t s_k = 20, s_max_k = 20;
    s_src.add(search);
    s_fusion.add(search);
    s_vec.add(search);
    search->add_option("--query", s_query, "Query text");
    search->add_option("--qa", s_qa, "QA file (with --query-id)");
    search->add_option("--query-id", s_query_id, "QA query to run");
    search->add_option("--threshold", s_threshold, "Threshold band below the best score")->capture_default_str();
    search->add_option("--k", s_k, "Ranked hits to print")->capture_default_str()->check(CLI::PositiveNumber);
    search->add_option("--max-k", s_max_k, "Cap on the selected set")->capture_default_str()->check(CLI::PositiveNumber);
    search->add_option("--out", s_out, "Write the JSON result here");

    // run
    auto* run = app.add_subcommand("run", "End to end: tokenize, BM25+, dense, fuse, select, evaluate");
    LexicalSource r_src;
    FusionOptions r_fusion;
    VectorOptions r_vec;
    std::string r_qa, r_out, r_report, r_manifest;
    double r_threshold = 0.0;
    std::size_t r_k = 20, r_depth = 100, r_max_k = 20, r_threads = 0;
    std::uint64_t r_seed = 0;
    r_src.add(run, true);
    r_fusion.add(run);
    r_vec.add(run);
    run->add_option("--qa", r_qa, "QA file")->required();
    run->add_option("--out", r_out, "Run file output")->required();
    run->add_option("--report", r_report, "Evaluation report output (JSON)");
    run->add_option("--manifest", r_manifest, "Write the effective run manifest (JSON)");
    run->add_option("--threshold", r_threshold, "Threshold band for F2")->capture_default_str();
    run->add_option("--k", r_k, "Recall cutoff")->capture_default_str()->check(CLI::PositiveNumber);
    run->add_option("--depth", r_depth, "Hits kept per query in the run file")->capture_default_str()->check(CLI::PositiveNumber);
    run->add_option("--max-k", r_max_k, "Cap on selected sets")->capture_default_str()->check(CLI::PositiveNumber);
    run->add_option("--threads", r_threads, "Ranking threads (0 = all cores)")->capture_default_str();
    run->add_option("--seed", r_seed, "Recorded in the manifest; ranking is deterministic")->capture_default_str();

    // mine
    auto* minecmd = app.add_subcommand("mine", "Export contrastive training pairs with hard negatives");
    LexicalSource m_src;
    std::string m_run, m_qa, m_out;
    int m_round = 1;
    std::size_t m_k = 0, m_depth = 200;
    m_src.add(minecmd);
    minecmd->add_option("--round", m_round, "Training round (1, 2 or 3)")->required()->check(CLI::Range(1, 3));
    minecmd->add_option("--k", m_k, "Negatives per query (default 35/20/15 by round)");
    minecmd->add_option("--run", m_run, "Ranking source run file");
    minecmd->add_option("--depth", m_depth, "BM25+ depth when ranking on the fly")->capture_default_str();
    minecmd->add_option("--qa", m_qa, "QA file")->required();
    minecmd->add_option("--out", m_out, "Pair file output")->required();

    // eval
    auto* evalcmd = app.add_subcommand("eval", "Macro recall@k and F2 of a run file");
    std::string e_run, e_qa, e_out, e_tsv;
    lir_eval_options e_opts;
    lir_eval_options_default(&e_opts);
    evalcmd->add_option("--run", e_run, "Run file")->required();
    evalcmd->add_option("--qa", e_qa, "QA file")->required();
    evalcmd->add_option("--k", e_opts.k, "Recall cutoff")->capture_default_str()->check(CLI::PositiveNumber);
    evalcmd->add_option("--threshold", e_opts.threshold, "Threshold band for F2")->capture_default_str();
    evalcmd->add_option("--max-k", e_opts.max_k, "Cap on selected sets")->capture_default_str()->check(CLI::PositiveNumber);
    evalcmd->add_option("--out", e_out, "Report output (JSON)");
    evalcmd->add_option("--per-query", e_tsv, "Per-query table output (TSV)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Sweep the selection threshold for the best F2");
    std::string w_run, w_qa, w_out, w_curve;
    lir_grid w_grid{0.0, 0.01, 1.0};
    std::size_t w_max_k = 20;
    sweep->add_option("--run", w_run, "Run file")->required();
    sweep->add_option("--qa", w_qa, "QA file")->required();
    sweep->add_option("--start", w_grid.start, "Grid start")->capture_default_str();
    sweep->add_option("--step", w_grid.step, "Grid step")->capture_default_str();
    sweep->add_option("--end", w_grid.end, "Grid end")->capture_default_str();
    sweep->add_option("--max-k", w_max_k, "Cap on selected sets")->capture_default_str()->check(CLI::PositiveNumber);
    sweep->add_option("--out", w_out, "Result output (JSON)");
    sweep->add_option("--curve", w_curve, "Threshold/F2 curve output (CSV)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (stats->parsed()) return cmd_stats(stats_corpus, stats_tok, stats_qa, stats_top3, stats_out);

        if (build->parsed()) {
            auto corpus = load_corpus(build_corpus);
            const auto cfg = build_tok.config();
            lir_lexical* idx = nullptr;
            check(lir_lexical_build(corpus.get(), &cfg, &build_bm25.params, &idx), "building BM25+ index");
            LexicalPtr lexical(idx);
            check(lir_lexical_save(lexical.get(), build_out.c_str()), "saving index");
            summary_line({{"command", "build-lexical"},
                          {"status", "ok"},
                          {"articles", lir_lexical_num_docs(lexical.get())},
                          {"vocabulary", lir_lexical_vocabulary_size(lexical.get())},
                          {"avgdl", lir_lexical_avgdl(lexical.get())},
                          {"index", build_out}});
            return 0;
        }

        if (bsearch->parsed()) {
            if (bs_query.empty() == bs_qa.empty()) usage_error("bm25-search needs exactly one of --query or --qa");
            CorpusPtr corpus;
            if (!bs_src.corpus_path.empty()) corpus = load_corpus(bs_src.corpus_path);
            auto lexical = bs_src.open(corpus.get());
            if (!bs_query.empty()) {
                std::vector<std::size_t> pos(bs_k);
                std::vector<double> scores(bs_k);
                std::size_t n = 0;
                check(lir_lexical_top_k(lexical.get(), bs_query.c_str(), bs_k, pos.data(), scores.data(), &n), "search");
                print_ranked(pos, scores, n, corpus.get());
                summary_line({{"command", "bm25-search"}, {"status", "ok"}, {"hits", n}});
                return 0;
            }
            if (bs_out.empty()) usage_error("bm25-search --qa needs --out");
            auto qa = load_qa(bs_qa);
            lir_run_options opts;
            lir_run_options_default(&opts);
            opts.fusion.kind = LIR_FUSION_LEXICAL_ONLY;
            opts.depth = bs_k;
            lir_run* r = nullptr;
            check(lir_run_rank(lexical.get(), nullptr, qa.get(), nullptr, &opts, &r), "ranking");
            RunPtr ranked(r);
            check(lir_run_save(ranked.get(), bs_out.c_str()), "writing run");
            summary_line({{"command", "bm25-search"}, {"status", "ok"}, {"queries", lir_run_size(ranked.get())},
                          {"depth", bs_k}, {"run", bs_out}});
            return 0;
        }

        if (loadv->parsed()) {
            auto corpus = load_corpus(lv_corpus);
            lir_dense* d = nullptr;
            check(lir_dense_load(lv_vectors.c_str(), corpus.get(), &d), "loading vectors");
            DensePtr dense(d);
            summary_line({{"command", "load-vectors"}, {"status", "ok"}, {"dim", lir_dense_dim(dense.get())},
                          {"vectors", lir_dense_size(dense.get())}});
            return 0;
        }

        if (search->parsed()) {
            const auto method = s_fusion.method();
            CorpusPtr corpus;
            if (!s_src.corpus_path.empty()) corpus = load_corpus(s_src.corpus_path);
            auto lexical = s_src.open(corpus.get());

            std::string text = s_query;
            QaPtr qa;
            if (s_query_id) {
                if (s_qa.empty()) usage_error("--query-id requires --qa");
                qa = load_qa(s_qa);
                const char* q = lir_qa_question(qa.get(), *s_query_id);
                if (q == nullptr) throw Failure{1, "query id " + std::to_string(*s_query_id) + " not in QA file"};
                text = q;
            }
            if (text.empty()) usage_error("search needs --query or --qa with --query-id");

            QueriesPtr queries;
            DensePtr dense;
            std::vector<double> qvec;
            if (s_fusion.semantic()) {
                if (corpus == nullptr) usage_error("semantic fusion needs --corpus to align article vectors");
                if (!s_vec.query_vectors.empty() && !s_query_id) usage_error("--query-vectors needs --query-id");
                queries = s_vec.open_queries();
                dense = s_vec.open_dense(corpus.get(), queries.get());
                if (!s_vec.query_vectors.empty()) {
                    qvec.resize(lir_queries_dim(queries.get()));
                    check(lir_queries_vector(queries.get(), *s_query_id, qvec.data(), qvec.size()), "query vector");
                }
            }

            lir_run_options opts;
            lir_run_options_default(&opts);
            opts.fusion = method;
            opts.depth = s_k;
            opts.candidate_pool = s_fusion.candidate_pool;
            OwnedString json;
            check(lir_search(lexical.get(), dense.get(), queries.get(), text.c_str(), qvec.empty() ? nullptr : qvec.data(),
                             qvec.size(), &opts, s_threshold, s_max_k, json.out()),
                  "search");
            const auto result = ojson::parse(json.str());
            std::printf("selected:\n");
            for (const auto& h : result["selected"]) {
                std::printf("  %-24s %-12s fused %.6f  lexical %.6f  semantic %.6f\n",
                            h["law_id"].get<std::string>().c_str(), h["article_id"].get<std::string>().c_str(),
                            h["fused"].get<double>(), h["lexical"].get<double>(), h["semantic"].get<double>());
            }
            if (!s_out.empty()) write_file(s_out, result.dump(2) + "\n");
            summary_line({{"command", "search"}, {"status", "ok"}, {"selected", result["selected"].size()},
                          {"hits", result["hits"].size()}});
            return 0;
        }

        if (run->parsed()) {
            const auto method = r_fusion.method();
            if (r_fusion.semantic() && r_vec.vectors.empty() && r_vec.provider.empty()) {
                usage_error("semantic fusion needs --vectors or --provider");
            }
            auto corpus = load_corpus(r_src.corpus_path);
            auto lexical = r_src.open(corpus.get());
            auto qa = load_qa(r_qa);
            QueriesPtr queries;
            DensePtr dense;
            if (r_fusion.semantic()) {
                queries = r_vec.open_queries();
                dense = r_vec.open_dense(corpus.get(), queries.get());
            }

            lir_run_options opts;
            lir_run_options_default(&opts);
            opts.fusion = method;
            opts.depth = r_depth;
            opts.candidate_pool = r_fusion.candidate_pool;
            opts.threads = r_threads;
            lir_run* rr = nullptr;
            check(lir_run_rank(lexical.get(), dense.get(), qa.get(), queries.get(), &opts, &rr), "ranking");
            RunPtr ranked(rr);
            check(lir_run_save(ranked.get(), r_out.c_str()), "writing run");

            lir_eval_options eo{r_k, r_threshold, r_max_k};
            lir_eval_summary es{};
            OwnedString report;
            check(lir_evaluate(ranked.get(), qa.get(), &eo, &es, report.out(), nullptr), "evaluation");
            if (!r_report.empty()) write_file(r_report, report.str() + "\n");

            if (!r_manifest.empty()) {
                ojson manifest;
                manifest["corpus"] = r_src.corpus_path;
                manifest["index"] = r_src.index_path.empty() ? ojson() : ojson(r_src.index_path);
                manifest["tokenizer"] = {{"unit", r_src.tokenizer.unit},
                                         {"lowercase", !r_src.tokenizer.no_lowercase},
                                         {"stopwords", r_src.tokenizer.stopwords.empty()
                                                           ? ojson()
                                                           : ojson(r_src.tokenizer.stopwords)}};
                manifest["bm25"] = {{"k1", r_src.bm25.params.k1}, {"b", r_src.bm25.params.b},
                                    {"delta", r_src.bm25.params.delta}};
                manifest["vectors"] = r_vec.vectors.empty() ? ojson() : ojson(r_vec.vectors);
                manifest["query_vectors"] = r_vec.query_vectors.empty() ? ojson() : ojson(r_vec.query_vectors);
                manifest["provider"] = r_vec.provider.empty() ? ojson() : ojson(r_vec.provider);
                manifest["fusion"] = {{"method", r_fusion.fusion},
                                      {"alpha", r_fusion.alpha ? ojson(*r_fusion.alpha) : ojson()},
                                      {"candidate_pool", r_fusion.candidate_pool}};
                manifest["selection"] = {{"threshold", r_threshold}, {"max_k", r_max_k}};
                manifest["k"] = r_k;
                manifest["depth"] = r_depth;
                manifest["outputs"] = {{"run", r_out}, {"report", r_report.empty() ? ojson() : ojson(r_report)}};
                manifest["seed"] = r_seed;
                write_file(r_manifest, manifest.dump(2) + "\n");
            }
            summary_line({{"command", "run"}, {"status", "ok"}, {"queries", es.num_queries},
                          {"recall_at_k", es.recall_at_k}, {"f2", es.f2}, {"run", r_out}});
            return 0;
        }

        if (minecmd->parsed()) {
            auto qa = load_qa(m_qa);
            RunPtr source;
            if (!m_run.empty()) {
                source = load_run(m_run);
            } else {
                if (m_round != 1) usage_error("rounds 2 and 3 need --run from the previous round's model");
                CorpusPtr corpus;
                if (!m_src.corpus_path.empty()) corpus = load_corpus(m_src.corpus_path);
                auto lexical = m_src.open(corpus.get());
                lir_run_options opts;
                lir_run_options_default(&opts);
                opts.fusion.kind = LIR_FUSION_LEXICAL_ONLY;
                opts.depth = m_depth;
                lir_run* rr = nullptr;
                check(lir_run_rank(lexical.get(), nullptr, qa.get(), nullptr, &opts, &rr), "BM25+ ranking");
                source.reset(rr);
            }
            lir_mine_summary ms{};
            OwnedString warnings;
            check(lir_mine(qa.get(), source.get(), m_round, m_k, m_out.c_str(), &ms, warnings.out()), "mining");
            std::istringstream ws(warnings.str());
            for (std::string line; std::getline(ws, line);) std::cerr << "warning: " << line << '\n';
            summary_line({{"command", "mine"}, {"status", "ok"}, {"round", m_round}, {"k", ms.k},
                          {"queries", ms.queries}, {"pairs", ms.pairs}, {"warnings", ms.warnings}, {"out", m_out}});
            return 0;
        }

        if (evalcmd->parsed()) {
            auto ranked = load_run(e_run);
            auto qa = load_qa(e_qa);
            lir_eval_summary es{};
            OwnedString report, tsv;
            check(lir_evaluate(ranked.get(), qa.get(), &e_opts, &es, report.out(), tsv.out()), "evaluation");
            if (!e_out.empty()) write_file(e_out, report.str() + "\n");
            if (!e_tsv.empty()) write_file(e_tsv, tsv.str());
            if (e_out.empty()) std::cout << report.str() << '\n';
            summary_line({{"command", "eval"}, {"status", "ok"}, {"queries", es.num_queries}, {"k", e_opts.k},
                          {"recall_at_k", es.recall_at_k}, {"threshold", e_opts.threshold}, {"f2", es.f2}});
            return 0;
        }

        if (sweep->parsed()) {
            auto ranked = load_run(w_run);
            auto qa = load_qa(w_qa);
            lir_sweep_summary ss{};
            OwnedString json, csv;
            check(lir_sweep(ranked.get(), qa.get(), &w_grid, w_max_k, &ss, json.out(), csv.out()), "sweep");
            if (!w_out.empty()) write_file(w_out, json.str() + "\n");
            if (!w_curve.empty()) write_file(w_curve, csv.str());
            summary_line({{"command", "sweep"}, {"status", "ok"}, {"best_threshold", ss.best_threshold},
                          {"best_f2", ss.best_f2}, {"points", ss.points}});
            return 0;
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << '\n';
        if (f.exit_code == 2) std::cerr << "run with --help for usage\n";
        return f.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
