#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "legalir/corpus.hpp"
#include "legalir/text.hpp"

namespace legalir {

struct Bm25Params {
    double k1 = 1.5;
    double b = 0.75;
    double delta = 1.0;

    /// Throws Error(kInvalidArgument) unless k1 > 0, 0 <= b <= 1, delta >= 0.
    void validate() const;
};

struct Posting {
    std::uint32_t doc = 0;
    std::uint32_t tf = 0;

    friend bool operator==(const Posting&, const Posting&) = default;
};

struct RankedDoc {
    std::size_t position = 0;
    double score = 0.0;
};

/// Orders by score descending, then position ascending.
inline bool ranks_before(const RankedDoc& a, const RankedDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.position < b.position;
}

/// Keeps the best k entries of `docs` in rank order.
std::vector<RankedDoc> take_top_k(std::vector<RankedDoc> docs, std::size_t k);

struct Top3Summary {
    std::vector<double> per_query;
    double min = 0.0;
    double mean = 0.0;
    double max = 0.0;
};

/// BM25+ over an inverted index. Scores follow
///   sum_q idf(q) * (f*(k1+1) / (f + k1*(1 - b + b*dl/avgdl)) + delta),
///   idf(q) = ln((N+1)/n_q),
/// where terms unseen in the corpus contribute nothing and repeated query
/// terms count once per occurrence.
class Bm25Index {
public:
    static constexpr std::uint32_t kFormatVersion = 1;

    Bm25Index() = default;

    /// Throws Error(kBuild) when `docs` is empty.
    static Bm25Index build(const std::vector<TokenStream>& docs, Bm25Params params = {});

    /// Tokenizes every article's combined text with `tokenizer` (stopwords
    /// removed) and keeps the refs and tokenizer settings for querying.
    static Bm25Index build(const Corpus& corpus, const Tokenizer& tokenizer, Bm25Params params = {});

    std::size_t num_docs() const noexcept { return doc_len_.size(); }
    double avgdl() const noexcept { return avgdl_; }
    const Bm25Params& params() const noexcept { return params_; }
    const Tokenizer& tokenizer() const noexcept { return tokenizer_; }
    const std::vector<ArticleRef>& refs() const noexcept { return refs_; }
    const std::vector<std::uint32_t>& doc_lengths() const noexcept { return doc_len_; }

    /// Empty span for unknown terms.
    std::span<const Posting> postings(const std::string& term) const;
    std::size_t vocabulary_size() const noexcept { return postings_.size(); }

    /// Zero for terms absent from the corpus.
    double idf(const std::string& term) const;

    /// Throws Error(kRange) for an invalid position.
    double score(const TokenStream& query, std::size_t position) const;

    /// Score of every article, indexed by position.
    std::vector<double> score_all(const TokenStream& query) const;

    std::vector<RankedDoc> top_k(const TokenStream& query, std::size_t k) const;

    /// Query text through the index's own tokenizer.
    TokenStream query_terms(std::string_view text) const { return tokenizer_.terms(text); }

    /// Mean of the three best scores per query. Throws when fewer than
    /// three articles are indexed.
    Top3Summary top3_average(const std::vector<TokenStream>& queries) const;

    void save(const std::filesystem::path& path) const;
    static Bm25Index load(const std::filesystem::path& path);

private:
    struct TermEntry {
        std::vector<Posting> postings;
        double idf = 0.0;
    };

    void finalize();
    double term_weight(std::uint32_t tf, std::size_t doc) const;

    Bm25Params params_;
    Tokenizer tokenizer_;
    std::vector<ArticleRef> refs_;
    std::unordered_map<std::string, TermEntry> postings_;
    std::vector<std::uint32_t> doc_len_;
    std::vector<double> norm_;
    double avgdl_ = 0.0;
};

}  // namespace legalir
