#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "legalir/text.hpp"

namespace legalir {

struct ArticleRef {
    std::string law_id;
    std::string article_id;

    /// "<law_id>#<article_id>", the id used in vector files.
    std::string key() const { return law_id + "#" + article_id; }

    friend bool operator==(const ArticleRef&, const ArticleRef&) = default;
    friend auto operator<=>(const ArticleRef&, const ArticleRef&) = default;
};

struct ArticleRefHash {
    std::size_t operator()(const ArticleRef& ref) const noexcept {
        std::size_t h = std::hash<std::string>{}(ref.law_id);
        return h ^ (std::hash<std::string>{}(ref.article_id) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    }
};

struct Article {
    ArticleRef ref;
    std::string title;
    std::string body;
    std::string combined;

    friend bool operator==(const Article&, const Article&) = default;
};

/// Title and body joined by a single space; either side may be empty.
std::string combine_title_body(const std::string& title, const std::string& body);

/// A law document: a contiguous run of articles in the corpus.
struct Law {
    std::string law_id;
    std::size_t first = 0;
    std::size_t count = 0;

    friend bool operator==(const Law&, const Law&) = default;
};

class Corpus {
public:
    Corpus() = default;

    /// Appends a law with its articles. Throws Error(kValidation) on an
    /// empty id or a reference that is already present.
    void add_law(std::string law_id, std::vector<Article> articles);

    std::size_t num_documents() const noexcept { return laws_.size(); }
    std::size_t size() const noexcept { return articles_.size(); }

    const std::vector<Law>& laws() const noexcept { return laws_; }
    const std::vector<Article>& articles() const noexcept { return articles_; }
    const Article& at(std::size_t position) const;

    std::optional<std::size_t> find(const ArticleRef& ref) const;

    friend bool operator==(const Corpus& a, const Corpus& b) {
        return a.laws_ == b.laws_ && a.articles_ == b.articles_;
    }

private:
    std::vector<Law> laws_;
    std::vector<Article> articles_;
    std::unordered_map<ArticleRef, std::size_t, ArticleRefHash> by_ref_;
};

Corpus load_corpus(const std::filesystem::path& path);

/// Writes the canonical one-law-per-line format; load_corpus reads it back
/// to an identical Corpus.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

struct QARecord {
    std::size_t query_id = 0;
    std::string question;
    std::vector<ArticleRef> relevant;

    friend bool operator==(const QARecord&, const QARecord&) = default;
};

struct QASet {
    std::vector<QARecord> records;
    std::vector<std::string> warnings;
};

QASet load_qa(const std::filesystem::path& path);

struct QaCoverage {
    std::size_t distinct_referenced = 0;
    double fraction = 0.0;
    std::size_t corpus_articles = 0;
    std::vector<ArticleRef> dangling;
};

/// Distinct gold articles present in the corpus; refs missing from the
/// corpus are listed once each in `dangling`.
QaCoverage qa_coverage(const Corpus& corpus, const std::vector<QARecord>& qa);

struct LengthHistogram {
    static constexpr std::size_t kBuckets = 4;
    static constexpr std::array<const char*, kBuckets> kLabels{"<100", "101-256", "257-512", "513+"};

    TokenUnit unit = TokenUnit::kSyllable;
    std::array<std::size_t, kBuckets> counts{};

    std::size_t total() const noexcept;
    double proportion(std::size_t bucket) const noexcept;

    /// Bucket for a token count; a length of exactly 100 falls in the first.
    static std::size_t bucket_of(std::size_t length) noexcept;
};

LengthHistogram length_histogram(const Corpus& corpus, TokenUnit unit);

}  // namespace legalir
