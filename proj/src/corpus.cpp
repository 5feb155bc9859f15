#include "legalir/corpus.hpp"

#include <fstream>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "legalir/error.hpp"

namespace legalir {
namespace {

using nlohmann::json;

std::string where(const std::filesystem::path& path, std::size_t line_no) {
    return path.string() + ":" + std::to_string(line_no);
}

std::string require_string(const json& obj, const char* field, const std::string& loc) {
    auto it = obj.find(field);
    if (it == obj.end() || !it->is_string()) {
        throw Error(ErrorKind::kParse, loc + ": missing or non-string field '" + field + "'");
    }
    return it->get<std::string>();
}

std::string optional_string(const json& obj, const char* field, const std::string& loc) {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) return {};
    if (!it->is_string()) throw Error(ErrorKind::kParse, loc + ": field '" + field + "' is not a string");
    return it->get<std::string>();
}

json parse_line(const std::string& line, const std::string& loc) {
    try {
        auto doc = json::parse(line);
        if (!doc.is_object()) throw Error(ErrorKind::kParse, loc + ": record is not a JSON object");
        return doc;
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::kParse, loc + ": " + e.what());
    }
}

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

std::string combine_title_body(const std::string& title, const std::string& body) {
    if (title.empty()) return body;
    if (body.empty()) return title;
    return title + " " + body;
}

void Corpus::add_law(std::string law_id, std::vector<Article> articles) {
    if (law_id.empty()) throw Error(ErrorKind::kValidation, "law with empty law_id");
    const std::size_t first = articles_.size();
    std::unordered_set<ArticleRef, ArticleRefHash> seen;
    for (auto& a : articles) {
        a.ref.law_id = law_id;
        if (a.ref.article_id.empty()) {
            throw Error(ErrorKind::kValidation, "law " + law_id + ": article with empty article_id");
        }
        if (by_ref_.contains(a.ref) || !seen.insert(a.ref).second) {
            throw Error(ErrorKind::kValidation, "duplicate article reference " + a.ref.key());
        }
        a.combined = combine_title_body(a.title, a.body);
    }
    for (auto& a : articles) {
        by_ref_.emplace(a.ref, articles_.size());
        articles_.push_back(std::move(a));
    }
    laws_.push_back({std::move(law_id), first, articles_.size() - first});
}

const Article& Corpus::at(std::size_t position) const {
    if (position >= articles_.size()) {
        throw Error(ErrorKind::kRange, "article position " + std::to_string(position) + " out of range");
    }
    return articles_[position];
}

std::optional<std::size_t> Corpus::find(const ArticleRef& ref) const {
    auto it = by_ref_.find(ref);
    if (it == by_ref_.end()) return std::nullopt;
    return it->second;
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error(path.string(), "cannot open corpus file");

    Corpus corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const auto loc = where(path, line_no);
        const auto doc = parse_line(line, loc);
        auto law_id = require_string(doc, "law_id", loc);
        auto it = doc.find("articles");
        if (it == doc.end() || !it->is_array()) {
            throw Error(ErrorKind::kParse, loc + ": missing or non-array field 'articles'");
        }
        std::vector<Article> articles;
        articles.reserve(it->size());
        std::size_t idx = 0;
        for (const auto& a : *it) {
            const auto aloc = loc + " article " + std::to_string(idx++);
            if (!a.is_object()) throw Error(ErrorKind::kParse, aloc + ": not a JSON object");
            Article art;
            art.ref.article_id = require_string(a, "article_id", aloc);
            art.title = optional_string(a, "title", aloc);
            art.body = optional_string(a, "text", aloc);
            articles.push_back(std::move(art));
        }
        try {
            corpus.add_law(std::move(law_id), std::move(articles));
        } catch (const Error& e) {
            throw Error(e.kind(), loc + ": " + e.what());
        }
    }
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error(path.string(), "cannot open for writing");
    for (const auto& law : corpus.laws()) {
        nlohmann::ordered_json doc;
        doc["law_id"] = law.law_id;
        doc["articles"] = nlohmann::ordered_json::array();
        for (std::size_t i = law.first; i < law.first + law.count; ++i) {
            const auto& a = corpus.articles()[i];
            doc["articles"].push_back({{"article_id", a.ref.article_id}, {"title", a.title}, {"text", a.body}});
        }
        out << doc.dump() << '\n';
    }
    if (!out) throw io_error(path.string(), "write failed");
}

QASet load_qa(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error(path.string(), "cannot open QA file");

    QASet qa;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const auto loc = where(path, line_no);
        const auto doc = parse_line(line, loc);
        QARecord rec;
        rec.query_id = qa.records.size();
        rec.question = require_string(doc, "question", loc);
        auto it = doc.find("relevant_articles");
        if (it == doc.end() || !it->is_array()) {
            throw Error(ErrorKind::kParse, loc + ": missing or non-array field 'relevant_articles'");
        }
        std::set<ArticleRef> seen;
        for (const auto& r : *it) {
            if (!r.is_object()) throw Error(ErrorKind::kParse, loc + ": relevant article is not an object");
            ArticleRef ref{require_string(r, "law_id", loc), require_string(r, "article_id", loc)};
            if (!seen.insert(ref).second) {
                qa.warnings.push_back(loc + ": duplicate relevant article " + ref.key() + " dropped");
                continue;
            }
            rec.relevant.push_back(std::move(ref));
        }
        if (rec.relevant.empty()) {
            throw Error(ErrorKind::kValidation, loc + ": query has no relevant articles");
        }
        qa.records.push_back(std::move(rec));
    }
    return qa;
}

QaCoverage qa_coverage(const Corpus& corpus, const std::vector<QARecord>& qa) {
    QaCoverage cov;
    cov.corpus_articles = corpus.size();
    std::unordered_set<std::size_t> present;
    std::set<ArticleRef> dangling;
    for (const auto& rec : qa) {
        for (const auto& ref : rec.relevant) {
            if (auto pos = corpus.find(ref)) {
                present.insert(*pos);
            } else {
                dangling.insert(ref);
            }
        }
    }
    cov.distinct_referenced = present.size();
    cov.fraction = corpus.size() == 0 ? 0.0 : static_cast<double>(present.size()) / corpus.size();
    cov.dangling.assign(dangling.begin(), dangling.end());
    return cov;
}

std::size_t LengthHistogram::total() const noexcept {
    std::size_t n = 0;
    for (auto c : counts) n += c;
    return n;
}

double LengthHistogram::proportion(std::size_t bucket) const noexcept {
    const auto n = total();
    return n == 0 ? 0.0 : static_cast<double>(counts[bucket]) / n;
}

std::size_t LengthHistogram::bucket_of(std::size_t length) noexcept {
    if (length <= 100) return 0;
    if (length <= 256) return 1;
    if (length <= 512) return 2;
    return 3;
}

LengthHistogram length_histogram(const Corpus& corpus, TokenUnit unit) {
    LengthHistogram h;
    h.unit = unit;
    for (const auto& a : corpus.articles()) {
        ++h.counts[LengthHistogram::bucket_of(tokenize(a.combined, unit, false).size())];
    }
    return h;
}

}  // namespace legalir
