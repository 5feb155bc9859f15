#include "legalir/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "legalir/error.hpp"

namespace legalir {
namespace {

constexpr char kMagic[8] = {'L', 'G', 'I', 'R', 'B', 'M', '2', '5'};

class BinaryWriter {
public:
    explicit BinaryWriter(std::ostream& out) : out_(out) {}

    template <typename T>
    void pod(const T& v) {
        out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void str(const std::string& s) {
        pod<std::uint64_t>(s.size());
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }

private:
    std::ostream& out_;
};

class BinaryReader {
public:
    BinaryReader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

    template <typename T>
    T pod() {
        T v{};
        in_.read(reinterpret_cast<char*>(&v), sizeof(T));
        check();
        return v;
    }
    std::string str() {
        const auto n = pod<std::uint64_t>();
        if (n > (1ULL << 32)) throw Error(ErrorKind::kParse, path_ + ": corrupt string length");
        std::string s(n, '\0');
        in_.read(s.data(), static_cast<std::streamsize>(n));
        check();
        return s;
    }

private:
    void check() {
        if (!in_) throw Error(ErrorKind::kParse, path_ + ": truncated index file");
    }

    std::istream& in_;
    std::string path_;
};

}  // namespace

void Bm25Params::validate() const {
    if (!(k1 > 0.0)) throw Error(ErrorKind::kInvalidArgument, "BM25+ k1 must be > 0");
    if (!(b >= 0.0 && b <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "BM25+ b must lie in [0, 1]");
    if (!(delta >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "BM25+ delta must be >= 0");
}

std::vector<RankedDoc> take_top_k(std::vector<RankedDoc> docs, std::size_t k) {
    k = std::min(k, docs.size());
    std::partial_sort(docs.begin(), docs.begin() + static_cast<std::ptrdiff_t>(k), docs.end(), ranks_before);
    docs.resize(k);
    return docs;
}

Bm25Index Bm25Index::build(const std::vector<TokenStream>& docs, Bm25Params params) {
    params.validate();
    if (docs.empty()) throw Error(ErrorKind::kBuild, "cannot build a BM25+ index over an empty corpus");
    if (docs.size() > UINT32_MAX) throw Error(ErrorKind::kBuild, "too many documents");

    Bm25Index index;
    index.params_ = params;
    index.doc_len_.reserve(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        index.doc_len_.push_back(static_cast<std::uint32_t>(docs[d].size()));
        // Postings are appended in document order, so each list stays sorted.
        std::unordered_map<std::string_view, std::uint32_t> tf;
        for (const auto& t : docs[d]) ++tf[t];
        for (const auto& [term, count] : tf) {
            index.postings_[std::string(term)].postings.push_back({static_cast<std::uint32_t>(d), count});
        }
    }
    index.finalize();
    return index;
}

Bm25Index Bm25Index::build(const Corpus& corpus, const Tokenizer& tokenizer, Bm25Params params) {
    std::vector<TokenStream> docs;
    docs.reserve(corpus.size());
    for (const auto& a : corpus.articles()) docs.push_back(tokenizer.terms(a.combined));
    auto index = build(docs, params);
    index.tokenizer_ = tokenizer;
    index.refs_.reserve(corpus.size());
    for (const auto& a : corpus.articles()) index.refs_.push_back(a.ref);
    return index;
}

void Bm25Index::finalize() {
    const double n_docs = static_cast<double>(doc_len_.size());
    double total = 0.0;
    for (auto len : doc_len_) total += len;
    avgdl_ = total / n_docs;

    norm_.resize(doc_len_.size());
    for (std::size_t d = 0; d < doc_len_.size(); ++d) {
        const double rel = avgdl_ > 0.0 ? doc_len_[d] / avgdl_ : 0.0;
        norm_[d] = params_.k1 * (1.0 - params_.b + params_.b * rel);
    }
    for (auto& [term, entry] : postings_) {
        entry.idf = std::log((n_docs + 1.0) / static_cast<double>(entry.postings.size()));
    }
}

double Bm25Index::term_weight(std::uint32_t tf, std::size_t doc) const {
    const double f = tf;
    return f * (params_.k1 + 1.0) / (f + norm_[doc]);
}

std::span<const Posting> Bm25Index::postings(const std::string& term) const {
    auto it = postings_.find(term);
    if (it == postings_.end()) return {};
    return it->second.postings;
}

double Bm25Index::idf(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? 0.0 : it->second.idf;
}

double Bm25Index::score(const TokenStream& query, std::size_t position) const {
    if (position >= num_docs()) {
        throw Error(ErrorKind::kRange, "article position " + std::to_string(position) + " out of range");
    }
    double s = 0.0;
    for (const auto& q : query) {
        auto it = postings_.find(q);
        if (it == postings_.end()) continue;
        const auto& plist = it->second.postings;
        auto p = std::lower_bound(plist.begin(), plist.end(), position,
                                  [](const Posting& a, std::size_t d) { return a.doc < d; });
        const double w = (p != plist.end() && p->doc == position) ? term_weight(p->tf, position) : 0.0;
        s += it->second.idf * (w + params_.delta);
    }
    return s;
}

std::vector<double> Bm25Index::score_all(const TokenStream& query) const {
    std::vector<double> scores(num_docs(), 0.0);
    for (const auto& q : query) {
        auto it = postings_.find(q);
        if (it == postings_.end()) continue;
        const double idf = it->second.idf;
        const double floor = idf * (0.0 + params_.delta);
        auto p = it->second.postings.begin();
        const auto end = it->second.postings.end();
        for (std::size_t d = 0; d < scores.size(); ++d) {
            if (p != end && p->doc == d) {
                scores[d] += idf * (term_weight(p->tf, d) + params_.delta);
                ++p;
            } else {
                scores[d] += floor;
            }
        }
    }
    return scores;
}

std::vector<RankedDoc> Bm25Index::top_k(const TokenStream& query, std::size_t k) const {
    const auto scores = score_all(query);
    std::vector<RankedDoc> docs(scores.size());
    for (std::size_t d = 0; d < scores.size(); ++d) docs[d] = {d, scores[d]};
    return take_top_k(std::move(docs), k);
}

Top3Summary Bm25Index::top3_average(const std::vector<TokenStream>& queries) const {
    if (num_docs() < 3) throw Error(ErrorKind::kInvalidArgument, "top-3 average needs at least 3 articles");
    Top3Summary out;
    out.per_query.reserve(queries.size());
    for (const auto& q : queries) {
        const auto top = top_k(q, 3);
        out.per_query.push_back((top[0].score + top[1].score + top[2].score) / 3.0);
    }
    if (!out.per_query.empty()) {
        auto [lo, hi] = std::minmax_element(out.per_query.begin(), out.per_query.end());
        out.min = *lo;
        out.max = *hi;
        double sum = 0.0;
        for (double v : out.per_query) sum += v;
        out.mean = sum / static_cast<double>(out.per_query.size());
    }
    return out;
}

void Bm25Index::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error(path.string(), "cannot open for writing");
    BinaryWriter w(out);
    out.write(kMagic, sizeof(kMagic));
    w.pod(kFormatVersion);
    w.pod(params_.k1);
    w.pod(params_.b);
    w.pod(params_.delta);
    w.pod<std::uint8_t>(tokenizer_.unit() == TokenUnit::kSyllable ? 0 : 1);
    w.pod<std::uint8_t>(tokenizer_.lowercase() ? 1 : 0);

    std::vector<std::string> stop(tokenizer_.stopwords().begin(), tokenizer_.stopwords().end());
    std::sort(stop.begin(), stop.end());
    w.pod<std::uint64_t>(stop.size());
    for (const auto& s : stop) w.str(s);

    w.pod<std::uint64_t>(doc_len_.size());
    w.pod<std::uint8_t>(refs_.empty() ? 0 : 1);
    for (const auto& r : refs_) {
        w.str(r.law_id);
        w.str(r.article_id);
    }
    for (auto len : doc_len_) w.pod(len);

    std::vector<const std::string*> terms;
    terms.reserve(postings_.size());
    for (const auto& [term, entry] : postings_) terms.push_back(&term);
    std::sort(terms.begin(), terms.end(), [](const auto* a, const auto* b) { return *a < *b; });
    w.pod<std::uint64_t>(terms.size());
    for (const auto* term : terms) {
        const auto& plist = postings_.at(*term).postings;
        w.str(*term);
        w.pod<std::uint64_t>(plist.size());
        for (const auto& p : plist) {
            w.pod(p.doc);
            w.pod(p.tf);
        }
    }
    if (!out) throw io_error(path.string(), "write failed");
}

Bm25Index Bm25Index::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error(path.string(), "cannot open index file");
    char magic[sizeof(kMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw Error(ErrorKind::kParse, path.string() + ": not a BM25+ index file");
    }
    BinaryReader r(in, path.string());
    const auto version = r.pod<std::uint32_t>();
    if (version != kFormatVersion) {
        throw Error(ErrorKind::kParse, path.string() + ": unsupported index format version " + std::to_string(version));
    }

    Bm25Index index;
    index.params_.k1 = r.pod<double>();
    index.params_.b = r.pod<double>();
    index.params_.delta = r.pod<double>();
    index.params_.validate();
    const auto unit = r.pod<std::uint8_t>() == 0 ? TokenUnit::kSyllable : TokenUnit::kWord;
    const bool lowercase = r.pod<std::uint8_t>() != 0;
    StopwordSet stop;
    for (auto n = r.pod<std::uint64_t>(); n > 0; --n) stop.insert(r.str());
    index.tokenizer_ = Tokenizer(unit, lowercase, std::move(stop));

    const auto n_docs = r.pod<std::uint64_t>();
    if (n_docs == 0 || n_docs > UINT32_MAX) throw Error(ErrorKind::kParse, path.string() + ": bad document count");
    if (r.pod<std::uint8_t>() != 0) {
        index.refs_.reserve(n_docs);
        for (std::uint64_t i = 0; i < n_docs; ++i) {
            auto law = r.str();
            auto art = r.str();
            index.refs_.push_back({std::move(law), std::move(art)});
        }
    }
    index.doc_len_.resize(n_docs);
    for (auto& len : index.doc_len_) len = r.pod<std::uint32_t>();

    const auto n_terms = r.pod<std::uint64_t>();
    index.postings_.reserve(n_terms);
    for (std::uint64_t t = 0; t < n_terms; ++t) {
        auto term = r.str();
        auto& entry = index.postings_[std::move(term)];
        const auto n = r.pod<std::uint64_t>();
        if (n == 0 || n > n_docs) throw Error(ErrorKind::kParse, path.string() + ": corrupt posting list");
        entry.postings.resize(n);
        for (auto& p : entry.postings) {
            p.doc = r.pod<std::uint32_t>();
            p.tf = r.pod<std::uint32_t>();
            if (p.doc >= n_docs || p.tf == 0) throw Error(ErrorKind::kParse, path.string() + ": corrupt posting");
        }
    }
    index.finalize();
    return index;
}

}  // namespace legalir
