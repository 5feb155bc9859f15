#include "legalir/dense.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "legalir/error.hpp"

namespace legalir {
namespace {

using nlohmann::json;

struct VectorLine {
    std::string id;
    EmbeddingVector values;
};

// Streams `{"id": ..., "vector": [...]}` records, enforcing a uniform dim.
template <typename Fn>
std::size_t read_vector_lines(const std::filesystem::path& path, Fn&& on_record) {
    std::ifstream in(path);
    if (!in) throw io_error(path.string(), "cannot open vector file");
    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        const auto loc = path.string() + ":" + std::to_string(line_no);
        json doc;
        try {
            doc = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(ErrorKind::kParse, loc + ": " + e.what());
        }
        // Metadata lines written by the precompute tool carry no vector.
        if (doc.is_object() && !doc.contains("vector") && doc.contains("meta")) continue;
        if (!doc.is_object() || !doc.contains("id") || !doc["id"].is_string() || !doc.contains("vector") ||
            !doc["vector"].is_array()) {
            throw Error(ErrorKind::kParse, loc + ": expected {\"id\": string, \"vector\": [numbers]}");
        }
        VectorLine rec;
        rec.id = doc["id"].get<std::string>();
        rec.values.reserve(doc["vector"].size());
        for (const auto& v : doc["vector"]) {
            if (!v.is_number()) throw Error(ErrorKind::kParse, loc + ": non-numeric vector component");
            rec.values.push_back(v.get<double>());
        }
        if (rec.values.empty()) throw Error(ErrorKind::kValidation, loc + ": empty vector");
        if (dim == 0) {
            dim = rec.values.size();
        } else if (rec.values.size() != dim) {
            throw Error(ErrorKind::kValidation, loc + ": dimension " + std::to_string(rec.values.size()) +
                                                    " differs from " + std::to_string(dim));
        }
        try {
            on_record(std::move(rec));
        } catch (const Error& e) {
            throw Error(e.kind(), loc + ": " + e.what());
        }
    }
    return dim;
}

}  // namespace

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw Error(ErrorKind::kInvalidArgument, "cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                                                     std::to_string(v.size()) + ")");
    }
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) throw Error(ErrorKind::kInvalidArgument, "cosine: zero vector");
    return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

EmbeddingVector normalized(std::span<const double> v) {
    double norm = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) throw Error(ErrorKind::kValidation, "vector contains NaN or infinite values");
        norm += x * x;
    }
    if (v.empty() || norm == 0.0) throw Error(ErrorKind::kValidation, "cannot normalize a zero vector");
    norm = std::sqrt(norm);
    EmbeddingVector out(v.begin(), v.end());
    for (double& x : out) x /= norm;
    return out;
}

DenseIndex::DenseIndex(std::size_t dim, const std::vector<EmbeddingVector>& vectors, std::string source)
    : dim_(dim), source_(std::move(source)) {
    if (dim == 0) throw Error(ErrorKind::kInvalidArgument, "dense index dimension must be positive");
    data_.reserve(dim * vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != dim) {
            throw Error(ErrorKind::kValidation, "vector " + std::to_string(i) + " has dimension " +
                                                    std::to_string(vectors[i].size()) + ", expected " +
                                                    std::to_string(dim));
        }
        for (double x : normalized(vectors[i])) data_.push_back(static_cast<float>(x));
    }
}

std::span<const float> DenseIndex::vector(std::size_t position) const {
    if (position >= size()) throw Error(ErrorKind::kRange, "vector position out of range");
    return {data_.data() + position * dim_, dim_};
}

double DenseIndex::similarity(std::span<const double> unit_query, std::size_t position) const {
    if (unit_query.size() != dim_) {
        throw Error(ErrorKind::kInvalidArgument, "query dimension " + std::to_string(unit_query.size()) +
                                                     " does not match index dimension " + std::to_string(dim_));
    }
    const float* row = data_.data() + position * dim_;
    double dot = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) dot += unit_query[i] * static_cast<double>(row[i]);
    return std::clamp(dot, -1.0, 1.0);
}

std::vector<double> DenseIndex::similarity_all(std::span<const double> unit_query) const {
    std::vector<double> out(size());
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = similarity(unit_query, p);
    return out;
}

std::vector<RankedDoc> DenseIndex::top_k(std::span<const double> unit_query, std::size_t k) const {
    const auto sims = similarity_all(unit_query);
    std::vector<RankedDoc> docs(sims.size());
    for (std::size_t p = 0; p < sims.size(); ++p) docs[p] = {p, sims[p]};
    return take_top_k(std::move(docs), k);
}

DenseIndex load_vectors(const std::filesystem::path& path, const Corpus& corpus) {
    std::unordered_map<std::string, std::size_t> by_key;
    by_key.reserve(corpus.size());
    for (std::size_t p = 0; p < corpus.size(); ++p) by_key.emplace(corpus.articles()[p].ref.key(), p);

    std::vector<EmbeddingVector> vectors(corpus.size());
    std::vector<bool> seen(corpus.size(), false);
    const auto dim = read_vector_lines(path, [&](VectorLine rec) {
        auto it = by_key.find(rec.id);
        if (it == by_key.end()) throw Error(ErrorKind::kValidation, "vector id '" + rec.id + "' is not in the corpus");
        if (seen[it->second]) throw Error(ErrorKind::kValidation, "duplicate vector id '" + rec.id + "'");
        seen[it->second] = true;
        vectors[it->second] = std::move(rec.values);
    });

    std::vector<std::string> missing;
    for (std::size_t p = 0; p < corpus.size(); ++p) {
        if (!seen[p]) missing.push_back(corpus.articles()[p].ref.key());
    }
    if (!missing.empty()) {
        std::string msg = path.string() + ": missing vectors for " + std::to_string(missing.size()) + " article(s):";
        for (std::size_t i = 0; i < missing.size() && i < 10; ++i) msg += " " + missing[i];
        if (missing.size() > 10) msg += " ...";
        throw Error(ErrorKind::kValidation, msg);
    }
    return DenseIndex(dim, vectors, path.string());
}

QueryVectorFile QueryVectorFile::load(const std::filesystem::path& path) {
    QueryVectorFile file;
    file.dim_ = read_vector_lines(path, [&](VectorLine rec) {
        if (rec.id.size() < 2 || rec.id[0] != 'q' ||
            rec.id.find_first_not_of("0123456789", 1) != std::string::npos) {
            throw Error(ErrorKind::kValidation, "query vector id '" + rec.id + "' is not of the form q<n>");
        }
        const auto qid = static_cast<std::size_t>(std::stoull(rec.id.substr(1)));
        if (!file.vectors_.emplace(qid, normalized(rec.values)).second) {
            throw Error(ErrorKind::kValidation, "duplicate query vector id '" + rec.id + "'");
        }
    });
    return file;
}

const EmbeddingVector& QueryVectorFile::at(std::size_t query_id) const {
    auto it = vectors_.find(query_id);
    if (it == vectors_.end()) {
        throw Error(ErrorKind::kValidation, "no query vector for q" + std::to_string(query_id));
    }
    return it->second;
}

}  // namespace legalir
