#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "legalir/bm25.hpp"
#include "legalir/corpus.hpp"

namespace legalir {

using EmbeddingVector = std::vector<double>;

/// Cosine similarity clamped to [-1, 1]. Throws Error(kInvalidArgument) on
/// a dimension mismatch or a zero vector.
double cosine(std::span<const double> u, std::span<const double> v);

/// Returns v / |v|. Throws on zero, NaN or infinite input.
EmbeddingVector normalized(std::span<const double> v);

/// Exact cosine search over unit-normalized article vectors, one per
/// corpus position.
class DenseIndex {
public:
    DenseIndex() = default;

    /// `vectors[i]` belongs to article position i; every vector is
    /// normalized on insertion.
    DenseIndex(std::size_t dim, const std::vector<EmbeddingVector>& vectors, std::string source = {});

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
    const std::string& source() const noexcept { return source_; }

    std::span<const float> vector(std::size_t position) const;

    /// Dot product of a unit query with the stored unit vector.
    double similarity(std::span<const double> unit_query, std::size_t position) const;
    std::vector<double> similarity_all(std::span<const double> unit_query) const;

    /// Ranked by cosine descending, ties by position ascending.
    std::vector<RankedDoc> top_k(std::span<const double> unit_query, std::size_t k) const;

private:
    std::size_t dim_ = 0;
    std::vector<float> data_;
    std::string source_;
};

/// Loads `{"id": "<law_id>#<article_id>", "vector": [...]}` lines aligned to
/// corpus positions. Missing or duplicated ids and ragged dimensions are
/// rejected.
DenseIndex load_vectors(const std::filesystem::path& path, const Corpus& corpus);

/// Query vectors keyed by query id, read from `{"id": "q<n>", ...}` lines
/// and normalized on load.
class QueryVectorFile {
public:
    static QueryVectorFile load(const std::filesystem::path& path);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return vectors_.size(); }
    bool contains(std::size_t query_id) const { return vectors_.contains(query_id); }

    /// Throws Error(kValidation) when the id is absent.
    const EmbeddingVector& at(std::size_t query_id) const;

private:
    std::size_t dim_ = 0;
    std::unordered_map<std::size_t, EmbeddingVector> vectors_;
};

}  // namespace legalir
