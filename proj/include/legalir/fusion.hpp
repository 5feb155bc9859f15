#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "legalir/bm25.hpp"
#include "legalir/corpus.hpp"
#include "legalir/dense.hpp"

namespace legalir {

enum class FusionKind { kSqrtProd, kProd, kLinear, kLexicalOnly, kSemanticOnly };

std::string_view to_string(FusionKind kind);
FusionKind parse_fusion_kind(std::string_view name);

class FusionMethod {
public:
    FusionMethod() = default;
    /// `alpha` must be given for kLinear (in [0,1]) and only for kLinear.
    explicit FusionMethod(FusionKind kind, std::optional<double> alpha = std::nullopt);

    static FusionMethod linear(double alpha) { return FusionMethod(FusionKind::kLinear, alpha); }

    FusionKind kind() const noexcept { return kind_; }
    std::optional<double> alpha() const noexcept { return alpha_; }

    bool uses_lexical() const noexcept { return kind_ != FusionKind::kSemanticOnly; }
    bool uses_semantic() const noexcept { return kind_ != FusionKind::kLexicalOnly; }

private:
    FusionKind kind_ = FusionKind::kSqrtProd;
    std::optional<double> alpha_;
};

/// Throws Error(kDomain) for a negative lexical score under kSqrtProd.
double fuse(double lexical, double semantic, const FusionMethod& method);

struct ScoredHit {
    std::size_t position = 0;
    ArticleRef ref;
    double lexical = 0.0;
    double semantic = 0.0;
    double fused = 0.0;

    friend bool operator==(const ScoredHit&, const ScoredHit&) = default;
};

struct RankOptions {
    /// 0 scores the whole corpus; N > 0 fuses only BM25+'s top N.
    std::size_t candidate_pool = 0;
};

/// Fused ranking of the corpus for one query, sorted by fused score
/// descending and position ascending. `dense` may be null only for
/// kLexicalOnly; under kLexicalOnly semantic scores are always 0.
/// `unit_query` must be normalized when dense scores are used.
std::vector<ScoredHit> rank(const Bm25Index& lexical, const DenseIndex* dense, const TokenStream& query_terms,
                            std::span<const double> unit_query, const FusionMethod& method,
                            const RankOptions& options = {});

struct SelectionConfig {
    double threshold = 0.0;
    std::size_t max_k = 20;
};

/// Hits with fused >= best - threshold, at most max_k of them. Always keeps
/// the top hit. Throws on an empty ranking or a negative threshold.
std::vector<ScoredHit> select(std::span<const ScoredHit> ranked, const SelectionConfig& cfg);

}  // namespace legalir
