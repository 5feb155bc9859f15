#include "legalir/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "legalir/error.hpp"

namespace legalir {

std::string_view to_string(FusionKind kind) {
    switch (kind) {
        case FusionKind::kSqrtProd: return "sqrt_prod";
        case FusionKind::kProd: return "prod";
        case FusionKind::kLinear: return "linear";
        case FusionKind::kLexicalOnly: return "lexical_only";
        case FusionKind::kSemanticOnly: return "semantic_only";
    }
    return "unknown";
}

FusionKind parse_fusion_kind(std::string_view name) {
    for (auto kind : {FusionKind::kSqrtProd, FusionKind::kProd, FusionKind::kLinear, FusionKind::kLexicalOnly,
                      FusionKind::kSemanticOnly}) {
        if (to_string(kind) == name) return kind;
    }
    throw Error(ErrorKind::kInvalidArgument, "unknown fusion method '" + std::string(name) + "'");
}

FusionMethod::FusionMethod(FusionKind kind, std::optional<double> alpha) : kind_(kind), alpha_(alpha) {
    if (kind == FusionKind::kLinear) {
        if (!alpha) throw Error(ErrorKind::kInvalidArgument, "linear fusion requires alpha");
        if (!(*alpha >= 0.0 && *alpha <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "alpha must lie in [0, 1]");
    } else if (alpha) {
        throw Error(ErrorKind::kInvalidArgument, "alpha is only meaningful for linear fusion");
    }
}

double fuse(double lexical, double semantic, const FusionMethod& method) {
    switch (method.kind()) {
        case FusionKind::kSqrtProd:
            if (lexical < 0.0) throw Error(ErrorKind::kDomain, "sqrt_prod fusion needs a non-negative lexical score");
            return std::sqrt(lexical) * semantic;
        case FusionKind::kProd: return lexical * semantic;
        case FusionKind::kLinear: {
            const double a = *method.alpha();
            return (1.0 - a) * lexical + a * semantic;
        }
        case FusionKind::kLexicalOnly: return lexical;
        case FusionKind::kSemanticOnly: return semantic;
    }
    return 0.0;
}

std::vector<ScoredHit> rank(const Bm25Index& lexical, const DenseIndex* dense, const TokenStream& query_terms,
                            std::span<const double> unit_query, const FusionMethod& method,
                            const RankOptions& options) {
    if (method.uses_semantic() && dense == nullptr) {
        throw Error(ErrorKind::kInvalidArgument,
                    "fusion method '" + std::string(to_string(method.kind())) + "' needs a dense index");
    }
    if (dense != nullptr && dense->size() != lexical.num_docs()) {
        throw Error(ErrorKind::kValidation, "corpus mismatch: lexical index has " + std::to_string(lexical.num_docs()) +
                                                " articles, dense index has " + std::to_string(dense->size()));
    }

    const auto lex_scores = lexical.score_all(query_terms);
    std::vector<std::size_t> positions;
    if (options.candidate_pool > 0) {
        for (const auto& d : lexical.top_k(query_terms, options.candidate_pool)) positions.push_back(d.position);
    } else {
        positions.resize(lexical.num_docs());
        for (std::size_t p = 0; p < positions.size(); ++p) positions[p] = p;
    }

    const auto& refs = lexical.refs();
    std::vector<ScoredHit> hits;
    hits.reserve(positions.size());
    for (auto p : positions) {
        ScoredHit h;
        h.position = p;
        if (!refs.empty()) h.ref = refs[p];
        h.lexical = lex_scores[p];
        h.semantic = method.uses_semantic() ? dense->similarity(unit_query, p) : 0.0;
        h.fused = fuse(h.lexical, h.semantic, method);
        hits.push_back(std::move(h));
    }
    std::sort(hits.begin(), hits.end(), [](const ScoredHit& a, const ScoredHit& b) {
        if (a.fused != b.fused) return a.fused > b.fused;
        return a.position < b.position;
    });
    return hits;
}

std::vector<ScoredHit> select(std::span<const ScoredHit> ranked, const SelectionConfig& cfg) {
    if (ranked.empty()) throw Error(ErrorKind::kInvalidArgument, "cannot select from an empty ranking");
    if (!(cfg.threshold >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "threshold must be >= 0");
    if (cfg.max_k == 0) throw Error(ErrorKind::kInvalidArgument, "max_k must be >= 1");

    double best = ranked.front().fused;
    for (const auto& h : ranked) best = std::max(best, h.fused);
    const double floor = best - cfg.threshold;

    std::vector<ScoredHit> out;
    for (const auto& h : ranked) {
        if (out.size() == cfg.max_k) break;
        if (h.fused >= floor) out.push_back(h);
    }
    return out;
}

}  // namespace legalir
