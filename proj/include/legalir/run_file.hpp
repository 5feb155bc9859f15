#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <vector>

#include "legalir/fusion.hpp"

namespace legalir {

struct QueryRanking {
    std::size_t query_id = 0;
    std::vector<ScoredHit> hits;
};

/// Per-query rankings exchanged between ranking, mining and evaluation.
/// Hits read back from a file carry position 0; only the refs are used
/// downstream.
class Run {
public:
    static constexpr int kFormatVersion = 1;

    void add(QueryRanking ranking);

    std::size_t size() const noexcept { return rankings_.size(); }
    const std::vector<QueryRanking>& rankings() const noexcept { return rankings_; }

    /// Null when the query is absent.
    const QueryRanking* find(std::size_t query_id) const;

    void save(const std::filesystem::path& path) const;
    static Run load(const std::filesystem::path& path);

private:
    std::vector<QueryRanking> rankings_;
    std::map<std::size_t, std::size_t> index_;
};

}  // namespace legalir
