#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "legalir/bm25.hpp"
#include "legalir/corpus.hpp"
#include "legalir/dense.hpp"
#include "legalir/fusion.hpp"
#include "legalir/run_file.hpp"

namespace legalir {

/// Supplies the unit query vector for a QA record.
using QueryVectorFn = std::function<EmbeddingVector(const QARecord&)>;

struct RunOptions {
    FusionMethod method;
    RankOptions rank;
    /// Hits kept per query in the run file.
    std::size_t depth = 100;
    std::size_t threads = 0;
};

/// Ranks every QA query. Query vectors are fetched up front on the calling
/// thread; ranking then runs in parallel with results stored by query
/// index, so output is independent of thread count.
Run rank_queries(const Bm25Index& lexical, const DenseIndex* dense, const std::vector<QARecord>& qa,
                 const QueryVectorFn& query_vector, const RunOptions& options);

}  // namespace legalir
