#include "legalir/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "legalir/error.hpp"

namespace legalir {

Run rank_queries(const Bm25Index& lexical, const DenseIndex* dense, const std::vector<QARecord>& qa,
                 const QueryVectorFn& query_vector, const RunOptions& options) {
    if (options.depth == 0) throw Error(ErrorKind::kInvalidArgument, "run depth must be >= 1");
    const bool semantic = options.method.uses_semantic();
    if (semantic && (dense == nullptr || !query_vector)) {
        throw Error(ErrorKind::kInvalidArgument, "fusion method '" + std::string(to_string(options.method.kind())) +
                                                     "' needs article and query vectors");
    }

    std::vector<EmbeddingVector> qvecs(qa.size());
    if (semantic) {
        for (std::size_t i = 0; i < qa.size(); ++i) {
            qvecs[i] = query_vector(qa[i]);
            if (qvecs[i].size() != dense->dim()) {
                throw Error(ErrorKind::kValidation, "query " + std::to_string(qa[i].query_id) + " vector has dimension " +
                                                        std::to_string(qvecs[i].size()) + ", index has " +
                                                        std::to_string(dense->dim()));
            }
        }
    }

    std::vector<QueryRanking> rankings(qa.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < qa.size(); i = next++) {
            try {
                auto hits = rank(lexical, semantic ? dense : nullptr, lexical.query_terms(qa[i].question), qvecs[i],
                                 options.method, options.rank);
                if (hits.size() > options.depth) hits.resize(options.depth);
                rankings[i] = {qa[i].query_id, std::move(hits)};
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = qa.size();
            }
        }
    };

    std::size_t threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(1, qa.size()));
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }
    if (failure) std::rethrow_exception(failure);

    Run run;
    for (auto& r : rankings) run.add(std::move(r));
    return run;
}

}  // namespace legalir
