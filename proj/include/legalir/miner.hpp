#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "legalir/corpus.hpp"
#include "legalir/run_file.hpp"

namespace legalir {

struct MiningConfig {
    int round = 1;
    std::size_t k = 35;

    /// 35, 20 and 15 negatives for rounds 1, 2 and 3.
    static std::size_t default_k(int round);
    static MiningConfig for_round(int round);
};

struct TrainingPair {
    std::size_t query_id = 0;
    std::string question;
    ArticleRef ref;
    int label = 0;

    friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
};

struct MiningResult {
    std::vector<TrainingPair> pairs;
    std::vector<std::string> warnings;
};

/// For each query: every gold article with label 1, then the first k
/// non-gold articles of its ranking with label 0. Queries are emitted in
/// query_id order. Throws Error(kValidation) if a query has no ranking.
MiningResult mine(const std::vector<QARecord>& qa, const Run& run, const MiningConfig& cfg);

/// One JSON object per line in the given order. Throws on empty input.
void export_pairs(const std::vector<TrainingPair>& pairs, const std::filesystem::path& path);
std::vector<TrainingPair> read_pairs(const std::filesystem::path& path);

}  // namespace legalir
