#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "legalir/corpus.hpp"
#include "legalir/fusion.hpp"
#include "legalir/run_file.hpp"

namespace legalir {

struct EvalConfig {
    std::size_t k_recall = 20;
    SelectionConfig selection;
};

struct QueryMetrics {
    std::size_t query_id = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f2 = 0.0;
    double recall_at_k = 0.0;
    std::size_t retrieved = 0;
    std::size_t relevant = 0;
};

struct MacroResult {
    double macro = 0.0;
    std::vector<double> per_query;
};

struct PrfResult {
    double precision = 0.0;
    double recall = 0.0;
    double f2 = 0.0;
};

/// 5PR / (4P + R), defined as 0 when P = R = 0.
double f2_score(double precision, double recall);

PrfResult prf(const std::vector<ArticleRef>& retrieved, const std::vector<ArticleRef>& relevant);

/// Per-query |top-k ∩ relevant| / |relevant| and its unweighted mean.
/// Throws for k = 0 or a query absent from the run.
MacroResult recall_at_k(const Run& run, const std::vector<QARecord>& qa, std::size_t k);

/// Answer sets keyed by query id.
using Selections = std::unordered_map<std::size_t, std::vector<ArticleRef>>;

MacroResult f2(const Selections& selected, const std::vector<QARecord>& qa);

/// Applies the threshold band to every query of the run. Queries with no
/// hits get an empty selection.
Selections select_all(const Run& run, const std::vector<QARecord>& qa, const SelectionConfig& cfg);

struct GroupMetrics {
    std::size_t queries = 0;
    double recall_at_k = 0.0;
    double f2 = 0.0;
};

/// Keyed by |relevant|, with 7 standing for "7 or more". Empty groups are
/// absent.
using GroupTable = std::map<std::size_t, GroupMetrics>;

GroupTable breakdown_by_num_relevant(const std::vector<QueryMetrics>& per_query);

struct EvalReport {
    std::size_t k = 20;
    double threshold = 0.0;
    std::size_t max_k = 20;
    double recall_at_k = 0.0;
    double f2 = 0.0;
    std::vector<QueryMetrics> per_query;
    GroupTable by_num_relevant;
};

EvalReport evaluate(const Run& run, const std::vector<QARecord>& qa, const EvalConfig& cfg);

struct ThresholdGrid {
    double start = 0.0;
    double step = 0.01;
    double end = 1.0;

    /// start + i*step for i = 0.. while <= end (with 1e-9 slack).
    std::vector<double> points() const;
};

struct SweepPoint {
    double threshold = 0.0;
    double f2 = 0.0;
};

struct SweepResult {
    double best_threshold = 0.0;
    double best_f2 = 0.0;
    std::vector<SweepPoint> curve;
};

/// Ties go to the smallest threshold.
SweepResult sweep_threshold(const Run& run, const std::vector<QARecord>& qa, const std::vector<double>& grid,
                            std::size_t max_k = 20);

std::string report_to_json(const EvalReport& report);
std::string per_query_tsv(const EvalReport& report);
std::string sweep_to_json(const SweepResult& sweep);
std::string sweep_curve_csv(const SweepResult& sweep);

}  // namespace legalir
