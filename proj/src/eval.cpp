#include "legalir/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "legalir/error.hpp"

namespace legalir {
namespace {

const QueryRanking& ranking_for(const Run& run, const QARecord& rec) {
    const auto* r = run.find(rec.query_id);
    if (r == nullptr) {
        throw Error(ErrorKind::kValidation, "query " + std::to_string(rec.query_id) + " is missing from the run");
    }
    return *r;
}

// Summed in sorted order so the result does not depend on query order.
double mean(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string group_label(std::size_t n) { return n >= 7 ? "7+" : std::to_string(n); }

}  // namespace

double f2_score(double precision, double recall) {
    const double denom = 4.0 * precision + recall;
    if (denom == 0.0) return 0.0;
    return 5.0 * precision * recall / denom;
}

PrfResult prf(const std::vector<ArticleRef>& retrieved, const std::vector<ArticleRef>& relevant) {
    const std::set<ArticleRef> got(retrieved.begin(), retrieved.end());
    const std::set<ArticleRef> gold(relevant.begin(), relevant.end());
    std::size_t correct = 0;
    for (const auto& r : got) correct += gold.contains(r) ? 1 : 0;

    PrfResult out;
    out.precision = got.empty() ? 0.0 : static_cast<double>(correct) / got.size();
    out.recall = gold.empty() ? 0.0 : static_cast<double>(correct) / gold.size();
    out.f2 = f2_score(out.precision, out.recall);
    return out;
}

MacroResult recall_at_k(const Run& run, const std::vector<QARecord>& qa, std::size_t k) {
    if (k == 0) throw Error(ErrorKind::kInvalidArgument, "recall@k needs k >= 1");
    MacroResult out;
    out.per_query.reserve(qa.size());
    for (const auto& rec : qa) {
        const auto& hits = ranking_for(run, rec).hits;
        std::vector<ArticleRef> top;
        for (std::size_t i = 0; i < hits.size() && i < k; ++i) top.push_back(hits[i].ref);
        out.per_query.push_back(prf(top, rec.relevant).recall);
    }
    out.macro = mean(out.per_query);
    return out;
}

MacroResult f2(const Selections& selected, const std::vector<QARecord>& qa) {
    MacroResult out;
    out.per_query.reserve(qa.size());
    for (const auto& rec : qa) {
        auto it = selected.find(rec.query_id);
        if (it == selected.end()) {
            throw Error(ErrorKind::kValidation, "query " + std::to_string(rec.query_id) + " has no answer set");
        }
        out.per_query.push_back(prf(it->second, rec.relevant).f2);
    }
    out.macro = mean(out.per_query);
    return out;
}

Selections select_all(const Run& run, const std::vector<QARecord>& qa, const SelectionConfig& cfg) {
    Selections out;
    for (const auto& rec : qa) {
        const auto& hits = ranking_for(run, rec).hits;
        auto& refs = out[rec.query_id];
        if (hits.empty()) continue;
        for (const auto& h : select(hits, cfg)) refs.push_back(h.ref);
    }
    return out;
}

GroupTable breakdown_by_num_relevant(const std::vector<QueryMetrics>& per_query) {
    GroupTable table;
    for (const auto& q : per_query) {
        auto& g = table[std::min<std::size_t>(q.relevant, 7)];
        ++g.queries;
        g.recall_at_k += q.recall_at_k;
        g.f2 += q.f2;
    }
    for (auto& [n, g] : table) {
        g.recall_at_k /= static_cast<double>(g.queries);
        g.f2 /= static_cast<double>(g.queries);
    }
    return table;
}

EvalReport evaluate(const Run& run, const std::vector<QARecord>& qa, const EvalConfig& cfg) {
    EvalReport report;
    report.k = cfg.k_recall;
    report.threshold = cfg.selection.threshold;
    report.max_k = cfg.selection.max_k;

    const auto recall = recall_at_k(run, qa, cfg.k_recall);
    const auto selections = select_all(run, qa, cfg.selection);
    report.per_query.reserve(qa.size());
    for (std::size_t i = 0; i < qa.size(); ++i) {
        const auto& rec = qa[i];
        const auto& retrieved = selections.at(rec.query_id);
        const auto m = prf(retrieved, rec.relevant);
        QueryMetrics q;
        q.query_id = rec.query_id;
        q.precision = m.precision;
        q.recall = m.recall;
        q.f2 = m.f2;
        q.recall_at_k = recall.per_query[i];
        q.retrieved = retrieved.size();
        q.relevant = rec.relevant.size();
        report.per_query.push_back(q);
    }
    std::vector<double> f2s;
    f2s.reserve(report.per_query.size());
    for (const auto& q : report.per_query) f2s.push_back(q.f2);
    report.recall_at_k = recall.macro;
    report.f2 = mean(f2s);
    report.by_num_relevant = breakdown_by_num_relevant(report.per_query);
    return report;
}

std::vector<double> ThresholdGrid::points() const {
    if (!(step > 0.0)) throw Error(ErrorKind::kInvalidArgument, "threshold grid step must be > 0");
    if (!(start >= 0.0) || !(end >= start)) {
        throw Error(ErrorKind::kInvalidArgument, "threshold grid needs 0 <= start <= end");
    }
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

SweepResult sweep_threshold(const Run& run, const std::vector<QARecord>& qa, const std::vector<double>& grid,
                            std::size_t max_k) {
    if (grid.empty()) throw Error(ErrorKind::kInvalidArgument, "threshold grid is empty");
    SweepResult out;
    bool first = true;
    for (double t : grid) {
        const auto score = f2(select_all(run, qa, {t, max_k}), qa).macro;
        out.curve.push_back({t, score});
        // Strict improvement only, so ties keep the smaller threshold.
        if (first || score > out.best_f2 || (score == out.best_f2 && t < out.best_threshold)) {
            out.best_f2 = score;
            out.best_threshold = t;
            first = false;
        }
    }
    return out;
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::ordered_json doc;
    doc["num_queries"] = report.per_query.size();
    doc["k"] = report.k;
    doc["recall_at_k"] = report.recall_at_k;
    doc["recall_basis"] = "raw top-k ranking";
    doc["threshold"] = report.threshold;
    doc["max_k"] = report.max_k;
    doc["f2"] = report.f2;
    auto& groups = doc["by_num_relevant"] = nlohmann::ordered_json::array();
    for (const auto& [n, g] : report.by_num_relevant) {
        groups.push_back({{"num_relevant", group_label(n)},
                          {"queries", g.queries},
                          {"recall_at_k", g.recall_at_k},
                          {"f2", g.f2}});
    }
    return doc.dump(2);
}

std::string per_query_tsv(const EvalReport& report) {
    std::ostringstream out;
    out << "query_id\tprecision\trecall\tf2\trecall_at_k\tretrieved\trelevant\n";
    for (const auto& q : report.per_query) {
        out << q.query_id << '\t' << fmt(q.precision) << '\t' << fmt(q.recall) << '\t' << fmt(q.f2) << '\t'
            << fmt(q.recall_at_k) << '\t' << q.retrieved << '\t' << q.relevant << '\n';
    }
    return out.str();
}

std::string sweep_to_json(const SweepResult& sweep) {
    nlohmann::ordered_json doc;
    doc["best_threshold"] = sweep.best_threshold;
    doc["best_f2"] = sweep.best_f2;
    doc["points"] = sweep.curve.size();
    return doc.dump(2);
}

std::string sweep_curve_csv(const SweepResult& sweep) {
    std::ostringstream out;
    out << "threshold,f2\n";
    for (const auto& p : sweep.curve) out << fmt(p.threshold) << ',' << fmt(p.f2) << '\n';
    return out.str();
}

}  // namespace legalir
