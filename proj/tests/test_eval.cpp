#include <gtest/gtest.h>

#include <random>

#include "legalir/error.hpp"
#include "legalir/eval.hpp"
#include "support/runs.hpp"

using namespace legalir;
using testing_support::qa;
using testing_support::ranking;
using testing_support::ref;

TEST(F2Score, Examples) {
    EXPECT_EQ(f2_score(1.0, 1.0), 1.0);
    EXPECT_NEAR(f2_score(0.5, 1.0), 0.8333333333333334, 1e-15);
    EXPECT_EQ(f2_score(0.0, 0.0), 0.0);
    EXPECT_EQ(f2_score(0.0, 1.0), 0.0);
}

TEST(Prf, SetExamples) {
    const auto same = prf({ref("a"), ref("b")}, {ref("b"), ref("a")});
    EXPECT_EQ(same.f2, 1.0);
    const auto half = prf({ref("a"), ref("x")}, {ref("a")});
    EXPECT_EQ(half.precision, 0.5);
    EXPECT_EQ(half.recall, 1.0);
    EXPECT_NEAR(half.f2, 2.5 / 3.0, 1e-15);
    EXPECT_EQ(prf({ref("x")}, {ref("a")}).f2, 0.0);
    const auto empty = prf({}, {ref("a")});
    EXPECT_EQ(empty.precision, 0.0);
    EXPECT_EQ(empty.f2, 0.0);
}

TEST(RecallAtK, Examples) {
    legalir::Run run;
    run.add(ranking(1, {"a", "x", "y"}));
    run.add(ranking(2, {"c", "z"}));
    const auto one = recall_at_k(run, {qa(1, {"a", "b"})}, 20);
    EXPECT_EQ(one.macro, 0.5);
    const auto two = recall_at_k(run, {qa(1, {"a", "b"}), qa(2, {"c"})}, 20);
    EXPECT_EQ(two.macro, 0.75);
    ASSERT_EQ(two.per_query.size(), 2u);
    EXPECT_EQ(two.per_query[1], 1.0);
}

TEST(RecallAtK, CutoffAndErrors) {
    legalir::Run run;
    run.add(ranking(1, {"x", "a"}));
    EXPECT_EQ(recall_at_k(run, {qa(1, {"a"})}, 1).macro, 0.0);
    EXPECT_EQ(recall_at_k(run, {qa(1, {"a"})}, 2).macro, 1.0);
    EXPECT_THROW(recall_at_k(run, {qa(1, {"a"})}, 0), Error);
    EXPECT_THROW(recall_at_k(run, {qa(2, {"a"})}, 20), Error);
}

TEST(Evaluate, EmptyRankingScoresZero) {
    legalir::Run run;
    run.add(ranking(1, {}));
    const auto report = evaluate(run, {qa(1, {"a"})}, {});
    EXPECT_EQ(report.f2, 0.0);
    EXPECT_EQ(report.per_query[0].retrieved, 0u);
}

TEST(Sweep, SmallestThresholdWinsHandCase) {
    legalir::Run run;
    run.add(ranking(1, {"a", "x", "y"}, {0.9, 0.85, 0.3}));
    const auto s = sweep_threshold(run, {qa(1, {"a"})}, {0.0, 0.1});
    EXPECT_EQ(s.best_threshold, 0.0);
    EXPECT_EQ(s.best_f2, 1.0);
    ASSERT_EQ(s.curve.size(), 2u);
    EXPECT_NEAR(s.curve[1].f2, 0.8333333333333334, 1e-15);
}

TEST(Sweep, SinglePointAndTies) {
    legalir::Run run;
    run.add(ranking(1, {"a", "x"}, {0.9, 0.2}));
    const auto one = sweep_threshold(run, {qa(1, {"a"})}, {0.3});
    EXPECT_EQ(one.best_threshold, 0.3);
    const auto tied = sweep_threshold(run, {qa(1, {"a"})}, {0.5, 0.0, 0.3});
    EXPECT_EQ(tied.best_threshold, 0.0);
    EXPECT_THROW(sweep_threshold(run, {qa(1, {"a"})}, {}), Error);
}

TEST(Sweep, BestIsMaximumOfCurve) {
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<QARecord> records;
    legalir::Run run;
    for (std::size_t q = 1; q <= 20; ++q) {
        std::vector<std::string> arts;
        std::vector<double> scores;
        for (int i = 0; i < 15; ++i) {
            arts.push_back("a" + std::to_string(i));
            scores.push_back(u(rng));
        }
        std::sort(scores.rbegin(), scores.rend());
        run.add(ranking(q, arts, scores));
        records.push_back(qa(q, {"a" + std::to_string(q % 4), "a" + std::to_string(q % 7)}));
    }
    const auto s = sweep_threshold(run, records, ThresholdGrid{}.points());
    EXPECT_EQ(s.curve.size(), 101u);
    double best = 0.0;
    for (const auto& p : s.curve) best = std::max(best, p.f2);
    EXPECT_EQ(s.best_f2, best);
}

TEST(ThresholdGrid, Points) {
    const auto pts = ThresholdGrid{0.0, 0.25, 1.0}.points();
    ASSERT_EQ(pts.size(), 5u);
    EXPECT_EQ(pts.back(), 1.0);
    EXPECT_THROW((ThresholdGrid{0.0, 0.0, 1.0}.points()), Error);
    EXPECT_THROW((ThresholdGrid{0.5, 0.1, 0.2}.points()), Error);
}

TEST(Breakdown, HandAggregation) {
    std::vector<QueryMetrics> per_query(3);
    per_query[0].relevant = 1;
    per_query[0].recall_at_k = 1.0;
    per_query[1].relevant = 1;
    per_query[1].recall_at_k = 1.0;
    per_query[2].relevant = 2;
    per_query[2].recall_at_k = 0.5;
    const auto table = breakdown_by_num_relevant(per_query);
    ASSERT_EQ(table.size(), 2u);
    EXPECT_EQ(table.at(1).queries, 2u);
    EXPECT_EQ(table.at(1).recall_at_k, 1.0);
    EXPECT_EQ(table.at(2).queries, 1u);
    EXPECT_EQ(table.at(2).recall_at_k, 0.5);
    const double overall = (2 * table.at(1).recall_at_k + table.at(2).recall_at_k) / 3.0;
    EXPECT_NEAR(overall, 0.8333333333333334, 1e-15);
}

TEST(Breakdown, SevenOrMoreShareAGroup) {
    std::vector<QueryMetrics> per_query(2);
    per_query[0].relevant = 7;
    per_query[1].relevant = 11;
    const auto table = breakdown_by_num_relevant(per_query);
    ASSERT_EQ(table.size(), 1u);
    EXPECT_EQ(table.at(7).queries, 2u);
}

namespace {

struct RandomEval {
    legalir::Run run;
    std::vector<QARecord> qa;
};

RandomEval random_eval(std::mt19937& rng, std::size_t queries) {
    RandomEval out;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> n_rel(1, 9), art(0, 39);
    for (std::size_t q = 1; q <= queries; ++q) {
        std::vector<std::string> arts;
        for (int i = 0; i < 40; ++i) arts.push_back("a" + std::to_string(i));
        std::shuffle(arts.begin(), arts.end(), rng);
        std::vector<double> scores;
        for (int i = 0; i < 40; ++i) scores.push_back(u(rng));
        std::sort(scores.rbegin(), scores.rend());
        out.run.add(ranking(q, arts, scores));
        std::vector<std::string> rel;
        for (int i = n_rel(rng); i > 0; --i) rel.push_back("a" + std::to_string(art(rng)));
        std::sort(rel.begin(), rel.end());
        rel.erase(std::unique(rel.begin(), rel.end()), rel.end());
        out.qa.push_back(qa(q, rel));
    }
    return out;
}

}  // namespace

TEST(Evaluate, GroupWeightedMeanEqualsMacro) {
    std::mt19937 rng(90);
    for (int trial = 0; trial < 50; ++trial) {
        const auto data = random_eval(rng, 60);
        const auto report = evaluate(data.run, data.qa, {20, {0.2, 20}});
        double recall = 0.0, f2 = 0.0;
        std::size_t n = 0;
        for (const auto& [k, g] : report.by_num_relevant) {
            recall += g.recall_at_k * static_cast<double>(g.queries);
            f2 += g.f2 * static_cast<double>(g.queries);
            n += g.queries;
            EXPECT_GT(g.queries, 0u);
        }
        EXPECT_EQ(n, data.qa.size());
        EXPECT_NEAR(recall / static_cast<double>(n), report.recall_at_k, 1e-12);
        EXPECT_NEAR(f2 / static_cast<double>(n), report.f2, 1e-12);
    }
}

TEST(Evaluate, SingleRelevantGroupEqualsOverall) {
    legalir::Run run;
    run.add(ranking(1, {"a", "b"}));
    run.add(ranking(2, {"b", "a"}));
    const auto report = evaluate(run, {qa(1, {"a"}), qa(2, {"a"})}, {1, {}});
    ASSERT_EQ(report.by_num_relevant.size(), 1u);
    EXPECT_EQ(report.by_num_relevant.at(1).recall_at_k, report.recall_at_k);
    EXPECT_EQ(report.by_num_relevant.at(1).f2, report.f2);
    EXPECT_EQ(report.recall_at_k, 0.5);
}

TEST(Evaluate, PermutationInvariant) {
    std::mt19937 rng(91);
    for (int trial = 0; trial < 20; ++trial) {
        auto data = random_eval(rng, 40);
        const auto a = evaluate(data.run, data.qa, {20, {0.1, 20}});
        std::shuffle(data.qa.begin(), data.qa.end(), rng);
        const auto b = evaluate(data.run, data.qa, {20, {0.1, 20}});
        EXPECT_EQ(a.recall_at_k, b.recall_at_k);
        EXPECT_EQ(a.f2, b.f2);
    }
}

TEST(Evaluate, RecallNonDecreasingInK) {
    std::mt19937 rng(92);
    for (int trial = 0; trial < 20; ++trial) {
        const auto data = random_eval(rng, 30);
        double prev = 0.0;
        for (std::size_t k = 1; k <= 45; ++k) {
            const double r = recall_at_k(data.run, data.qa, k).macro;
            EXPECT_GE(r, prev);
            EXPECT_LE(r, 1.0);
            prev = r;
        }
        EXPECT_EQ(prev, 1.0);
    }
}

TEST(Evaluate, MetricsInUnitIntervalAndMacroIsMean) {
    std::mt19937 rng(93);
    const auto data = random_eval(rng, 50);
    const auto report = evaluate(data.run, data.qa, {20, {0.3, 20}});
    double sum = 0.0;
    for (const auto& q : report.per_query) {
        for (double v : {q.precision, q.recall, q.f2, q.recall_at_k}) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
        EXPECT_LE(q.retrieved, 20u);
        sum += q.f2;
    }
    EXPECT_NEAR(sum / 50.0, report.f2, 1e-12);
}

TEST(Report, JsonCarriesHeadlineFields) {
    legalir::Run run;
    run.add(ranking(1, {"a", "b"}));
    const auto json = report_to_json(evaluate(run, {qa(1, {"a"})}, {}));
    for (const auto* key : {"\"recall_at_k\"", "\"f2\"", "\"threshold\"", "\"by_num_relevant\"", "\"recall_basis\""}) {
        EXPECT_NE(json.find(key), std::string::npos) << key;
    }
}
