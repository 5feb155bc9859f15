#include <gtest/gtest.h>

#include <json.hpp>

#include "legalir/legalir.h"
#include "support/cli.hpp"
#include "support/synthetic.hpp"
#include "support/temp_dir.hpp"

using nlohmann::json;
using testing_support::run_cli;
using testing_support::slurp;

namespace {

testing_support::CliResult cli(const std::vector<std::string>& args) { return run_cli(LEGALIR_CLI_PATH, args); }

json summary_of(const testing_support::CliResult& r) { return json::parse(r.last_line()); }

class CliSynthetic : public ::testing::Test {
protected:
    void SetUp() override {
        data_ = testing_support::make_synthetic(dir_.path());
        corpus_ = data_.corpus.string();
        qa_ = data_.qa.string();
        vectors_ = data_.vectors.string();
        qvectors_ = data_.query_vectors.string();
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    testing_support::TempDir dir_;
    testing_support::SyntheticData data_;
    std::string corpus_, qa_, vectors_, qvectors_;
};

}  // namespace

TEST(Cli, VersionNamesFormats) {
    const auto r = cli({"--version"});
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("legalir 0.1.0"), std::string::npos);
    EXPECT_NE(r.out.find("index format 1"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(cli({"stats", "--bogus"}).exit_code, 2);
    EXPECT_EQ(cli({"stats"}).exit_code, 2);
    EXPECT_EQ(cli({"frobnicate"}).exit_code, 2);
    EXPECT_EQ(cli({}).exit_code, 2);
}

TEST(Cli, FileErrorsExitOneWithPath) {
    const auto r = cli({"stats", "--corpus", "/nonexistent/c.jsonl"});
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.err.find("/nonexistent/c.jsonl"), std::string::npos);
}

TEST_F(CliSynthetic, StatsMatchesLengthHistogram) {
    const auto r = cli({"stats", "--corpus", corpus_, "--unit", "syllable", "--qa", qa_});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("<100"), std::string::npos);
    const auto s = summary_of(r);
    EXPECT_EQ(s["documents"], 50);
    EXPECT_EQ(s["articles"], 500);

    lir_corpus* corpus = nullptr;
    ASSERT_EQ(lir_corpus_load(corpus_.c_str(), &corpus), LIR_OK);
    lir_histogram h{};
    ASSERT_EQ(lir_corpus_length_histogram(corpus, LIR_UNIT_SYLLABLE, &h), LIR_OK);
    lir_corpus_free(corpus);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(s["histogram"][i]["count"].get<std::size_t>(), h.counts[i]);

    std::size_t gold = 0;
    for (const auto& g : data_.gold) gold += g.size();
    EXPECT_EQ(s["qa"]["distinct_referenced"].get<std::size_t>(), gold);
}

TEST_F(CliSynthetic, MineRoundOneDefaultsToThirtyFive) {
    const auto r = cli({"mine", "--round", "1", "--corpus", corpus_, "--qa", qa_, "--out", path("pairs.jsonl")});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto s = summary_of(r);
    EXPECT_EQ(s["k"], 35);
    std::size_t gold = 0;
    for (const auto& g : data_.gold) gold += g.size();
    EXPECT_EQ(s["pairs"].get<std::size_t>(), 50 * 35 + gold);
    EXPECT_EQ(cli({"mine", "--round", "2", "--corpus", corpus_, "--qa", qa_, "--out", path("p2.jsonl")}).exit_code, 2);
}

TEST_F(CliSynthetic, EvalReportsRecallAndF2) {
    ASSERT_EQ(cli({"run", "--corpus", corpus_, "--qa", qa_, "--vectors", vectors_, "--query-vectors", qvectors_,
                   "--out", path("run.jsonl")})
                  .exit_code,
              0);
    const auto r = cli({"eval", "--run", path("run.jsonl"), "--qa", qa_, "--k", "20", "--out", path("report.json")});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto report = json::parse(slurp(path("report.json")));
    EXPECT_TRUE(report.contains("recall_at_k"));
    EXPECT_TRUE(report.contains("f2"));
    EXPECT_EQ(report["k"], 20);
    EXPECT_EQ(report["recall_at_k"], 1.0);
    const auto s = summary_of(r);
    EXPECT_EQ(s["recall_at_k"], report["recall_at_k"]);
}

TEST_F(CliSynthetic, RunEqualsCompositionOfSubcommands) {
    const std::vector<std::string> vec = {"--vectors", vectors_, "--query-vectors", qvectors_};
    auto args = std::vector<std::string>{"run", "--corpus", corpus_, "--qa", qa_, "--out", path("run.jsonl"),
                                         "--report", path("report.json"), "--threshold", "0.1"};
    args.insert(args.end(), vec.begin(), vec.end());
    ASSERT_EQ(cli(args).exit_code, 0);

    // Prebuilt index gives the same run file.
    ASSERT_EQ(cli({"build-lexical", "--corpus", corpus_, "--out", path("idx.bin")}).exit_code, 0);
    auto indexed = std::vector<std::string>{"run", "--corpus", corpus_, "--index", path("idx.bin"), "--qa", qa_,
                                            "--out", path("run2.jsonl"), "--threshold", "0.1"};
    indexed.insert(indexed.end(), vec.begin(), vec.end());
    ASSERT_EQ(cli(indexed).exit_code, 0);
    EXPECT_EQ(slurp(path("run.jsonl")), slurp(path("run2.jsonl")));

    // eval on the run file reproduces the embedded report.
    ASSERT_EQ(cli({"eval", "--run", path("run.jsonl"), "--qa", qa_, "--threshold", "0.1", "--out",
                   path("report2.json")})
                  .exit_code,
              0);
    EXPECT_EQ(slurp(path("report.json")), slurp(path("report2.json")));

    // search for single queries returns the run's hits.
    std::ifstream run_in(path("run.jsonl"));
    std::string line;
    for (int q = 0; q < 5 && std::getline(run_in, line); ++q) {
        const auto ranked = json::parse(line);
        auto sargs = std::vector<std::string>{"search", "--corpus", corpus_, "--qa", qa_, "--query-id",
                                              std::to_string(ranked["query_id"].get<int>()), "--k", "10",
                                              "--threshold", "0.1", "--out", path("s.json")};
        sargs.insert(sargs.end(), vec.begin(), vec.end());
        ASSERT_EQ(cli(sargs).exit_code, 0);
        const auto single = json::parse(slurp(path("s.json")));
        ASSERT_EQ(single["hits"].size(), 10u);
        for (std::size_t i = 0; i < 10; ++i) {
            EXPECT_EQ(single["hits"][i]["article_id"], ranked["hits"][i]["article_id"]);
            EXPECT_EQ(single["hits"][i]["law_id"], ranked["hits"][i]["law_id"]);
            EXPECT_EQ(single["hits"][i]["fused"], ranked["hits"][i]["fused"]);
        }
    }

    // Lexical-only run equals bm25-search over the QA file.
    ASSERT_EQ(cli({"run", "--corpus", corpus_, "--qa", qa_, "--fusion", "lexical_only", "--out", path("lex.jsonl")})
                  .exit_code,
              0);
    ASSERT_EQ(cli({"bm25-search", "--corpus", corpus_, "--qa", qa_, "--k", "100", "--out", path("bm25.jsonl")})
                  .exit_code,
              0);
    EXPECT_EQ(slurp(path("lex.jsonl")), slurp(path("bm25.jsonl")));
}

TEST_F(CliSynthetic, ReproducibleOutputs) {
    for (const char* tag : {"a", "b"}) {
        const std::string t(tag);
        ASSERT_EQ(cli({"run", "--corpus", corpus_, "--qa", qa_, "--vectors", vectors_, "--query-vectors", qvectors_,
                       "--out", path("run_" + t), "--report", path("report_" + t), "--manifest", path("manifest_" + t),
                       "--seed", "7", "--threads", t == "a" ? "1" : "4"})
                      .exit_code,
                  0);
        ASSERT_EQ(cli({"sweep", "--run", path("run_" + t), "--qa", qa_, "--out", path("sweep_" + t), "--curve",
                       path("curve_" + t)})
                      .exit_code,
                  0);
        ASSERT_EQ(cli({"mine", "--round", "2", "--run", path("run_" + t), "--qa", qa_, "--out", path("pairs_" + t)})
                      .exit_code,
                  0);
    }
    for (const char* f : {"run_", "report_", "sweep_", "curve_", "pairs_"}) {
        EXPECT_EQ(slurp(path(std::string(f) + "a")), slurp(path(std::string(f) + "b"))) << f;
    }
    const auto sweep = json::parse(slurp(path("sweep_a")));
    EXPECT_GE(sweep["best_f2"].get<double>(), 0.95);
}

TEST_F(CliSynthetic, LoadVectorsValidates) {
    const auto ok = cli({"load-vectors", "--corpus", corpus_, "--vectors", vectors_});
    ASSERT_EQ(ok.exit_code, 0) << ok.err;
    EXPECT_EQ(summary_of(ok)["dim"], 128);
    const auto bad = cli({"load-vectors", "--corpus", corpus_, "--vectors", qvectors_});
    EXPECT_EQ(bad.exit_code, 1);
}
