#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "legalir/dense.hpp"
#include "legalir/error.hpp"
#include "legalir/provider.hpp"
#include "support/fake_embedder.hpp"
#include "support/temp_dir.hpp"

using namespace legalir;

namespace {

Corpus small_corpus(std::size_t n) {
    std::vector<Article> arts;
    for (std::size_t i = 0; i < n; ++i) {
        Article a;
        a.ref.article_id = std::to_string(i + 1);
        a.body = "điều " + std::to_string(i + 1);
        arts.push_back(a);
    }
    Corpus c;
    c.add_law("01/2020/QH14", arts);
    return c;
}

std::vector<double> random_vector(std::mt19937& rng, std::size_t dim) {
    std::normal_distribution<double> g;
    std::vector<double> v(dim);
    for (auto& x : v) x = g(rng);
    return v;
}

double naive_cosine(const std::vector<double>& u, const std::vector<double>& v) {
    double dot = 0, nu = 0, nv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    return dot / std::sqrt(nu * nv);
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::kBuild;
}

}  // namespace

TEST(Cosine, Examples) {
    const std::vector<double> x{1, 0}, y{0, 1}, z{2, 0}, w{-1, 0};
    EXPECT_DOUBLE_EQ(cosine(x, z), 1.0);
    EXPECT_DOUBLE_EQ(cosine(x, y), 0.0);
    EXPECT_DOUBLE_EQ(cosine(x, w), -1.0);
    EXPECT_NEAR(cosine(std::vector<double>{1, 1}, x), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Cosine, ZeroAndMismatchedVectorsRejected) {
    const std::vector<double> x{1, 0}, zero{0, 0}, three{1, 0, 0};
    EXPECT_EQ(kind_of([&] { cosine(x, zero); }), ErrorKind::kInvalidArgument);
    EXPECT_EQ(kind_of([&] { cosine(x, three); }), ErrorKind::kInvalidArgument);
}

TEST(Cosine, SymmetricBoundedScaleInvariant) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int i = 0; i < 500; ++i) {
        const auto u = random_vector(rng, 16);
        const auto v = random_vector(rng, 16);
        const double c = cosine(u, v);
        EXPECT_LE(std::abs(c), 1.0);
        EXPECT_DOUBLE_EQ(c, cosine(v, u));
        auto su = u;
        const double s = scale(rng);
        for (auto& x : su) x *= s;
        EXPECT_NEAR(cosine(su, v), c, 1e-12);
        EXPECT_NEAR(c, naive_cosine(u, v), 1e-12);
    }
}

TEST(Normalized, UnitLengthAndRejectsBadInput) {
    const auto n = normalized(std::vector<double>{3, 4});
    EXPECT_DOUBLE_EQ(n[0], 0.6);
    EXPECT_DOUBLE_EQ(n[1], 0.8);
    EXPECT_EQ(kind_of([] { normalized(std::vector<double>{0, 0}); }), ErrorKind::kValidation);
    EXPECT_EQ(kind_of([] { normalized(std::vector<double>{NAN, 1}); }), ErrorKind::kValidation);
}

TEST(LoadVectors, AlignsToCorpusAndNormalizes) {
    testing_support::TempDir dir;
    const auto corpus = small_corpus(2);
    const auto path = dir.write("v.jsonl",
                                "{\"meta\": {\"model\": \"m\", \"dim\": 2}}\n"
                                "{\"id\": \"01/2020/QH14#2\", \"vector\": [0, 5]}\n"
                                "{\"id\": \"01/2020/QH14#1\", \"vector\": [3, 4]}\n");
    const auto index = load_vectors(path, corpus);
    EXPECT_EQ(index.dim(), 2u);
    ASSERT_EQ(index.size(), 2u);
    EXPECT_NEAR(index.vector(0)[0], 0.6, 1e-7);
    EXPECT_NEAR(index.vector(0)[1], 0.8, 1e-7);
    EXPECT_NEAR(index.vector(1)[1], 1.0, 1e-7);
}

TEST(LoadVectors, MissingArticleListed) {
    testing_support::TempDir dir;
    const auto corpus = small_corpus(3);
    const auto path = dir.write("v.jsonl", "{\"id\": \"01/2020/QH14#1\", \"vector\": [1, 0]}\n");
    try {
        load_vectors(path, corpus);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::kValidation);
        EXPECT_NE(std::string(e.what()).find("01/2020/QH14#2"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("01/2020/QH14#3"), std::string::npos);
    }
}

TEST(LoadVectors, DuplicateUnknownAndRaggedRejected) {
    testing_support::TempDir dir;
    const auto corpus = small_corpus(2);
    const auto dup = dir.write("d.jsonl",
                               "{\"id\": \"01/2020/QH14#1\", \"vector\": [1, 0]}\n"
                               "{\"id\": \"01/2020/QH14#1\", \"vector\": [0, 1]}\n");
    EXPECT_EQ(kind_of([&] { load_vectors(dup, corpus); }), ErrorKind::kValidation);
    const auto unknown = dir.write("u.jsonl", "{\"id\": \"99/2020/QH14#1\", \"vector\": [1, 0]}\n");
    EXPECT_EQ(kind_of([&] { load_vectors(unknown, corpus); }), ErrorKind::kValidation);
    const auto ragged = dir.write("r.jsonl",
                                  "{\"id\": \"01/2020/QH14#1\", \"vector\": [1, 0]}\n"
                                  "{\"id\": \"01/2020/QH14#2\", \"vector\": [0, 1, 0]}\n");
    EXPECT_EQ(kind_of([&] { load_vectors(ragged, corpus); }), ErrorKind::kValidation);
    const auto bad = dir.write("b.jsonl", "{\"id\": \"01/2020/QH14#1\", \"vector\": \"x\"}\n");
    EXPECT_EQ(kind_of([&] { load_vectors(bad, corpus); }), ErrorKind::kParse);
    EXPECT_EQ(kind_of([&] { load_vectors(dir / "absent.jsonl", corpus); }), ErrorKind::kIo);
}

TEST(QueryVectors, KeyedByQueryId) {
    testing_support::TempDir dir;
    const auto path = dir.write("q.jsonl",
                                "{\"id\": \"q7\", \"vector\": [0, 2]}\n"
                                "{\"id\": \"q1\", \"vector\": [3, 4]}\n");
    const auto qv = QueryVectorFile::load(path);
    EXPECT_EQ(qv.size(), 2u);
    EXPECT_TRUE(qv.contains(7));
    EXPECT_DOUBLE_EQ(qv.at(1)[0], 0.6);
    EXPECT_EQ(kind_of([&] { qv.at(2); }), ErrorKind::kValidation);
    const auto bad = dir.write("b.jsonl", "{\"id\": \"x7\", \"vector\": [0, 2]}\n");
    EXPECT_EQ(kind_of([&] { QueryVectorFile::load(bad); }), ErrorKind::kValidation);
}

TEST(DenseTopK, MatchesBruteForceCosine) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<EmbeddingVector> vecs;
        for (int i = 0; i < 60; ++i) vecs.push_back(random_vector(rng, 24));
        const DenseIndex index(24, vecs);
        const auto q = random_vector(rng, 24);
        std::vector<std::pair<std::size_t, double>> want;
        for (std::size_t i = 0; i < vecs.size(); ++i) want.emplace_back(i, naive_cosine(q, vecs[i]));
        std::stable_sort(want.begin(), want.end(), [](auto& a, auto& b) { return a.second > b.second; });
        const auto got = index.top_k(normalized(q), 10);
        ASSERT_EQ(got.size(), 10u);
        for (std::size_t i = 0; i < got.size(); ++i) {
            // Stored vectors are single precision.
            EXPECT_NEAR(got[i].score, want[i].second, 1e-6);
            if (std::abs(want[i].second - (i + 1 < want.size() ? want[i + 1].second : -2)) > 1e-5) {
                EXPECT_EQ(got[i].position, want[i].first);
            }
        }
    }
}

TEST(DenseTopK, OrthonormalBasisFindsItself) {
    const std::size_t dim = 12;
    std::vector<EmbeddingVector> basis(dim, EmbeddingVector(dim, 0.0));
    for (std::size_t i = 0; i < dim; ++i) basis[i][i] = 1.0;
    const DenseIndex index(dim, basis);
    for (std::size_t i = 0; i < dim; ++i) {
        const auto top = index.top_k(basis[i], dim);
        EXPECT_EQ(top[0].position, i);
        EXPECT_NEAR(top[0].score, 1.0, 1e-7);
        for (std::size_t j = 1; j < dim; ++j) EXPECT_NEAR(top[j].score, 0.0, 1e-7);
    }
}

TEST(DenseTopK, StoredVectorRanksItselfFirst) {
    std::mt19937 rng(19);
    std::vector<EmbeddingVector> vecs;
    for (int i = 0; i < 50; ++i) vecs.push_back(random_vector(rng, 16));
    const DenseIndex index(16, vecs);
    const auto top = index.top_k(normalized(vecs[31]), 100);
    ASSERT_EQ(top.size(), 50u);
    EXPECT_EQ(top[0].position, 31u);
    EXPECT_NEAR(top[0].score, 1.0, 1e-6);
}

TEST(DenseIndex, RejectsWrongQueryDimension) {
    const DenseIndex index(2, {{1, 0}, {0, 1}});
    EXPECT_EQ(kind_of([&] { index.top_k(std::vector<double>{1, 0, 0}, 1); }), ErrorKind::kInvalidArgument);
}

TEST(HttpProvider, ReadsInfoAndEmbedsInOrder) {
    testing_support::FakeEmbedder server(8);
    HttpProviderOptions opt;
    opt.batch_size = 3;
    opt.max_in_flight = 2;
    HttpEmbeddingProvider provider(server.url(), opt);
    EXPECT_EQ(provider.dim(), 8u);
    EXPECT_EQ(provider.model(), "fake-embedder");

    std::vector<std::string> texts;
    for (int i = 0; i < 10; ++i) texts.push_back("câu hỏi " + std::to_string(i));
    const auto vectors = provider.embed(texts);
    ASSERT_EQ(vectors.size(), texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        EXPECT_EQ(vectors[i], testing_support::fake_embedding(texts[i], 8));
    }
    EXPECT_EQ(server.requests(), 4);
    EXPECT_EQ(provider.embed(texts), vectors);
}

TEST(HttpProvider, DimensionDisagreementRejected) {
    testing_support::FakeEmbedder server(8, 5);
    HttpEmbeddingProvider provider(server.url());
    EXPECT_EQ(kind_of([&] { provider.embed({"a"}); }), ErrorKind::kValidation);
}

TEST(HttpProvider, UnreachableServiceIsTransportError) {
    // Grab a free port, then release it so nothing is listening there.
    int port = 0;
    {
        const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
        socklen_t len = sizeof(addr);
        ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
        port = ntohs(addr.sin_port);
        ::close(fd);
    }
    HttpProviderOptions opt;
    opt.connect_timeout_sec = 1;
    EXPECT_EQ(kind_of([&] { HttpEmbeddingProvider("http://127.0.0.1:" + std::to_string(port), opt); }),
              ErrorKind::kTransport);
}

TEST(QueryEmbedder, CachesByExactTextAndNormalizes) {
    testing_support::FakeEmbedder server(6);
    auto provider = std::make_shared<HttpEmbeddingProvider>(server.url());
    QueryEmbedder embedder(provider, 6);
    const auto a = embedder.embed_query("thuế thu nhập");
    double norm = 0;
    for (double x : a) norm += x * x;
    EXPECT_NEAR(norm, 1.0, 1e-12);
    EXPECT_EQ(embedder.embed_query("thuế thu nhập"), a);
    EXPECT_EQ(server.texts(), 1);
    embedder.embed_queries({"thuế thu nhập", "Thuế thu nhập", "thuế thu nhập"});
    EXPECT_EQ(server.texts(), 2);
    EXPECT_EQ(embedder.cache_size(), 2u);
}

TEST(QueryEmbedder, DimensionMustMatchIndex) {
    testing_support::FakeEmbedder server(6);
    auto provider = std::make_shared<HttpEmbeddingProvider>(server.url());
    EXPECT_EQ(kind_of([&] { QueryEmbedder(provider, 7); }), ErrorKind::kValidation);
}
