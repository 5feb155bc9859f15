#pragma once

// Planted-answer corpus for end-to-end checks. Each query owns two rare
// terms that appear only in its gold articles, and the vector geometry puts
// gold articles at cosine >= 0.9 from the query and every other article
// below 0.3.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

namespace testing_support {

struct SyntheticShape {
    std::size_t laws = 50;
    std::size_t articles_per_law = 10;
    std::size_t queries = 50;
    std::size_t dim = 128;
    std::uint64_t seed = 20240531;
};

struct SyntheticData {
    std::filesystem::path corpus;
    std::filesystem::path qa;
    std::filesystem::path vectors;
    std::filesystem::path query_vectors;
    std::vector<std::vector<std::size_t>> gold;  // per query, article positions
    std::vector<std::vector<double>> article_vectors;
    std::vector<std::vector<double>> query_vecs;
    std::size_t articles = 0;
};

inline std::vector<double> unit_in(std::mt19937_64& rng, std::size_t dim, std::size_t lo, std::size_t hi) {
    std::normal_distribution<double> gauss;
    std::vector<double> v(dim, 0.0);
    double norm = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        v[i] = gauss(rng);
        norm += v[i] * v[i];
    }
    norm = std::sqrt(norm);
    for (std::size_t i = lo; i < hi; ++i) v[i] /= norm;
    return v;
}

inline SyntheticData make_synthetic(const std::filesystem::path& dir, const SyntheticShape& shape = {}) {
    std::mt19937_64 rng(shape.seed);
    const std::size_t n = shape.laws * shape.articles_per_law;
    const std::size_t qdims = shape.queries;

    std::vector<std::string> vocab;
    for (int i = 0; i < 300; ++i) vocab.push_back("từ" + std::to_string(i));
    std::uniform_int_distribution<std::size_t> pick_word(0, vocab.size() - 1);
    std::uniform_int_distribution<std::size_t> body_len(30, 120);
    std::uniform_int_distribution<std::size_t> n_gold(1, 3);
    std::uniform_int_distribution<int> rare_tf(1, 2);

    SyntheticData data;
    data.articles = n;
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    std::shuffle(pool.begin(), pool.end(), rng);

    std::vector<int> owner(n, -1);
    std::size_t next = 0;
    for (std::size_t q = 0; q < shape.queries; ++q) {
        std::vector<std::size_t> g;
        for (std::size_t k = n_gold(rng); k > 0; --k) {
            owner[pool[next]] = static_cast<int>(q);
            g.push_back(pool[next++]);
        }
        std::sort(g.begin(), g.end());
        data.gold.push_back(std::move(g));
    }

    auto rare = [](std::size_t q, char tag) { return "hiếm" + std::to_string(q) + tag; };

    std::vector<std::string> bodies(n);
    for (std::size_t a = 0; a < n; ++a) {
        std::vector<std::string> words;
        for (std::size_t k = body_len(rng); k > 0; --k) words.push_back(vocab[pick_word(rng)]);
        if (owner[a] >= 0) {
            const auto q = static_cast<std::size_t>(owner[a]);
            for (char tag : {'a', 'b'}) {
                for (int t = rare_tf(rng); t > 0; --t) {
                    std::uniform_int_distribution<std::size_t> at(0, words.size());
                    words.insert(words.begin() + static_cast<std::ptrdiff_t>(at(rng)), rare(q, tag));
                }
            }
        }
        std::string body;
        for (const auto& w : words) body += (body.empty() ? "" : " ") + w;
        bodies[a] = body + ".";
    }

    data.corpus = dir / "corpus.jsonl";
    {
        std::ofstream out(data.corpus);
        for (std::size_t l = 0; l < shape.laws; ++l) {
            nlohmann::ordered_json law;
            law["law_id"] = std::to_string(l + 1) + "/2020/QH14";
            law["articles"] = nlohmann::ordered_json::array();
            for (std::size_t k = 0; k < shape.articles_per_law; ++k) {
                const std::size_t a = l * shape.articles_per_law + k;
                law["articles"].push_back(
                    {{"article_id", std::to_string(k + 1)}, {"title", "Điều " + std::to_string(k + 1)}, {"text", bodies[a]}});
            }
            out << law.dump() << '\n';
        }
    }

    auto ref_of = [&](std::size_t a) {
        return nlohmann::ordered_json{{"law_id", std::to_string(a / shape.articles_per_law + 1) + "/2020/QH14"},
                                      {"article_id", std::to_string(a % shape.articles_per_law + 1)}};
    };

    data.qa = dir / "qa.jsonl";
    {
        std::ofstream out(data.qa);
        for (std::size_t q = 0; q < shape.queries; ++q) {
            std::string question = "Quy định về " + rare(q, 'a');
            for (int k = 0; k < 3; ++k) question += " " + vocab[pick_word(rng)];
            question += " và " + rare(q, 'b') + "?";
            nlohmann::ordered_json rec;
            rec["question"] = question;
            rec["relevant_articles"] = nlohmann::ordered_json::array();
            for (auto a : data.gold[q]) rec["relevant_articles"].push_back(ref_of(a));
            out << rec.dump() << '\n';
        }
    }

    data.vectors = dir / "vectors.jsonl";
    {
        std::ofstream out(data.vectors);
        for (std::size_t a = 0; a < n; ++a) {
            auto v = unit_in(rng, shape.dim, qdims, shape.dim);
            if (owner[a] >= 0) {
                for (auto& x : v) x *= 0.3;
                v[static_cast<std::size_t>(owner[a])] = 1.0;
            } else {
                const auto u = unit_in(rng, shape.dim, 0, qdims);
                for (std::size_t i = 0; i < qdims; ++i) v[i] = 0.2 * u[i];
            }
            const auto r = ref_of(a);
            out << nlohmann::ordered_json{{"id", r["law_id"].get<std::string>() + "#" + r["article_id"].get<std::string>()},
                                          {"vector", v}}
                       .dump()
                << '\n';
            data.article_vectors.push_back(std::move(v));
        }
    }

    data.query_vectors = dir / "query_vectors.jsonl";
    {
        std::ofstream out(data.query_vectors);
        for (std::size_t q = 0; q < shape.queries; ++q) {
            std::vector<double> v(shape.dim, 0.0);
            v[q] = 1.0;
            out << nlohmann::ordered_json{{"id", "q" + std::to_string(q)}, {"vector", v}}.dump() << '\n';
            data.query_vecs.push_back(std::move(v));
        }
    }
    return data;
}

}  // namespace testing_support
