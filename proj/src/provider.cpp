#include "legalir/provider.hpp"

#include <algorithm>
#include <future>

#include <httplib.h>
#include <json.hpp>

#include "legalir/error.hpp"

namespace legalir {
namespace {

using nlohmann::json;

httplib::Client make_client(const std::string& url, const HttpProviderOptions& opt) {
    httplib::Client client(url);
    client.set_connection_timeout(opt.connect_timeout_sec, 0);
    client.set_read_timeout(opt.read_timeout_sec, 0);
    return client;
}

json parse_body(const std::string& url, const std::string& body) {
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::kTransport, url + ": malformed provider response: " + e.what());
    }
}

void check_response(const std::string& what, const httplib::Result& res) {
    if (!res) throw Error(ErrorKind::kTransport, what + ": " + httplib::to_string(res.error()));
    if (res->status != 200) {
        throw Error(ErrorKind::kTransport, what + ": HTTP " + std::to_string(res->status));
    }
}

}  // namespace

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string base_url, HttpProviderOptions options)
    : url_(std::move(base_url)), options_(options) {
    while (!url_.empty() && url_.back() == '/') url_.pop_back();
    if (options_.batch_size == 0) options_.batch_size = 1;
    if (options_.max_in_flight == 0) options_.max_in_flight = 1;

    auto client = make_client(url_, options_);
    const auto res = client.Get("/info");
    check_response(url_ + "/info", res);
    const auto info = parse_body(url_, res->body);
    if (!info.is_object() || !info.contains("dim") || !info["dim"].is_number_unsigned() || info["dim"].get<std::size_t>() == 0) {
        throw Error(ErrorKind::kTransport, url_ + "/info: response lacks a positive 'dim'");
    }
    dim_ = info["dim"].get<std::size_t>();
    if (info.contains("model") && info["model"].is_string()) model_ = info["model"].get<std::string>();
}

HttpEmbeddingProvider::~HttpEmbeddingProvider() = default;

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed_batch(const std::vector<std::string>& texts) const {
    auto client = make_client(url_, options_);
    const json request = {{"texts", texts}};
    const auto res = client.Post("/embed", request.dump(), "application/json");
    check_response(url_ + "/embed", res);
    const auto body = parse_body(url_, res->body);
    if (!body.is_object() || !body.contains("vectors") || !body["vectors"].is_array()) {
        throw Error(ErrorKind::kTransport, url_ + "/embed: response lacks 'vectors'");
    }
    if (body.contains("dim") && body["dim"].is_number() && body["dim"].get<std::size_t>() != dim_) {
        throw Error(ErrorKind::kValidation, url_ + "/embed: dim " + body["dim"].dump() + " differs from /info dim " +
                                                std::to_string(dim_));
    }
    const auto& rows = body["vectors"];
    if (rows.size() != texts.size()) {
        throw Error(ErrorKind::kTransport, url_ + "/embed: expected " + std::to_string(texts.size()) + " vectors, got " +
                                               std::to_string(rows.size()));
    }
    std::vector<EmbeddingVector> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        if (!row.is_array() || row.size() != dim_) {
            throw Error(ErrorKind::kValidation, url_ + "/embed: vector dimension differs from " + std::to_string(dim_));
        }
        EmbeddingVector v;
        v.reserve(dim_);
        for (const auto& x : row) {
            if (!x.is_number()) throw Error(ErrorKind::kTransport, url_ + "/embed: non-numeric vector component");
            v.push_back(x.get<double>());
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed(const std::vector<std::string>& texts) {
    const std::size_t n_batches = (texts.size() + options_.batch_size - 1) / options_.batch_size;
    std::vector<std::vector<EmbeddingVector>> results(n_batches);

    for (std::size_t wave = 0; wave < n_batches; wave += options_.max_in_flight) {
        std::vector<std::pair<std::size_t, std::future<std::vector<EmbeddingVector>>>> pending;
        for (std::size_t b = wave; b < std::min(n_batches, wave + options_.max_in_flight); ++b) {
            const auto first = texts.begin() + static_cast<std::ptrdiff_t>(b * options_.batch_size);
            const auto last = texts.begin() +
                              static_cast<std::ptrdiff_t>(std::min(texts.size(), (b + 1) * options_.batch_size));
            std::vector<std::string> batch(first, last);
            pending.emplace_back(b, std::async(std::launch::async, [this, batch = std::move(batch)] {
                                     return embed_batch(batch);
                                 }));
        }
        // get() on every future before rethrowing so no request outlives us.
        std::exception_ptr failure;
        for (auto& [index, fut] : pending) {
            try {
                results[index] = fut.get();
            } catch (...) {
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (auto& batch : results) {
        for (auto& v : batch) out.push_back(std::move(v));
    }
    return out;
}

QueryEmbedder::QueryEmbedder(std::shared_ptr<EmbeddingProvider> provider, std::size_t expected_dim)
    : provider_(std::move(provider)), expected_dim_(expected_dim) {
    if (!provider_) throw Error(ErrorKind::kInvalidArgument, "null embedding provider");
    if (provider_->dim() != expected_dim_) {
        throw Error(ErrorKind::kValidation, "provider dimension " + std::to_string(provider_->dim()) +
                                                " does not match index dimension " + std::to_string(expected_dim_));
    }
}

EmbeddingVector QueryEmbedder::embed_query(const std::string& text) {
    return embed_queries({text}).front();
}

std::vector<EmbeddingVector> QueryEmbedder::embed_queries(const std::vector<std::string>& texts) {
    std::vector<std::string> todo;
    {
        std::lock_guard lock(mutex_);
        std::unordered_map<std::string, bool> queued;
        for (const auto& t : texts) {
            if (!cache_.contains(t) && queued.emplace(t, true).second) todo.push_back(t);
        }
    }
    if (!todo.empty()) {
        auto vectors = provider_->embed(todo);
        if (vectors.size() != todo.size()) {
            throw Error(ErrorKind::kTransport, "provider returned " + std::to_string(vectors.size()) +
                                                   " vectors for " + std::to_string(todo.size()) + " texts");
        }
        std::vector<EmbeddingVector> fresh;
        fresh.reserve(vectors.size());
        for (const auto& v : vectors) {
            if (v.size() != expected_dim_) {
                throw Error(ErrorKind::kValidation, "provider vector dimension " + std::to_string(v.size()) +
                                                        " differs from " + std::to_string(expected_dim_));
            }
            fresh.push_back(normalized(v));
        }
        std::lock_guard lock(mutex_);
        for (std::size_t i = 0; i < todo.size(); ++i) cache_.emplace(todo[i], std::move(fresh[i]));
    }
    std::lock_guard lock(mutex_);
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(cache_.at(t));
    return out;
}

std::size_t QueryEmbedder::cache_size() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

}  // namespace legalir
