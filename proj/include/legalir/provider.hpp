#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "legalir/dense.hpp"

namespace legalir {

/// Anything that turns texts into fixed-dimension vectors, in input order.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual std::size_t dim() const = 0;
    virtual std::string model() const = 0;
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
};

struct HttpProviderOptions {
    std::size_t batch_size = 32;
    std::size_t max_in_flight = 4;
    int connect_timeout_sec = 5;
    int read_timeout_sec = 300;
};

/// Client for the `/info` + `/embed` HTTP protocol. Construction queries
/// `/info`; failures surface as Error(kTransport). Batches may be sent
/// concurrently, and every batch result is written back by its batch index.
class HttpEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(std::string base_url, HttpProviderOptions options = {});
    ~HttpEmbeddingProvider() override;

    std::size_t dim() const override { return dim_; }
    std::string model() const override { return model_; }
    const std::string& url() const noexcept { return url_; }

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

private:
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const;

    std::string url_;
    HttpProviderOptions options_;
    std::size_t dim_ = 0;
    std::string model_;
};

/// Wraps a provider with a cache keyed by exact query text and returns
/// unit-normalized vectors checked against the expected dimension.
class QueryEmbedder {
public:
    QueryEmbedder(std::shared_ptr<EmbeddingProvider> provider, std::size_t expected_dim);

    EmbeddingVector embed_query(const std::string& text);
    std::vector<EmbeddingVector> embed_queries(const std::vector<std::string>& texts);

    std::size_t cache_size() const;
    EmbeddingProvider& provider() { return *provider_; }

private:
    std::shared_ptr<EmbeddingProvider> provider_;
    std::size_t expected_dim_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, EmbeddingVector> cache_;
};

}  // namespace legalir
