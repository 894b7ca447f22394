#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace semcache {

/// Dense embedding. Construction rejects empty or non-finite input.
class EmbeddingVector {
public:
    EmbeddingVector() = default;
    explicit EmbeddingVector(std::vector<double> values);

    std::size_t dimension() const noexcept { return values_.size(); }
    const std::vector<double>& values() const noexcept { return values_; }
    double norm() const;
    // Unit L2 norm copy; throws std::invalid_argument on a zero vector.
    EmbeddingVector normalized() const;

    friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

private:
    std::vector<double> values_;
};

// dot(a,b) / (|a||b|). Throws std::invalid_argument on dimension mismatch or zero vectors.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::size_t dimension() const = 0;
    virtual EmbeddingVector embed(std::string_view text) const = 0;
};

/// Deterministic bag-of-words projection: each normalized word maps to a
/// seeded pseudo-random direction; the text embedding is the normalized sum.
/// Texts sharing most words land close together, unrelated texts land near
/// orthogonal.
class HashEmbedder final : public Embedder {
public:
    explicit HashEmbedder(std::size_t dimension = 256, std::uint64_t seed = 0x5eedULL);

    std::size_t dimension() const override { return dimension_; }
    EmbeddingVector embed(std::string_view text) const override;

private:
    std::size_t dimension_;
    std::uint64_t seed_;
};

/// Fixed vectors for specific texts (keyed by normalized question), falling
/// back to another embedder for everything else.
class FixtureEmbedder final : public Embedder {
public:
    FixtureEmbedder(std::shared_ptr<const Embedder> fallback, std::map<std::string, EmbeddingVector> fixtures);

    std::size_t dimension() const override { return fallback_->dimension(); }
    EmbeddingVector embed(std::string_view text) const override;

private:
    std::shared_ptr<const Embedder> fallback_;
    std::map<std::string, EmbeddingVector> fixtures_;
};

}  // namespace semcache
