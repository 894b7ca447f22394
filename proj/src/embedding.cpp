#include "semcache/embedding.hpp"

#include <cmath>
#include <stdexcept>

#include "semcache/text.hpp"

namespace semcache {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("embedding dimension must be positive");
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("embedding contains a non-finite value");
    }
}

double EmbeddingVector::norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s);
}

EmbeddingVector EmbeddingVector::normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::invalid_argument("cannot normalize a zero vector");
    std::vector<double> out(values_);
    for (double& v : out) v /= n;
    return EmbeddingVector(std::move(out));
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dimension() != b.dimension())
        throw std::invalid_argument("embedding dimension mismatch: " + std::to_string(a.dimension()) + " vs " +
                                    std::to_string(b.dimension()));
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    const auto& x = a.values();
    const auto& y = b.values();
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        na += x[i] * x[i];
        nb += y[i] * y[i];
    }
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine similarity of a zero vector");
    const double c = dot / (std::sqrt(na) * std::sqrt(nb));
    if (c > 1.0) return 1.0;
    if (c < -1.0) return -1.0;
    return c;
}

namespace {
std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace

HashEmbedder::HashEmbedder(std::size_t dimension, std::uint64_t seed) : dimension_(dimension), seed_(seed) {
    if (dimension_ == 0) throw std::invalid_argument("embedding dimension must be positive");
}

EmbeddingVector HashEmbedder::embed(std::string_view input) const {
    std::vector<double> acc(dimension_, 0.0);
    const auto tokens = text::words(input);
    if (tokens.empty()) throw std::invalid_argument("cannot embed text without words");
    for (const auto& tok : tokens) {
        std::uint64_t state = text::fnv1a64(tok) ^ seed_;
        for (double& v : acc) {
            // uniform in [-1, 1)
            v += static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
        }
    }
    return EmbeddingVector(std::move(acc)).normalized();
}

FixtureEmbedder::FixtureEmbedder(std::shared_ptr<const Embedder> fallback, std::map<std::string, EmbeddingVector> fixtures)
    : fallback_(std::move(fallback)) {
    if (!fallback_) throw std::invalid_argument("fixture embedder needs a fallback");
    for (auto& [k, v] : fixtures) {
        if (v.dimension() != fallback_->dimension())
            throw std::invalid_argument("fixture embedding dimension mismatch for '" + k + "'");
        fixtures_.emplace(text::normalize_question(k), std::move(v));
    }
}

EmbeddingVector FixtureEmbedder::embed(std::string_view input) const {
    auto it = fixtures_.find(text::normalize_question(input));
    if (it != fixtures_.end()) return it->second;
    return fallback_->embed(input);
}

}  // namespace semcache
