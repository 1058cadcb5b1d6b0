#pragma once

// Benign-corpus vector index with exact top-k cosine retrieval.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "obbr/dataset.hpp"
#include "obbr/error.hpp"
#include "obbr/text.hpp"

namespace obbr {

inline constexpr std::size_t default_dimension = 384;
inline constexpr std::size_t default_chunk_size = 256;
inline constexpr std::size_t default_chunk_overlap = 10;
inline constexpr std::size_t default_top_k = 3;

class EmbeddingVector {
public:
    EmbeddingVector() = default;
    explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
        double sq = 0.0;
        for (double v : values_) {
            if (!std::isfinite(v)) throw ValidationError("embedding has a non-finite entry");
            sq += v * v;
        }
        norm_ = std::sqrt(sq);
    }

    std::span<const double> values() const noexcept { return values_; }
    std::size_t dimension() const noexcept { return values_.size(); }
    double norm() const noexcept { return norm_; }

    friend bool operator==(const EmbeddingVector& a, const EmbeddingVector& b) { return a.values_ == b.values_; }

private:
    std::vector<double> values_;
    double norm_ = 0.0;
};

/// Cosine similarity; 0 when either vector has zero norm.
inline double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dimension() != b.dimension()) throw ValidationError("embedding dimension mismatch");
    if (a.norm() == 0.0 || b.norm() == 0.0) return 0.0;
    double dot = 0.0;
    const auto av = a.values();
    const auto bv = b.values();
    for (std::size_t i = 0; i < av.size(); ++i) dot += av[i] * bv[i];
    return dot / (a.norm() * b.norm());
}

/// Maps text to a fixed-dimension vector. Implementations must be
/// deterministic: the same text always yields the same vector.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::string id() const = 0;
    virtual std::size_t dimension() const = 0;
    virtual EmbeddingVector embed(std::string_view text) const = 0;

    virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const {
        std::vector<EmbeddingVector> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(embed(t));
        return out;
    }
};

/// Hashed term-frequency embedder: lowercase, split on non-alphanumerics,
/// hash each token into one of `dimension` buckets, count, L2-normalize.
/// Bytes >= 0x80 count as token characters so non-ASCII words survive.
class HashedEmbedder final : public Embedder {
public:
    explicit HashedEmbedder(std::size_t dimension = default_dimension) : dim_(dimension) {
        if (dim_ == 0) throw ConfigError("embedding dimension must be positive");
    }

    std::string id() const override { return "hashed-tf-fnv1a64-d" + std::to_string(dim_); }
    std::size_t dimension() const override { return dim_; }

    EmbeddingVector embed(std::string_view text) const override {
        std::vector<double> counts(dim_, 0.0);
        const std::string lower = text::ascii_lower(text);
        std::size_t i = 0;
        while (i < lower.size()) {
            while (i < lower.size() && !is_token_char(lower[i])) ++i;
            std::size_t b = i;
            while (i < lower.size() && is_token_char(lower[i])) ++i;
            if (i > b) counts[text::fnv1a64(std::string_view(lower).substr(b, i - b)) % dim_] += 1.0;
        }
        double sq = 0.0;
        for (double c : counts) sq += c * c;
        if (sq > 0.0) {
            const double inv = 1.0 / std::sqrt(sq);
            for (double& c : counts) c *= inv;
        }
        return EmbeddingVector(std::move(counts));
    }

private:
    static bool is_token_char(char c) noexcept {
        const auto u = static_cast<unsigned char>(c);
        return (u >= 'a' && u <= 'z') || (u >= '0' && u <= '9') || u >= 0x80;
    }

    std::size_t dim_;
};

/// Splits `text` into windows of at most `size` code points with stride
/// `size - overlap`. The last window ends at the end of the text.
inline std::vector<std::string> chunk_text(std::string_view text, std::size_t size, std::size_t overlap) {
    if (size <= overlap) throw ConfigError("chunk size must exceed chunk overlap");
    std::vector<std::string> chunks;
    const auto offs = text::code_point_offsets(text);
    const std::size_t n = offs.size() - 1;
    if (n == 0) return chunks;
    const std::size_t stride = size - overlap;
    for (std::size_t start = 0;; start += stride) {
        const std::size_t end = std::min(start + size, n);
        chunks.emplace_back(text.substr(offs[start], offs[end] - offs[start]));
        if (end == n) break;
    }
    return chunks;
}

struct IndexedChunk {
    std::string text;
    std::string source_id;
    EmbeddingVector vector;
};

struct BenignIndex {
    std::vector<IndexedChunk> chunks;
    std::size_t dimension = default_dimension;
    std::size_t chunk_size = default_chunk_size;
    std::size_t chunk_overlap = default_chunk_overlap;
    std::string embedder_id;

    std::size_t size() const noexcept { return chunks.size(); }
    bool empty() const noexcept { return chunks.empty(); }
};

/// Chunks and embeds every sample's prompt text. The corpus must be
/// non-empty and entirely clean.
inline BenignIndex build_index(const Dataset& corpus, const Embedder& embedder,
                               std::size_t size = default_chunk_size,
                               std::size_t overlap = default_chunk_overlap) {
    if (corpus.empty()) throw ValidationError("empty benign corpus");
    for (const auto& s : corpus.samples)
        if (s.label != Label::clean)
            throw ValidationError("benign corpus contains non-clean sample " + s.id + " (label " +
                                  std::string(to_string(s.label)) + ")");

    BenignIndex index;
    index.dimension = embedder.dimension();
    index.chunk_size = size;
    index.chunk_overlap = overlap;
    index.embedder_id = embedder.id();

    std::vector<std::string> texts;
    std::vector<std::string> sources;
    for (const auto& s : corpus.samples)
        for (auto& c : chunk_text(s.prompt_text(), size, overlap)) {
            texts.push_back(std::move(c));
            sources.push_back(s.id);
        }

    constexpr std::size_t batch = 64;
    index.chunks.reserve(texts.size());
    for (std::size_t b = 0; b < texts.size(); b += batch) {
        const std::size_t n = std::min(batch, texts.size() - b);
        auto vecs = embedder.embed_batch(std::span<const std::string>(texts).subspan(b, n));
        if (vecs.size() != n) throw Error("embedder returned " + std::to_string(vecs.size()) +
                                          " vectors for " + std::to_string(n) + " texts");
        for (std::size_t i = 0; i < n; ++i) {
            if (vecs[i].dimension() != index.dimension)
                throw ValidationError("embedder returned dimension " + std::to_string(vecs[i].dimension()) +
                                      ", expected " + std::to_string(index.dimension));
            index.chunks.push_back({std::move(texts[b + i]), std::move(sources[b + i]), std::move(vecs[i])});
        }
    }
    return index;
}

struct RetrievalHit {
    std::size_t ordinal;  // insertion position in the index
    double similarity;
};

/// Exact top-k by cosine against a precomputed query vector. Ties are broken
/// by ascending insertion ordinal. Returns min(k, |index|) hits.
inline std::vector<RetrievalHit> top_k(const EmbeddingVector& query, const BenignIndex& index, std::size_t k) {
    if (k == 0) throw ValidationError("k must be at least 1");
    if (index.empty()) throw ValidationError("retrieval from an empty index");
    if (query.dimension() != index.dimension) throw ValidationError("query dimension does not match index");

    std::vector<RetrievalHit> hits;
    hits.reserve(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) hits.push_back({i, cosine(query, index.chunks[i].vector)});
    const auto n = static_cast<std::ptrdiff_t>(std::min(k, hits.size()));
    std::partial_sort(hits.begin(), hits.begin() + n, hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.ordinal < b.ordinal;
    });
    hits.resize(static_cast<std::size_t>(n));
    return hits;
}

inline std::vector<RetrievalHit> retrieve_hits(std::string_view query, const BenignIndex& index, std::size_t k,
                                               const Embedder& embedder) {
    if (embedder.id() != index.embedder_id)
        throw ValidationError("embedder \"" + embedder.id() + "\" does not match index embedder \"" +
                              index.embedder_id + "\"");
    return top_k(embedder.embed(query), index, k);
}

/// The k chunk texts most similar to `query`, most similar first.
inline std::vector<std::string> retrieve_k(std::string_view query, const BenignIndex& index, std::size_t k,
                                           const Embedder& embedder) {
    std::vector<std::string> out;
    for (const auto& h : retrieve_hits(query, index, k, embedder)) out.push_back(index.chunks[h.ordinal].text);
    return out;
}

// Index file: JSON lines. The first line is a header
//   {"format":"obbr-benign-index","version":1,"dimension":..,"chunk_size":..,
//    "chunk_overlap":..,"embedder_id":..,"count":..}
// followed by one {"text","source_id","vector"} record per chunk.

inline constexpr std::string_view index_format_name = "obbr-benign-index";
inline constexpr int index_format_version = 1;

inline void save_index(const BenignIndex& index, const std::filesystem::path& path) {
    std::string body;
    nlohmann::ordered_json header;
    header["format"] = index_format_name;
    header["version"] = index_format_version;
    header["dimension"] = index.dimension;
    header["chunk_size"] = index.chunk_size;
    header["chunk_overlap"] = index.chunk_overlap;
    header["embedder_id"] = index.embedder_id;
    header["count"] = index.size();
    body += header.dump() + "\n";
    for (const auto& c : index.chunks) {
        nlohmann::ordered_json rec;
        rec["text"] = c.text;
        rec["source_id"] = c.source_id;
        rec["vector"] = std::vector<double>(c.vector.values().begin(), c.vector.values().end());
        body += rec.dump() + "\n";
    }
    write_text_file(path, body);
}

inline BenignIndex load_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open index");
    BenignIndex index;
    std::string line;
    std::size_t lineno = 0;
    std::size_t expected = 0;
    try {
        if (!std::getline(in, line)) throw IoError(path.string(), "empty index file");
        ++lineno;
        const auto header = nlohmann::json::parse(line);
        if (header.value("format", "") != index_format_name)
            throw IoError(path.string(), "not a benign index file");
        if (header.at("version").get<int>() != index_format_version)
            throw IoError(path.string(), "unsupported index version " + header.at("version").dump());
        index.dimension = header.at("dimension").get<std::size_t>();
        index.chunk_size = header.at("chunk_size").get<std::size_t>();
        index.chunk_overlap = header.at("chunk_overlap").get<std::size_t>();
        index.embedder_id = header.at("embedder_id").get<std::string>();
        expected = header.at("count").get<std::size_t>();
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            const auto rec = nlohmann::json::parse(line);
            EmbeddingVector v(rec.at("vector").get<std::vector<double>>());
            if (v.dimension() != index.dimension) throw ParseError(lineno, "vector dimension mismatch");
            index.chunks.push_back(
                {rec.at("text").get<std::string>(), rec.at("source_id").get<std::string>(), std::move(v)});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(lineno, path.string() + ": " + e.what());
    }
    if (index.size() != expected)
        throw IoError(path.string(), "header declares " + std::to_string(expected) + " chunks, found " +
                                         std::to_string(index.size()));
    return index;
}

} // namespace obbr
