#pragma once

// Pipeline configuration: one JSON file, overridden by command-line flags,
// overridden in turn by environment variables.
//
//   {
//     "seed": 7,
//     "out": "out",
//     "dataset": "data/train.jsonl",
//     "attack_spec": "configs/badnets.json",
//     "corpus": "data/benign.jsonl",
//     "index": "out/index.jsonl",
//     "embedder":  {"kind": "hashed", "dimension": 384, "chunk_size": 256,
//                   "chunk_overlap": 10, "endpoint": "", "model": "", "api_key": ""},
//     "rewriter":  {"client": "http", "endpoint": "", "model": "", "api_key": "",
//                   "mode": "OBBR", "k": 3, "max_new_tokens": 256, "temperature": 0,
//                   "concurrency": 4, "strict": true,
//                   "retry": {"max_attempts": 3, "initial_backoff_ms": 1000,
//                             "multiplier": 2.0, "max_backoff_ms": 30000}},
//     "evaluator": {"lexicon": "", "window": 64, "triggers": [],
//                   "victim_endpoint": "", "victim_model": "",
//                   "judge_endpoint": "", "judge_model": ""}
//   }
//
// Environment overrides: OBBR_SEED, OBBR_OUT, OBBR_REWRITER_ENDPOINT,
// OBBR_REWRITER_MODEL, OBBR_API_KEY, OBBR_CONCURRENCY, OBBR_EMBED_ENDPOINT,
// OBBR_EMBED_MODEL, OBBR_VICTIM_ENDPOINT, OBBR_JUDGE_ENDPOINT.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "obbr/client.hpp"
#include "obbr/error.hpp"
#include "obbr/evaluator.hpp"
#include "obbr/retrieval.hpp"
#include "obbr/rewriter.hpp"

namespace obbr {

struct EmbedderConfig {
    std::string kind = "hashed";  // "hashed" or "remote"
    std::size_t dimension = default_dimension;
    std::size_t chunk_size = default_chunk_size;
    std::size_t chunk_overlap = default_chunk_overlap;
    std::string endpoint;
    std::string model;
    std::string api_key;
};

struct EndpointConfig {
    std::string client = "http";  // "http" or "echo"
    std::string endpoint;
    std::string model;
    std::string api_key;
};

struct EvaluatorConfig {
    std::string lexicon;  // empty: built-in lexicon
    std::size_t window = default_refusal_window;
    std::vector<std::string> triggers;
    std::string victim_endpoint;
    std::string victim_model = "victim";
    std::string judge_endpoint;
    std::string judge_model = "judge";
};

struct PipelineConfig {
    std::optional<std::uint64_t> seed;
    std::filesystem::path out = "out";
    std::filesystem::path dataset;
    std::filesystem::path attack_spec;
    std::filesystem::path corpus;
    std::filesystem::path index;
    EmbedderConfig embedder;
    EndpointConfig rewriter_endpoint;
    RewriterConfig rewriter;
    EvaluatorConfig evaluator;
};

inline RetryPolicy retry_from_json(const nlohmann::json& j, RetryPolicy p = {}) {
    p.max_attempts = j.value("max_attempts", p.max_attempts);
    p.initial_backoff = std::chrono::milliseconds{j.value("initial_backoff_ms", p.initial_backoff.count())};
    p.backoff_multiplier = j.value("multiplier", p.backoff_multiplier);
    p.max_backoff = std::chrono::milliseconds{j.value("max_backoff_ms", p.max_backoff.count())};
    return p;
}

inline PipelineConfig config_from_json(const nlohmann::json& j) {
    PipelineConfig c;
    try {
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        c.out = j.value("out", c.out.string());
        c.dataset = j.value("dataset", std::string{});
        c.attack_spec = j.value("attack_spec", std::string{});
        c.corpus = j.value("corpus", std::string{});
        c.index = j.value("index", std::string{});
        if (auto e = j.find("embedder"); e != j.end()) {
            c.embedder.kind = e->value("kind", c.embedder.kind);
            c.embedder.dimension = e->value("dimension", c.embedder.dimension);
            c.embedder.chunk_size = e->value("chunk_size", c.embedder.chunk_size);
            c.embedder.chunk_overlap = e->value("chunk_overlap", c.embedder.chunk_overlap);
            c.embedder.endpoint = e->value("endpoint", std::string{});
            c.embedder.model = e->value("model", std::string{});
            c.embedder.api_key = e->value("api_key", std::string{});
        }
        if (auto r = j.find("rewriter"); r != j.end()) {
            c.rewriter_endpoint.client = r->value("client", c.rewriter_endpoint.client);
            c.rewriter_endpoint.endpoint = r->value("endpoint", std::string{});
            c.rewriter_endpoint.model = r->value("model", std::string{});
            c.rewriter_endpoint.api_key = r->value("api_key", std::string{});
            if (r->contains("mode")) {
                auto mode = parse_rewrite_mode(r->at("mode").get<std::string>());
                if (!mode) throw ConfigError("unknown rewrite mode " + r->at("mode").dump());
                c.rewriter.mode = *mode;
            }
            c.rewriter.k = r->value("k", c.rewriter.k);
            c.rewriter.max_new_tokens = r->value("max_new_tokens", c.rewriter.max_new_tokens);
            c.rewriter.temperature = r->value("temperature", c.rewriter.temperature);
            c.rewriter.concurrency = r->value("concurrency", c.rewriter.concurrency);
            c.rewriter.strict = r->value("strict", c.rewriter.strict);
            if (r->contains("retry")) c.rewriter.retry = retry_from_json(r->at("retry"), c.rewriter.retry);
            if (!c.rewriter_endpoint.model.empty()) c.rewriter.model_name = c.rewriter_endpoint.model;
        }
        if (auto ev = j.find("evaluator"); ev != j.end()) {
            c.evaluator.lexicon = ev->value("lexicon", std::string{});
            c.evaluator.window = ev->value("window", c.evaluator.window);
            c.evaluator.triggers = ev->value("triggers", std::vector<std::string>{});
            c.evaluator.victim_endpoint = ev->value("victim_endpoint", std::string{});
            c.evaluator.victim_model = ev->value("victim_model", c.evaluator.victim_model);
            c.evaluator.judge_endpoint = ev->value("judge_endpoint", std::string{});
            c.evaluator.judge_model = ev->value("judge_model", c.evaluator.judge_model);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("pipeline config: ") + e.what());
    }
    return c;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), "cannot open config");
    try {
        return config_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

namespace detail {
inline std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

inline std::uint64_t parse_u64(const std::string& name, const std::string& v) {
    try {
        std::size_t used = 0;
        auto n = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError(name + " is not a non-negative integer: " + v);
    }
}
} // namespace detail

/// Applies environment overrides in place. Highest precedence.
inline void apply_env_overrides(PipelineConfig& c) {
    using detail::env;
    if (auto v = env("OBBR_SEED")) c.seed = detail::parse_u64("OBBR_SEED", *v);
    if (auto v = env("OBBR_OUT")) c.out = *v;
    if (auto v = env("OBBR_REWRITER_ENDPOINT")) c.rewriter_endpoint.endpoint = *v;
    if (auto v = env("OBBR_REWRITER_MODEL")) c.rewriter_endpoint.model = c.rewriter.model_name = *v;
    if (auto v = env("OBBR_API_KEY")) c.rewriter_endpoint.api_key = *v;
    if (auto v = env("OBBR_CONCURRENCY")) c.rewriter.concurrency = detail::parse_u64("OBBR_CONCURRENCY", *v);
    if (auto v = env("OBBR_EMBED_ENDPOINT")) c.embedder.endpoint = *v;
    if (auto v = env("OBBR_EMBED_MODEL")) c.embedder.model = *v;
    if (auto v = env("OBBR_VICTIM_ENDPOINT")) c.evaluator.victim_endpoint = *v;
    if (auto v = env("OBBR_JUDGE_ENDPOINT")) c.evaluator.judge_endpoint = *v;
}

/// Every non-empty input path in `paths` must exist.
inline void require_paths(std::initializer_list<std::pair<const char*, std::filesystem::path>> paths) {
    for (const auto& [what, p] : paths) {
        if (p.empty()) throw ConfigError(std::string("no ") + what + " given");
        if (!std::filesystem::exists(p)) throw IoError(p.string(), std::string(what) + " not found");
    }
}

} // namespace obbr
