#pragma once

// Dataset sanitization by rewriting every prompt through an LLM.
//
// For each sample x the rewriter sees either the open-book context
// [s; b_1..b_k; x], where b_i are the k benign chunks nearest to x, or a
// closed-book context [s; x]. The system prompt s (with exemplars spliced
// in) is sent as the system message and x as the user message.

#include <atomic>
#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "obbr/client.hpp"
#include "obbr/dataset.hpp"
#include "obbr/digest.hpp"
#include "obbr/error.hpp"
#include "obbr/prompts.hpp"
#include "obbr/retrieval.hpp"
#include "obbr/text.hpp"

namespace obbr {

struct RewriterConfig {
    RewriteMode mode = RewriteMode::OBBR;
    std::size_t k = default_top_k;
    std::size_t max_new_tokens = 256;
    double temperature = 0.0;
    std::string model_name = "rewriter";
    RetryPolicy retry;
    std::size_t concurrency = 1;
    bool strict = true;
};

inline void validate(const RewriterConfig& cfg) {
    if (!(cfg.temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
    if (cfg.max_new_tokens < 1) throw ConfigError("max_new_tokens must be >= 1");
    if (cfg.k < 1) throw ConfigError("k must be >= 1");
    if (cfg.concurrency < 1) throw ConfigError("concurrency must be >= 1");
}

/// Index plus the embedder it was built with.
struct Retriever {
    const BenignIndex& index;
    const Embedder& embedder;
};

struct RewriteContext {
    RewriteMode mode = RewriteMode::CBBR;
    std::string system_prompt;           // template, exemplar slot unfilled
    std::vector<std::string> exemplars;  // retrieval order; empty unless open-book
    std::string input;

    /// Exemplar lines "1. <chunk>" joined by newlines. Line breaks inside a
    /// chunk are flattened so each exemplar occupies exactly one line.
    std::string exemplar_block() const {
        std::string out;
        for (std::size_t i = 0; i < exemplars.size(); ++i) {
            if (i) out += '\n';
            std::string line = text::replace_all(text::replace_all(exemplars[i], "\r\n", " "), "\n", " ");
            out += std::to_string(i + 1) + ". " + text::replace_all(std::move(line), "\r", " ");
        }
        return out;
    }

    /// System message content: the template with exemplars spliced in.
    std::string system_message() const {
        if (!prompts::is_open_book(mode)) return system_prompt;
        return text::replace_all(system_prompt, prompts::examples_slot, exemplar_block());
    }

    /// Flat rendering of the whole context: system message then the input,
    /// which lands right after the template's trailing marker line.
    std::string render() const { return system_message() + input; }

    friend bool operator==(const RewriteContext&, const RewriteContext&) = default;
};

/// Assembles the rewriter context for prompt `x`. Open-book mode needs a
/// non-empty index.
inline RewriteContext build_context(std::string_view x, RewriteMode mode, const std::optional<Retriever>& retriever,
                                    const RewriterConfig& cfg) {
    RewriteContext ctx;
    ctx.mode = mode;
    ctx.system_prompt = std::string(prompts::template_for(mode));
    ctx.input = std::string(x);
    if (prompts::is_open_book(mode)) {
        if (!retriever) throw ValidationError("open-book rewriting requires a benign index");
        if (retriever->index.empty()) throw ValidationError("open-book rewriting requires a non-empty benign index");
        ctx.exemplars = retrieve_k(x, retriever->index, cfg.k, retriever->embedder);
    }
    return ctx;
}

inline ChatRequest make_request(const RewriteContext& ctx, const std::string& model, double temperature,
                                std::size_t max_tokens) {
    ChatRequest req;
    req.model = model;
    req.messages = {{"system", ctx.system_message()}, {"user", ctx.input}};
    req.temperature = temperature;
    req.max_tokens = max_tokens;
    return req;
}

inline ChatRequest make_request(const RewriteContext& ctx, const RewriterConfig& cfg) {
    return make_request(ctx, cfg.model_name, cfg.temperature, cfg.max_new_tokens);
}

struct RewriteRecord {
    std::string lineage_id;
    std::string original;
    RewriteContext context;
    std::string model;
    double temperature = 0.0;
    std::size_t max_tokens = 0;
    std::string context_digest;  // sha256 of the exact request body
    std::string rewritten;
    std::chrono::milliseconds latency{0};
    std::size_t attempt_count = 0;
};

inline std::string recompute_digest(const RewriteRecord& r) {
    return sha256_hex(request_body(make_request(r.context, r.model, r.temperature, r.max_tokens)));
}

inline nlohmann::ordered_json to_json(const RewriteRecord& r) {
    nlohmann::ordered_json j;
    j["lineage_id"] = r.lineage_id;
    j["original"] = r.original;
    j["mode"] = to_string(r.context.mode);
    j["prompt_version"] = prompts::version;
    j["exemplars"] = r.context.exemplars;
    j["model"] = r.model;
    j["temperature"] = r.temperature;
    j["max_tokens"] = r.max_tokens;
    j["context_digest"] = r.context_digest;
    j["rewritten"] = r.rewritten;
    j["latency_ms"] = r.latency.count();
    j["attempt_count"] = r.attempt_count;
    return j;
}

/// Rebuilds a record from its audit JSON. The system prompt comes from the
/// embedded template for the recorded mode.
inline RewriteRecord record_from_json(const nlohmann::json& j) {
    RewriteRecord r;
    try {
        auto mode = parse_rewrite_mode(j.at("mode").get<std::string>());
        if (!mode) throw ValidationError("unknown mode in record");
        if (j.value("prompt_version", "") != prompts::version)
            throw ValidationError("record uses prompt version " + j.value("prompt_version", std::string("?")));
        r.lineage_id = j.at("lineage_id").get<std::string>();
        r.original = j.at("original").get<std::string>();
        r.context.mode = *mode;
        r.context.system_prompt = std::string(prompts::template_for(*mode));
        r.context.exemplars = j.at("exemplars").get<std::vector<std::string>>();
        r.context.input = r.original;
        r.model = j.at("model").get<std::string>();
        r.temperature = j.at("temperature").get<double>();
        r.max_tokens = j.at("max_tokens").get<std::size_t>();
        r.context_digest = j.at("context_digest").get<std::string>();
        r.rewritten = j.at("rewritten").get<std::string>();
        r.latency = std::chrono::milliseconds{j.at("latency_ms").get<long long>()};
        r.attempt_count = j.at("attempt_count").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed rewrite record: ") + e.what());
    }
    return r;
}

struct RewriteOutcome {
    std::string text;
    std::size_t attempts = 0;
    std::chrono::milliseconds latency{0};
};

/// Sends one context to the rewriter. Transport failures that outlast the
/// retry policy surface as DeliveryError; empty or unusable answers as
/// RewriteError. The original text is never substituted.
inline RewriteOutcome rewrite_sample(const RewriteContext& ctx, ChatClient& client, const RewriterConfig& cfg,
                                     const std::string& lineage_id = {}) {
    const auto start = std::chrono::steady_clock::now();
    try {
        auto c = complete_with_retry(client, make_request(ctx, cfg), cfg.retry);
        const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - start);
        return {std::move(c.text), c.attempts, latency};
    } catch (const DeliveryError& e) {
        throw DeliveryError(lineage_id.empty() ? std::string(e.what()) : lineage_id + ": " + e.what());
    } catch (const EndpointError& e) {
        throw RewriteError(lineage_id, e.what());
    }
}

struct RewriteFailure {
    std::string lineage_id;
    std::string kind;  // "delivery" or "rewrite"
    std::string message;
};

inline nlohmann::ordered_json to_json(const std::vector<RewriteFailure>& failures) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& f : failures)
        arr.push_back({{"lineage_id", f.lineage_id}, {"kind", f.kind}, {"message", f.message}});
    return arr;
}

struct RewriteResult {
    Dataset dataset;
    std::vector<RewriteRecord> records;
    std::vector<RewriteFailure> failures;
};

/// Raised in strict mode when any sample failed. Carries every failure.
class RewriteBatchError : public Error {
public:
    explicit RewriteBatchError(std::vector<RewriteFailure> failures)
        : Error(std::to_string(failures.size()) + " sample(s) failed to rewrite; first: " +
                failures.front().lineage_id + ": " + failures.front().message),
          failures_(std::move(failures)) {}
    const std::vector<RewriteFailure>& failures() const noexcept { return failures_; }

private:
    std::vector<RewriteFailure> failures_;
};

/// Rewrites every sample's prompt text. Up to `cfg.concurrency` requests are
/// in flight; output order always follows input order. Strict mode throws
/// RewriteBatchError if any sample failed. Lenient mode drops failed samples
/// from the output and lists them in `failures`.
inline RewriteResult rewrite_dataset(const Dataset& d, const RewriterConfig& cfg,
                                     const std::optional<Retriever>& retriever, ChatClient& client) {
    validate(cfg);
    if (prompts::is_open_book(cfg.mode) && !retriever)
        throw ValidationError("open-book rewriting requires a benign index");

    struct Slot {
        std::optional<RewriteRecord> record;
        std::optional<RewriteFailure> failure;
    };
    std::vector<Slot> slots(d.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < d.size(); i = next++) {
            const Sample& s = d.samples[i];
            try {
                auto ctx = build_context(s.prompt_text(), cfg.mode, retriever, cfg);
                const auto req = make_request(ctx, cfg);
                RewriteRecord rec;
                rec.lineage_id = s.id;
                rec.original = ctx.input;
                rec.model = cfg.model_name;
                rec.temperature = cfg.temperature;
                rec.max_tokens = cfg.max_new_tokens;
                rec.context_digest = sha256_hex(request_body(req));
                auto out = rewrite_sample(ctx, client, cfg, s.id);
                rec.context = std::move(ctx);
                rec.rewritten = std::move(out.text);
                rec.latency = out.latency;
                rec.attempt_count = out.attempts;
                slots[i].record = std::move(rec);
            } catch (const DeliveryError& e) {
                slots[i].failure = RewriteFailure{s.id, "delivery", e.what()};
            } catch (const Error& e) {
                slots[i].failure = RewriteFailure{s.id, "rewrite", e.what()};
            }
        }
    };

    const std::size_t workers = std::min(cfg.concurrency, std::max<std::size_t>(d.size(), 1));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }

    RewriteResult result;
    result.dataset.metadata = d.metadata;
    result.dataset.metadata["rewrite_mode"] = std::string(to_string(cfg.mode));
    result.dataset.metadata["prompt_version"] = std::string(prompts::version);
    for (std::size_t i = 0; i < d.size(); ++i) {
        auto& slot = slots[i];
        if (slot.failure) {
            result.failures.push_back(std::move(*slot.failure));
            continue;
        }
        Sample out = d.samples[i];
        out.instruction = slot.record->rewritten;
        out.input.reset();
        out.label = Label::rewritten;
        out.lineage_id = d.samples[i].id;
        result.dataset.samples.push_back(std::move(out));
        result.records.push_back(std::move(*slot.record));
    }
    if (cfg.strict && !result.failures.empty()) throw RewriteBatchError(std::move(result.failures));
    return result;
}

} // namespace obbr
