#pragma once

// Chat-completion protocol shared by the rewriter, the model-query batcher
// and the optional judge.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "obbr/error.hpp"
#include "obbr/text.hpp"

namespace obbr {

struct ChatMessage {
    std::string role;
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    std::size_t max_tokens = 256;
};

/// Exact request body sent on the wire. Key order is fixed so the body (and
/// any digest of it) is reproducible.
inline std::string request_body(const ChatRequest& req) {
    nlohmann::ordered_json j;
    j["model"] = req.model;
    j["messages"] = nlohmann::ordered_json::array();
    for (const auto& m : req.messages) j["messages"].push_back({{"role", m.role}, {"content", m.content}});
    j["temperature"] = req.temperature;
    j["max_tokens"] = req.max_tokens;
    return j.dump();
}

/// Content of the last user message, or "" if there is none.
inline std::string last_user_content(const ChatRequest& req) {
    for (auto it = req.messages.rbegin(); it != req.messages.rend(); ++it)
        if (it->role == "user") return it->content;
    return {};
}

/// One completion per call. Implementations throw DeliveryError for
/// transport-level failures (retried) and EndpointError for unusable
/// answers (not retried). Must be safe to call from several threads.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
};

struct RetryPolicy {
    std::size_t max_attempts = 3;
    std::chrono::milliseconds initial_backoff{1000};
    double backoff_multiplier = 2.0;
    std::chrono::milliseconds max_backoff{30000};

    std::chrono::milliseconds backoff_before(std::size_t attempt) const {
        // attempt is 1-based; no wait before the first one.
        if (attempt <= 1) return std::chrono::milliseconds{0};
        double ms = static_cast<double>(initial_backoff.count());
        for (std::size_t i = 2; i < attempt; ++i) ms *= backoff_multiplier;
        return std::chrono::milliseconds{
            static_cast<long long>(std::min(ms, static_cast<double>(max_backoff.count())))};
    }
};

struct Completion {
    std::string text;
    std::size_t attempts = 0;
};

/// Calls `client` until it yields a non-empty (trimmed) completion or the
/// policy is exhausted. An empty completion counts as a failed attempt.
/// Throws DeliveryError if the last failure was transport-level, otherwise
/// EndpointError.
inline Completion complete_with_retry(ChatClient& client, const ChatRequest& req, const RetryPolicy& policy) {
    const std::size_t attempts = std::max<std::size_t>(policy.max_attempts, 1);
    std::string last_error;
    bool last_was_transport = false;
    for (std::size_t attempt = 1; attempt <= attempts; ++attempt) {
        if (auto wait = policy.backoff_before(attempt); wait.count() > 0) std::this_thread::sleep_for(wait);
        try {
            auto text = std::string(text::trim(client.complete(req)));
            if (!text.empty()) return {std::move(text), attempt};
            last_error = "empty completion";
            last_was_transport = false;
        } catch (const DeliveryError& e) {
            last_error = e.what();
            last_was_transport = true;
        }
    }
    const std::string msg = "failed after " + std::to_string(attempts) + " attempts: " + last_error;
    if (last_was_transport) throw DeliveryError(msg);
    throw EndpointError(msg);
}

/// Like complete_with_retry, but only transport failures are retried and an
/// empty completion is returned as is.
inline Completion complete_delivered(ChatClient& client, const ChatRequest& req, const RetryPolicy& policy) {
    const std::size_t attempts = std::max<std::size_t>(policy.max_attempts, 1);
    std::string last_error;
    for (std::size_t attempt = 1; attempt <= attempts; ++attempt) {
        if (auto wait = policy.backoff_before(attempt); wait.count() > 0) std::this_thread::sleep_for(wait);
        try {
            return {client.complete(req), attempt};
        } catch (const DeliveryError& e) {
            last_error = e.what();
        }
    }
    throw DeliveryError("failed after " + std::to_string(attempts) + " attempts: " + last_error);
}

} // namespace obbr
