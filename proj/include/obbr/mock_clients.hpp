#pragma once

// In-process ChatClient implementations for dry runs and tests.

#include <atomic>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "obbr/client.hpp"
#include "obbr/error.hpp"
#include "obbr/text.hpp"

namespace obbr {

/// Returns the last user message verbatim.
class EchoClient final : public ChatClient {
public:
    std::string complete(const ChatRequest& req) override { return last_user_content(req); }
};

/// Applies a pure function to the last user message.
class TransformClient final : public ChatClient {
public:
    explicit TransformClient(std::function<std::string(const std::string&)> fn) : fn_(std::move(fn)) {}
    std::string complete(const ChatRequest& req) override { return fn_(last_user_content(req)); }

private:
    std::function<std::string(const std::string&)> fn_;
};

/// Looks the last user message up in a fixed table. Unknown inputs either
/// echo or raise EndpointError.
class ScriptedClient final : public ChatClient {
public:
    explicit ScriptedClient(std::map<std::string, std::string> script, bool echo_unknown = false)
        : script_(std::move(script)), echo_unknown_(echo_unknown) {}

    std::string complete(const ChatRequest& req) override {
        auto key = last_user_content(req);
        if (auto it = script_.find(key); it != script_.end()) return it->second;
        if (echo_unknown_) return key;
        throw EndpointError("scripted client has no entry for input");
    }

private:
    std::map<std::string, std::string> script_;
    bool echo_unknown_;
};

/// Fails the first `failures` calls with DeliveryError, then delegates.
class FlakyClient final : public ChatClient {
public:
    FlakyClient(ChatClient& inner, std::size_t failures) : inner_(inner), remaining_(failures) {}

    std::string complete(const ChatRequest& req) override {
        ++calls_;
        std::size_t left = remaining_.load();
        while (left > 0) {
            if (remaining_.compare_exchange_weak(left, left - 1)) throw DeliveryError("injected transport failure");
        }
        return inner_.complete(req);
    }

    std::size_t calls() const noexcept { return calls_.load(); }

private:
    ChatClient& inner_;
    std::atomic<std::size_t> remaining_;
    std::atomic<std::size_t> calls_{0};
};

/// Removes every occurrence of each trigger and collapses the whitespace
/// left behind.
inline std::string strip_triggers(std::string s, const std::vector<std::string>& triggers) {
    for (const auto& t : triggers) s = text::replace_all(std::move(s), t, "");
    std::string out;
    for (const auto& [b, e] : text::words(s)) {
        if (!out.empty()) out += ' ';
        out.append(s, b, e - b);
    }
    return out;
}

} // namespace obbr
