#pragma once

// JSON-over-HTTP transports: chat completions and embeddings.

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "obbr/client.hpp"
#include "obbr/error.hpp"
#include "obbr/retrieval.hpp"

namespace obbr {

struct Endpoint {
    std::string base;  // scheme://host[:port]
    std::string path;  // always starts with '/'
};

inline Endpoint parse_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint URL lacks a scheme: " + url);
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw ConfigError("unsupported endpoint scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

struct HttpSettings {
    std::string url;
    std::string api_key;
    std::chrono::seconds timeout{120};
};

namespace detail {

/// POSTs a JSON body and returns the parsed response. Maps failures onto
/// DeliveryError (retryable) and EndpointError.
inline nlohmann::json post_json(const HttpSettings& settings, const std::string& body) {
    const auto ep = parse_endpoint(settings.url);
    httplib::Client cli(ep.base);
    cli.set_connection_timeout(settings.timeout);
    cli.set_read_timeout(settings.timeout);
    cli.set_write_timeout(settings.timeout);
    httplib::Headers headers;
    if (!settings.api_key.empty()) headers.emplace("Authorization", "Bearer " + settings.api_key);

    auto res = cli.Post(ep.path, headers, body, "application/json");
    if (!res) throw DeliveryError(settings.url + ": " + httplib::to_string(res.error()));
    if (res->status == 429 || res->status >= 500)
        throw DeliveryError(settings.url + ": HTTP " + std::to_string(res->status));
    if (res->status < 200 || res->status >= 300)
        throw EndpointError(settings.url + ": HTTP " + std::to_string(res->status) + ": " + res->body);
    try {
        return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
        throw EndpointError(settings.url + ": response is not JSON: " + e.what());
    }
}

} // namespace detail

/// OpenAI-style /chat/completions client. Reads choices[0].message.content.
class HttpChatClient final : public ChatClient {
public:
    explicit HttpChatClient(HttpSettings settings) : settings_(std::move(settings)) {
        parse_endpoint(settings_.url);
    }

    std::string complete(const ChatRequest& req) override {
        const auto j = detail::post_json(settings_, request_body(req));
        try {
            const auto& content = j.at("choices").at(0).at("message").at("content");
            if (content.is_null()) return {};
            return content.get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw EndpointError(settings_.url + ": unexpected response shape: " + e.what());
        }
    }

private:
    HttpSettings settings_;
};

/// Embedding endpoint client. Request: {"model", "input": [texts]}.
/// Accepts either {"data": [{"embedding": [...]}, ...]} or
/// {"embeddings": [[...], ...]} as the response.
class RemoteEmbedder final : public Embedder {
public:
    RemoteEmbedder(HttpSettings settings, std::string model, std::size_t dimension = default_dimension,
                   RetryPolicy retry = {})
        : settings_(std::move(settings)), model_(std::move(model)), dim_(dimension), retry_(retry) {
        parse_endpoint(settings_.url);
    }

    std::string id() const override { return "remote:" + model_ + ":d" + std::to_string(dim_); }
    std::size_t dimension() const override { return dim_; }

    EmbeddingVector embed(std::string_view text) const override {
        std::vector<std::string> one{std::string(text)};
        return std::move(embed_batch(one).front());
    }

    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override {
        nlohmann::ordered_json req;
        req["model"] = model_;
        req["input"] = std::vector<std::string>(texts.begin(), texts.end());
        const auto body = req.dump();

        nlohmann::json res;
        std::string last_error;
        const std::size_t attempts = std::max<std::size_t>(retry_.max_attempts, 1);
        bool ok = false;
        for (std::size_t a = 1; a <= attempts && !ok; ++a) {
            if (auto wait = retry_.backoff_before(a); wait.count() > 0) std::this_thread::sleep_for(wait);
            try {
                res = detail::post_json(settings_, body);
                ok = true;
            } catch (const DeliveryError& e) {
                last_error = e.what();
            }
        }
        if (!ok) throw DeliveryError("embedding request failed after " + std::to_string(attempts) +
                                     " attempts: " + last_error);

        std::vector<EmbeddingVector> out;
        try {
            if (res.contains("data")) {
                for (const auto& item : res.at("data"))
                    out.emplace_back(item.at("embedding").get<std::vector<double>>());
            } else {
                for (const auto& v : res.at("embeddings")) out.emplace_back(v.get<std::vector<double>>());
            }
        } catch (const nlohmann::json::exception& e) {
            throw EndpointError(settings_.url + ": unexpected embedding response: " + e.what());
        }
        if (out.size() != texts.size())
            throw EndpointError(settings_.url + ": got " + std::to_string(out.size()) + " embeddings for " +
                                std::to_string(texts.size()) + " inputs");
        for (const auto& v : out)
            if (v.dimension() != dim_)
                throw EndpointError(settings_.url + ": embedding dimension " + std::to_string(v.dimension()) +
                                    ", expected " + std::to_string(dim_));
        return out;
    }

private:
    HttpSettings settings_;
    std::string model_;
    std::size_t dim_;
    RetryPolicy retry_;
};

} // namespace obbr
