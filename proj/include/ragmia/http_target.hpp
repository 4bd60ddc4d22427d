#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <condition_variable>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ragmia/error.hpp"
#include "ragmia/target.hpp"

namespace ragmia {

struct HttpEndpointConfig {
    std::string base_url;          // e.g. http://host:port
    int timeout_seconds = 30;
    int retries = 2;               // retry attempts after the first try
    int backoff_initial_ms = 200;  // doubles per retry
    int max_inflight = 4;
};

namespace detail {

// Counting gate for the in-flight request cap.
class InflightGate {
public:
    explicit InflightGate(int limit) : limit_(limit) {}

    void acquire() {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return active_ < limit_; });
        ++active_;
    }
    void release() {
        { std::lock_guard lock(mu_); --active_; }
        cv_.notify_one();
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    int limit_;
    int active_ = 0;
};

inline GenerationResult parse_generation_response(const std::string& body) {
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw ResponseParseError(e.byte, std::string("http_generate: malformed response body: ") + e.what());
    }
    if (!obj.is_object() || !obj.contains("text") || !obj["text"].is_string())
        throw ResponseParseError(0, "http_generate: response missing string field 'text'");

    GenerationResult result;
    result.text = obj["text"].get<std::string>();
    if (obj.contains("tokens") && !obj["tokens"].is_null())
        result.tokens = obj["tokens"].get<std::vector<std::string>>();
    else
        result.tokens = tokenize(result.text);
    if (obj.contains("token_logprobs") && !obj["token_logprobs"].is_null())
        result.token_logprobs = obj["token_logprobs"].get<std::vector<double>>();
    result.validate();
    return result;
}

}  // namespace detail

/// Blocking client for a black-box RAG endpoint. POST {base_url}/generate
/// with {"prompt","system_prompt","max_tokens"}; expects {"text", "tokens"?,
/// "token_logprobs"?}. Retries 5xx and transport failures with exponential
/// backoff; 4xx is not retried.
class HttpTarget {
public:
    explicit HttpTarget(HttpEndpointConfig config)
        : config_(std::move(config)), gate_(std::max(config_.max_inflight, 1)) {
        if (config_.base_url.empty())
            throw ValidationError("HttpTarget: base_url is empty (set it or RAG_MIA_TARGET_URL)");
    }

    GenerationResult generate(const GenerationRequest& req) {
        gate_.acquire();
        struct Release {
            detail::InflightGate& g;
            ~Release() { g.release(); }
        } release{gate_};

        nlohmann::json body = {
            {"prompt", req.prompt},
            {"system_prompt", req.system_prompt},
            {"max_tokens", req.max_tokens},
        };
        const std::string payload = body.dump();

        std::string last_error;
        for (int attempt = 0; attempt <= config_.retries; ++attempt) {
            if (attempt > 0) {
                auto delay = std::chrono::milliseconds(config_.backoff_initial_ms << (attempt - 1));
                std::this_thread::sleep_for(delay);
            }
            httplib::Client client(config_.base_url);
            client.set_connection_timeout(config_.timeout_seconds, 0);
            client.set_read_timeout(config_.timeout_seconds, 0);
            auto res = client.Post("/generate", payload, "application/json");
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status >= 200 && res->status < 300)
                return detail::parse_generation_response(res->body);
            if (res->status >= 500) {
                last_error = "status " + std::to_string(res->status);
                continue;
            }
            throw HttpStatusError(res->status,
                                  "http_generate: target returned status " + std::to_string(res->status));
        }
        throw NetworkError("http_generate: exhausted " + std::to_string(config_.retries + 1) +
                           " attempts (" + last_error + ")");
    }

    const HttpEndpointConfig& config() const { return config_; }

private:
    HttpEndpointConfig config_;
    detail::InflightGate gate_;
};

inline GenerationResult http_generate(const HttpEndpointConfig& config, const GenerationRequest& req) {
    HttpTarget target(config);
    return target.generate(req);
}

}  // namespace ragmia
