#include <doctest.h>

#include <atomic>
#include <string>
#include <thread>

#include <httplib.h>

#include "ragmia/http_target.hpp"

using namespace ragmia;

namespace {

// Stub RAG endpoint covering the client's contract paths.
class StubServer {
public:
    StubServer() {
        server_.Post("/generate", [this](const httplib::Request& req, httplib::Response& res) {
            ++requests_;
            last_body_ = req.body;
            switch (mode_) {
                case Mode::Ok:
                    res.set_content(R"({"text":"ok"})", "application/json");
                    break;
                case Mode::FailTwiceThenOk:
                    if (requests_ <= 2) {
                        res.status = 500;
                    } else {
                        res.set_content(R"({"text":"recovered"})", "application/json");
                    }
                    break;
                case Mode::Malformed:
                    res.set_content("{not json at all", "application/json");
                    break;
                case Mode::WithLogprobs:
                    res.set_content(
                        R"({"text":"tok one","tokens":["tok","one"],"token_logprobs":[-0.1,-0.2]})",
                        "application/json");
                    break;
                case Mode::WrongLengthLogprobs:
                    res.set_content(
                        R"({"text":"tok one","tokens":["tok","one"],"token_logprobs":[-0.1]})",
                        "application/json");
                    break;
                case Mode::ClientError:
                    res.status = 404;
                    break;
            }
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubServer() {
        server_.stop();
        thread_.join();
    }

    enum class Mode { Ok, FailTwiceThenOk, Malformed, WithLogprobs, WrongLengthLogprobs, ClientError };

    void set_mode(Mode m) {
        mode_ = m;
        requests_ = 0;
    }
    int requests() const { return requests_; }
    std::string last_body() const { return last_body_; }
    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<Mode> mode_{Mode::Ok};
    std::atomic<int> requests_{0};
    std::string last_body_;
};

HttpEndpointConfig config_for(const StubServer& server) {
    HttpEndpointConfig cfg;
    cfg.base_url = server.base_url();
    cfg.retries = 2;
    cfg.backoff_initial_ms = 10;
    return cfg;
}

GenerationRequest sample_request() {
    GenerationRequest req;
    req.prompt = "what is the dose";
    req.max_tokens = 16;
    return req;
}

}  // namespace

TEST_CASE("http_generate minimal success contract") {
    StubServer server;
    server.set_mode(StubServer::Mode::Ok);
    auto result = http_generate(config_for(server), sample_request());
    CHECK(result.text == "ok");
    CHECK_FALSE(result.token_logprobs.has_value());

    // wire format check
    auto body = nlohmann::json::parse(server.last_body());
    CHECK(body["prompt"] == "what is the dose");
    CHECK(body["system_prompt"] == kDefaultSystemPrompt);
    CHECK(body["max_tokens"] == 16);
}

TEST_CASE("http_generate retries 500s and then succeeds") {
    StubServer server;
    server.set_mode(StubServer::Mode::FailTwiceThenOk);
    auto result = http_generate(config_for(server), sample_request());
    CHECK(result.text == "recovered");
    CHECK(server.requests() == 3);
}

TEST_CASE("http_generate exhausts retries on persistent 500s") {
    StubServer server;
    server.set_mode(StubServer::Mode::FailTwiceThenOk);
    auto cfg = config_for(server);
    cfg.retries = 1;  // two attempts total, both 500
    CHECK_THROWS_AS(http_generate(cfg, sample_request()), NetworkError);
    CHECK(server.requests() == 2);
}

TEST_CASE("http_generate surfaces malformed bodies as parse errors") {
    StubServer server;
    server.set_mode(StubServer::Mode::Malformed);
    CHECK_THROWS_AS(http_generate(config_for(server), sample_request()), ResponseParseError);
}

TEST_CASE("http_generate accepts token logprobs when supplied") {
    StubServer server;
    server.set_mode(StubServer::Mode::WithLogprobs);
    auto result = http_generate(config_for(server), sample_request());
    REQUIRE(result.token_logprobs.has_value());
    CHECK(result.token_logprobs->size() == 2);
    CHECK(result.tokens == std::vector<std::string>{"tok", "one"});
}

TEST_CASE("http_generate rejects wrong-length logprobs") {
    StubServer server;
    server.set_mode(StubServer::Mode::WrongLengthLogprobs);
    CHECK_THROWS_AS(http_generate(config_for(server), sample_request()), ValidationError);
}

TEST_CASE("http_generate does not retry 4xx") {
    StubServer server;
    server.set_mode(StubServer::Mode::ClientError);
    try {
        http_generate(config_for(server), sample_request());
        FAIL("expected HttpStatusError");
    } catch (const HttpStatusError& e) {
        CHECK(e.status == 404);
    }
    CHECK(server.requests() == 1);
}

TEST_CASE("http_generate fails cleanly when nothing listens") {
    HttpEndpointConfig cfg;
    cfg.base_url = "http://127.0.0.1:1";  // nothing listens on port 1
    cfg.retries = 0;
    cfg.timeout_seconds = 1;
    CHECK_THROWS_AS(http_generate(cfg, sample_request()), NetworkError);
}

TEST_CASE("concurrent calls respect the in-flight cap without deadlock") {
    StubServer server;
    server.set_mode(StubServer::Mode::Ok);
    auto cfg = config_for(server);
    cfg.max_inflight = 2;
    HttpTarget target(cfg);
    std::vector<std::thread> threads;
    std::atomic<int> ok{0};
    for (int i = 0; i < 8; ++i)
        threads.emplace_back([&] {
            auto r = target.generate(sample_request());
            if (r.text == "ok") ++ok;
        });
    for (auto& t : threads) t.join();
    CHECK(ok == 8);
}
