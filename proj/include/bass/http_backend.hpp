#pragma once

#include <httplib.h>

#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "bass/backend.hpp"
#include "bass/client.hpp"
#include "bass/errors.hpp"
#include "bass/wire.hpp"

namespace bass {

// Backend speaking the JSON model protocol over HTTP.
class HttpBackend final : public Backend {
 public:
  HttpBackend(std::string endpoint, int timeout_ms) : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms) {
    while (!endpoint_.empty() && endpoint_.back() == '/') endpoint_.pop_back();
  }

  BackendInfo info() override {
    std::lock_guard lock(mu_);
    if (!info_) info_ = wire::info_from_json(get("/v1/info"));
    return *info_;
  }

  PromptEmbedding encode_text(const std::string& prompt) override {
    auto j = post("/v1/encode", {{"prompt", prompt}});
    auto e = wire::embedding_from_json(j, j.contains("encoder_id") ? std::string{} : info().encoder_id);
    return PromptEmbedding(e.rows(), e.cols(), {e.values().begin(), e.values().end()}, prompt, e.encoder_id());
  }

  std::string generate_image(const PromptEmbedding& e, std::uint64_t seed) override {
    auto j = post("/v1/generate", {{"embedding", wire::embedding_json(e)}, {"seed", seed}});
    return base64_decode(j.at("png").get<std::string>());
  }

  std::vector<float> image_features(std::string_view png) override {
    return wire::feature_from_json(post("/v1/features/image", {{"png", base64_encode(png)}}));
  }

  std::vector<float> text_features(const std::string& prompt) override {
    return wire::feature_from_json(post("/v1/features/text", {{"prompt", prompt}}));
  }

  std::vector<SegmentedComponent> segment(std::string_view png) override {
    return wire::segment_from_json(post("/v1/segment", {{"png", base64_encode(png)}}));
  }

  std::string identity() const override { return endpoint_; }

 private:
  httplib::Client connect() const {
    httplib::Client cli(endpoint_);
    const time_t sec = timeout_ms_ / 1000;
    const time_t usec = (timeout_ms_ % 1000) * 1000;
    cli.set_connection_timeout(sec, usec);
    cli.set_read_timeout(sec, usec);
    cli.set_write_timeout(sec, usec);
    return cli;
  }

  wire::json get(const std::string& path) const {
    auto cli = connect();
    return unwrap(path, cli.Get(path));
  }

  wire::json post(const std::string& path, const wire::json& body) const {
    auto cli = connect();
    return unwrap(path, cli.Post(path, body.dump(), "application/json"));
  }

  wire::json unwrap(const std::string& path, const httplib::Result& res) const {
    if (!res)
      throw BackendError(endpoint_ + path + ": " + httplib::to_string(res.error()), true);
    wire::json body;
    try {
      body = wire::json::parse(res->body);
    } catch (const wire::json::exception&) {
      throw BackendError(endpoint_ + path + ": response is not JSON (HTTP " + std::to_string(res->status) + ")",
                         res->status >= 500, res->status);
    }
    if (res->status < 200 || res->status >= 300) {
      const bool transient = res->status >= 500 || res->status == 429;
      throw BackendError(endpoint_ + path + ": " + body.value("message", std::string("HTTP error")), transient,
                         body.value("code", res->status));
    }
    return body;
  }

  std::string endpoint_;
  int timeout_ms_;
  std::mutex mu_;
  std::optional<BackendInfo> info_;
};

// "mock:<seed>" gives the in-process mock; anything else is an HTTP endpoint.
inline std::shared_ptr<Backend> make_backend(const BackendHandle& handle) {
  const std::string& ep = handle.endpoint;
  if (ep.rfind("mock:", 0) == 0) {
    try {
      std::size_t used = 0;
      auto seed = std::stoull(ep.substr(5), &used);
      if (used != ep.size() - 5) throw std::invalid_argument(ep);
      return std::make_shared<MockBackend>(seed);
    } catch (const std::logic_error&) {
      throw InvalidArgument("mock endpoint must look like mock:<seed>, got '" + ep + "'");
    }
  }
  if (ep.rfind("http://", 0) == 0 || ep.rfind("https://", 0) == 0)
    return std::make_shared<HttpBackend>(ep, handle.timeout_ms);
  throw InvalidArgument("backend must be an http(s) URL or mock:<seed>, got '" + ep + "'");
}

}  // namespace bass
