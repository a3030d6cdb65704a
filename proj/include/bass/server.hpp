#pragma once

#include <httplib.h>

#include <functional>
#include <memory>
#include <string>

#include "bass/backend.hpp"
#include "bass/errors.hpp"
#include "bass/wire.hpp"

namespace bass {

namespace detail {

using Handler = std::function<wire::json(const wire::json&)>;

inline int status_for(const std::exception& e) {
  if (auto* be = dynamic_cast<const BackendError*>(&e)) {
    if (be->code() >= 400 && be->code() < 600) return be->code();
    return be->transient() ? 503 : 400;
  }
  if (dynamic_cast<const FormatError*>(&e) || dynamic_cast<const InvalidArgument*>(&e) ||
      dynamic_cast<const ShapeError*>(&e) || dynamic_cast<const wire::json::exception*>(&e))
    return 400;
  return 500;
}

// Runs one request or each element of {"batch": [...]}; batch items fail
// individually and carry {code, message} in place of a result.
inline void handle(const httplib::Request& req, httplib::Response& res, const Handler& fn) {
  wire::json body;
  try {
    body = wire::json::parse(req.body);
  } catch (const std::exception& e) {
    res.status = 400;
    res.set_content(wire::error_json(400, std::string("invalid JSON: ") + e.what()).dump(), "application/json");
    return;
  }
  if (body.is_object() && body.contains("batch")) {
    if (!body["batch"].is_array()) {
      res.status = 400;
      res.set_content(wire::error_json(400, "'batch' must be an array").dump(), "application/json");
      return;
    }
    wire::json out = wire::json::array();
    for (const auto& item : body["batch"]) {
      try {
        out.push_back(fn(item));
      } catch (const std::exception& e) {
        out.push_back(wire::error_json(status_for(e), e.what()));
      }
    }
    res.set_content(wire::json{{"batch", out}}.dump(), "application/json");
    return;
  }
  try {
    res.set_content(fn(body).dump(), "application/json");
  } catch (const std::exception& e) {
    res.status = status_for(e);
    res.set_content(wire::error_json(res.status, e.what()).dump(), "application/json");
  }
}

}  // namespace detail

// Registers the /v1/* protocol endpoints for `backend` on `server`.
inline void mount_protocol(httplib::Server& server, std::shared_ptr<Backend> backend) {
  using wire::json;
  server.Get("/v1/info", [backend](const httplib::Request&, httplib::Response& res) {
    try {
      res.set_content(wire::info_json(backend->info()).dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = detail::status_for(e);
      res.set_content(wire::error_json(res.status, e.what()).dump(), "application/json");
    }
  });
  auto route = [&server](const std::string& path, detail::Handler fn) {
    server.Post(path, [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
      detail::handle(req, res, fn);
    });
  };
  route("/v1/encode", [backend](const json& j) {
    auto e = backend->encode_text(j.at("prompt").get<std::string>());
    return wire::embedding_json(e);
  });
  route("/v1/generate", [backend](const json& j) {
    auto e = wire::embedding_from_json(j.at("embedding"));
    auto png = backend->generate_image(e, j.at("seed").get<std::uint64_t>());
    return json{{"png", base64_encode(png)}};
  });
  route("/v1/features/image", [backend](const json& j) {
    return wire::feature_json(backend->image_features(base64_decode(j.at("png").get<std::string>())));
  });
  route("/v1/features/text", [backend](const json& j) {
    return wire::feature_json(backend->text_features(j.at("prompt").get<std::string>()));
  });
  route("/v1/segment", [backend](const json& j) {
    return wire::segment_json(backend->segment(base64_decode(j.at("png").get<std::string>())));
  });
}

}  // namespace bass
