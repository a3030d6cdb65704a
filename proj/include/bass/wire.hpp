#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "bass/backend.hpp"
#include "bass/bytes.hpp"
#include "bass/digest.hpp"
#include "bass/embedding.hpp"
#include "bass/errors.hpp"

// JSON bodies of the HTTP model protocol. Float payloads travel as base64 of
// little-endian f32 so they survive the round trip bit-exactly.
namespace bass::wire {

using json = nlohmann::json;

inline std::string encode_floats(std::span<const float> v) { return base64_encode(f32_to_bytes(v)); }

inline std::vector<float> decode_floats(const json& j, const char* field = "data") {
  if (!j.contains(field) || !j[field].is_string())
    throw FormatError(std::string("missing base64 field '") + field + "'");
  return f32_from_bytes(base64_decode(j[field].get<std::string>()));
}

inline json feature_json(const std::vector<float>& v) {
  return json{{"d", v.size()}, {"data", encode_floats(v)}};
}

inline std::vector<float> feature_from_json(const json& j) {
  auto v = decode_floats(j);
  if (j.at("d").get<std::size_t>() != v.size()) throw FormatError("feature length does not match d");
  return v;
}

inline json embedding_json(const PromptEmbedding& e) {
  return json{{"h", e.rows()},
              {"w", e.cols()},
              {"encoder_id", e.encoder_id()},
              {"prompt", e.prompt_text()},
              {"data", encode_floats(e.values())}};
}

inline PromptEmbedding embedding_from_json(const json& j, const std::string& fallback_encoder = {}) {
  const auto h = j.at("h").get<std::size_t>();
  const auto w = j.at("w").get<std::size_t>();
  auto values = decode_floats(j);
  if (values.size() != h * w) throw FormatError("embedding payload does not match h*w");
  return PromptEmbedding(h, w, std::move(values), j.value("prompt", std::string{}),
                         j.value("encoder_id", fallback_encoder));
}

inline json info_json(const BackendInfo& i) {
  return json{{"encoder_id", i.encoder_id}, {"h", i.h}, {"w", i.w}, {"d", i.d}, {"models", i.models}};
}

inline BackendInfo info_from_json(const json& j) {
  BackendInfo i;
  i.encoder_id = j.at("encoder_id").get<std::string>();
  i.h = j.at("h").get<std::size_t>();
  i.w = j.at("w").get<std::size_t>();
  i.d = j.at("d").get<std::size_t>();
  if (j.contains("models")) {
    for (auto& [k, v] : j["models"].items())
      i.models[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  return i;
}

inline json segment_json(const std::vector<SegmentedComponent>& comps) {
  json arr = json::array();
  for (const auto& c : comps)
    arr.push_back({{"d", c.values.size()}, {"data", encode_floats(c.values)}, {"mask_area_px", c.mask_area_px}});
  return json{{"components", arr}};
}

inline std::vector<SegmentedComponent> segment_from_json(const json& j) {
  std::vector<SegmentedComponent> out;
  for (const auto& c : j.at("components"))
    out.push_back({feature_from_json(c), c.value("mask_area_px", 0.0)});
  return out;
}

inline json error_json(int code, const std::string& message) {
  return json{{"code", code}, {"message", message}};
}

}  // namespace bass::wire
