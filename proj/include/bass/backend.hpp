#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bass/bytes.hpp"
#include "bass/digest.hpp"
#include "bass/embedding.hpp"
#include "bass/errors.hpp"
#include "bass/png.hpp"
#include "bass/rng.hpp"

namespace bass {

struct BackendInfo {
  std::string encoder_id;
  std::size_t h = 0;
  std::size_t w = 0;
  std::size_t d = 0;
  std::map<std::string, std::string> models;
};

struct SegmentedComponent {
  std::vector<float> values;
  double mask_area_px = 0;
};

// Transport-level model interface: encoder, generator, feature extractor and
// segmenter. Implementations must be safe to call from several threads.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual BackendInfo info() = 0;
  virtual PromptEmbedding encode_text(const std::string& prompt) = 0;
  // Returns PNG bytes. Deterministic in (embedding, seed).
  virtual std::string generate_image(const PromptEmbedding& e, std::uint64_t seed) = 0;
  virtual std::vector<float> image_features(std::string_view png) = 0;
  virtual std::vector<float> text_features(const std::string& prompt) = 0;
  virtual std::vector<SegmentedComponent> segment(std::string_view png) = 0;

  // Stable name for cache namespacing, e.g. "mock:7" or the endpoint URL.
  virtual std::string identity() const = 0;
};

// In-process reference backend. Its construction is fixed so that every test
// and every stored fixture is reproducible:
//   encoder   8x16 matrix, entries uniform on [-1,1) from SplitMix64 seeded
//             by digest64(prompt, mock seed)
//   generator PNG whose private "bsGv" chunk carries the column means g of the
//             embedding (16 f32) and the generation seed (u64)
//   image     normalize(P g + 0.05 eta), P fixed 32x16, eta per-image noise
//             seeded by the PNG digest
//   text      normalize(Q g_text), Q = P + 0.25 R with R a second fixed matrix
//   segment   the four contiguous quarters of g, each projected by P
class MockBackend final : public Backend {
 public:
  static constexpr std::size_t kRows = 8;
  static constexpr std::size_t kCols = 16;
  static constexpr std::size_t kDim = 32;
  static constexpr std::size_t kImageSide = 16;
  static constexpr float kNoise = 0.05f;
  static constexpr float kTextMix = 0.25f;
  static constexpr std::string_view kChunk = "bsGv";

  explicit MockBackend(std::uint64_t seed = 0) : seed_(seed) {
    project_ = matrix("P");
    auto r = matrix("R");
    text_project_.resize(project_.size());
    for (std::size_t i = 0; i < project_.size(); ++i) text_project_[i] = project_[i] + kTextMix * r[i];
  }

  std::uint64_t seed() const noexcept { return seed_; }

  std::string encoder_id() const { return "mock-encoder-v1:" + std::to_string(seed_); }

  BackendInfo info() override {
    return BackendInfo{encoder_id(), kRows, kCols, kDim,
                       {{"encoder", "mock-encoder-v1"},
                        {"generator", "mock-generator-v1"},
                        {"features", "mock-projection-v1"},
                        {"segmenter", "mock-quarters-v1"}}};
  }

  PromptEmbedding encode_text(const std::string& prompt) override {
    if (prompt.empty()) throw BackendError("empty prompt", false, 400);
    ByteWriter key;
    key.put_bytes("mock-encoder");
    key.put_string(prompt);
    key.put_u64(seed_);
    SplitMix64 rng(digest64(key.data()));
    std::vector<float> values(kRows * kCols);
    for (auto& v : values) v = rng.symmetric_unit();
    return PromptEmbedding(kRows, kCols, std::move(values), prompt, encoder_id());
  }

  std::string generate_image(const PromptEmbedding& e, std::uint64_t seed) override {
    if (e.rows() != kRows || e.cols() != kCols) throw BackendError("embedding shape not supported by mock", false, 400);
    std::vector<float> g(kCols);
    for (std::size_t c = 0; c < kCols; ++c) {
      double s = 0;
      for (std::size_t r = 0; r < kRows; ++r) s += e.at(r, c);
      g[c] = static_cast<float>(s / kRows);
    }
    ByteWriter payload;
    payload.put_f32s(g);
    payload.put_u64(seed);

    // Column c of the picture is a gray bar of intensity 128 + 127 g_c.
    std::vector<std::uint8_t> px(kImageSide * kImageSide);
    for (std::size_t y = 0; y < kImageSide; ++y)
      for (std::size_t x = 0; x < kImageSide; ++x) {
        const double v = 128.0 + 127.0 * std::clamp<double>(g[x % kCols], -1.0, 1.0);
        px[y * kImageSide + x] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
      }
    return png::encode_gray(kImageSide, kImageSide, px, {{std::string(kChunk), payload.data()}});
  }

  std::vector<float> image_features(std::string_view png_bytes) override {
    auto g = decode_mean(png_bytes);
    auto f = project(project_, g);
    SplitMix64 rng(digest64(png_bytes));
    for (auto& v : f) v += kNoise * rng.symmetric_unit();
    return normalized(f);
  }

  std::vector<float> text_features(const std::string& prompt) override {
    auto e = encode_text(prompt);
    std::vector<float> g(kCols);
    for (std::size_t c = 0; c < kCols; ++c) {
      double s = 0;
      for (std::size_t r = 0; r < kRows; ++r) s += e.at(r, c);
      g[c] = static_cast<float>(s / kRows);
    }
    return normalized(project(text_project_, g));
  }

  std::vector<SegmentedComponent> segment(std::string_view png_bytes) override {
    auto g = decode_mean(png_bytes);
    constexpr std::size_t kParts = 4, kWidth = kCols / kParts;
    constexpr double kArea = double(kImageSide * kImageSide) / kParts;
    std::vector<SegmentedComponent> out;
    for (std::size_t q = 0; q < kParts; ++q) {
      std::vector<float> part(kCols, 0.0f);
      for (std::size_t c = q * kWidth; c < (q + 1) * kWidth; ++c) part[c] = g[c];
      auto f = project(project_, part);
      bool nonzero = false;
      for (float v : f) nonzero = nonzero || v != 0.0f;
      if (nonzero) out.push_back({std::move(f), kArea});
    }
    return out;
  }

  std::string identity() const override { return "mock:" + std::to_string(seed_); }

 private:
  std::vector<float> matrix(std::string_view tag) const {
    ByteWriter key;
    key.put_bytes("mock-projection");
    key.put_string(tag);
    key.put_u64(seed_);
    SplitMix64 rng(digest64(key.data()));
    std::vector<float> m(kDim * kCols);
    for (auto& v : m) v = rng.symmetric_unit();
    return m;
  }

  static std::vector<float> project(const std::vector<float>& m, const std::vector<float>& g) {
    std::vector<float> out(kDim);
    for (std::size_t i = 0; i < kDim; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < kCols; ++j) s += double(m[i * kCols + j]) * g[j];
      out[i] = static_cast<float>(s);
    }
    return out;
  }

  static std::vector<float> normalized(std::vector<float> v) {
    double n = 0;
    for (float x : v) n += double(x) * x;
    n = std::sqrt(n);
    if (n == 0) throw BackendError("degenerate mock feature", false, 500);
    for (auto& x : v) x = static_cast<float>(x / n);
    return v;
  }

  static std::vector<float> decode_mean(std::string_view png_bytes) {
    std::optional<std::string> chunk;
    try {
      chunk = png::find_chunk(png_bytes, kChunk);
    } catch (const FormatError& e) {
      throw BackendError(std::string("invalid image: ") + e.what(), false, 400);
    }
    if (!chunk || chunk->size() != kCols * sizeof(float) + sizeof(std::uint64_t))
      throw BackendError("image was not produced by the mock generator", false, 400);
    ByteReader r(*chunk);
    return r.f32s(kCols);
  }

  std::uint64_t seed_;
  std::vector<float> project_;
  std::vector<float> text_project_;
};

// Forwards to another backend and counts calls per operation. Test helper.
class CountingBackend final : public Backend {
 public:
  explicit CountingBackend(std::shared_ptr<Backend> inner) : inner_(std::move(inner)) {}

  BackendInfo info() override { ++info_calls; return inner_->info(); }
  PromptEmbedding encode_text(const std::string& p) override { ++encode_calls; return inner_->encode_text(p); }
  std::string generate_image(const PromptEmbedding& e, std::uint64_t s) override {
    ++generate_calls;
    return inner_->generate_image(e, s);
  }
  std::vector<float> image_features(std::string_view png) override {
    ++image_feature_calls;
    return inner_->image_features(png);
  }
  std::vector<float> text_features(const std::string& p) override {
    ++text_feature_calls;
    return inner_->text_features(p);
  }
  std::vector<SegmentedComponent> segment(std::string_view png) override {
    ++segment_calls;
    return inner_->segment(png);
  }
  std::string identity() const override { return inner_->identity(); }

  long total() const {
    return info_calls + encode_calls + generate_calls + image_feature_calls + text_feature_calls +
           segment_calls;
  }

  std::atomic<long> info_calls{0}, encode_calls{0}, generate_calls{0}, image_feature_calls{0},
      text_feature_calls{0}, segment_calls{0};

 private:
  std::shared_ptr<Backend> inner_;
};

}  // namespace bass
