#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "bass/bytes.hpp"
#include "bass/errors.hpp"
#include "bass/rng.hpp"

namespace bass {

// Text-encoder output for one prompt: an h x w matrix, rows are token slots
// and columns are embedding channels. Stored row-major as 32-bit floats.
class PromptEmbedding {
 public:
  PromptEmbedding(std::size_t h, std::size_t w, std::vector<float> values,
                  std::string prompt_text, std::string encoder_id)
      : h_(h), w_(w), values_(std::move(values)),
        prompt_text_(std::move(prompt_text)), encoder_id_(std::move(encoder_id)) {
    if (h_ == 0 || w_ == 0) throw ShapeError("embedding dimensions must be positive");
    if (values_.size() != h_ * w_)
      throw ShapeError("embedding has " + std::to_string(values_.size()) +
                       " entries, expected " + std::to_string(h_ * w_));
    for (float v : values_)
      if (!std::isfinite(v)) throw InvalidArgument("embedding contains a non-finite entry");
  }

  std::size_t rows() const noexcept { return h_; }
  std::size_t cols() const noexcept { return w_; }
  float at(std::size_t r, std::size_t c) const { return values_[r * w_ + c]; }
  std::span<const float> values() const noexcept { return values_; }
  const std::string& prompt_text() const noexcept { return prompt_text_; }
  const std::string& encoder_id() const noexcept { return encoder_id_; }

  // Set on embeddings produced by mixing two prompts.
  const std::optional<std::pair<std::string, std::string>>& parents() const noexcept {
    return parents_;
  }
  std::optional<int> swap_id() const noexcept { return swap_id_; }

  PromptEmbedding with_lineage(std::string a, std::string b, std::optional<int> swap_id) const {
    PromptEmbedding out = *this;
    out.parents_ = std::make_pair(std::move(a), std::move(b));
    out.swap_id_ = swap_id;
    return out;
  }

  friend bool operator==(const PromptEmbedding& a, const PromptEmbedding& b) {
    return a.h_ == b.h_ && a.w_ == b.w_ && a.values_ == b.values_ &&
           a.prompt_text_ == b.prompt_text_ && a.encoder_id_ == b.encoder_id_;
  }

 private:
  std::size_t h_;
  std::size_t w_;
  std::vector<float> values_;
  std::string prompt_text_;
  std::string encoder_id_;
  std::optional<std::pair<std::string, std::string>> parents_;
  std::optional<int> swap_id_;
};

// Binary column selector: bit j = 1 takes column j from the first embedding.
struct SwapVector {
  std::vector<std::uint8_t> bits;
  int id = 0;

  std::size_t size() const noexcept { return bits.size(); }

  std::size_t ones() const noexcept {
    std::size_t n = 0;
    for (auto b : bits) n += b;
    return n;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) s.push_back(b ? '1' : '0');
    return s;
  }

  static SwapVector parse(std::string_view s, int id = 0) {
    SwapVector f{{}, id};
    f.bits.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1') throw FormatError("swap vector must contain only 0/1");
      f.bits.push_back(c == '1');
    }
    return f;
  }

  friend bool operator==(const SwapVector&, const SwapVector&) = default;
};

inline SwapVector complement(const SwapVector& f) {
  SwapVector out{f.bits, f.id};
  for (auto& b : out.bits) b = b ? 0 : 1;
  return out;
}

namespace detail {

inline void check_compatible(const PromptEmbedding& e1, const PromptEmbedding& e2) {
  if (e1.rows() != e2.rows() || e1.cols() != e2.cols())
    throw ShapeError("embedding shapes differ: " + std::to_string(e1.rows()) + "x" +
                     std::to_string(e1.cols()) + " vs " + std::to_string(e2.rows()) + "x" +
                     std::to_string(e2.cols()));
  if (e1.encoder_id() != e2.encoder_id())
    throw IncompatibleEncoderError("embeddings come from different encoders: '" +
                                   e1.encoder_id() + "' vs '" + e2.encoder_id() + "'");
}

inline void check_mask(std::span<const std::uint8_t> mask, std::size_t expected, const char* what) {
  if (mask.size() != expected)
    throw ShapeError(std::string(what) + " has length " + std::to_string(mask.size()) +
                     ", expected " + std::to_string(expected));
  for (auto b : mask)
    if (b > 1) throw InvalidArgument(std::string(what) + " entries must be 0 or 1");
}

inline std::string mixed_label(const PromptEmbedding& e1, const PromptEmbedding& e2) {
  return e1.prompt_text() + " | " + e2.prompt_text();
}

}  // namespace detail

// E1 diag(f) + E2 diag(1 - f). Columns are copied, never recomputed.
inline PromptEmbedding swap_columns(const PromptEmbedding& e1, const PromptEmbedding& e2,
                                    const SwapVector& f) {
  detail::check_compatible(e1, e2);
  detail::check_mask(f.bits, e1.cols(), "swap vector");
  const std::size_t h = e1.rows(), w = e1.cols();
  std::vector<float> out(h * w);
  auto a = e1.values(), b = e2.values();
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) out[r * w + c] = f.bits[c] ? a[r * w + c] : b[r * w + c];
  return PromptEmbedding(h, w, std::move(out), detail::mixed_label(e1, e2), e1.encoder_id())
      .with_lineage(e1.prompt_text(), e2.prompt_text(), f.id);
}

struct ColumnSwap {
  SwapVector f;
};

// lambda * E1 + (1 - lambda) * E2.
struct LinearInterpolation {
  double lambda = 0.5;
};

// Row r comes from E1 where rows[r] = 1.
struct RowSwap {
  std::vector<std::uint8_t> rows;
};

using MixStrategy = std::variant<ColumnSwap, LinearInterpolation, RowSwap>;

inline PromptEmbedding mix(const PromptEmbedding& e1, const PromptEmbedding& e2,
                           const MixStrategy& strategy) {
  detail::check_compatible(e1, e2);
  const std::size_t h = e1.rows(), w = e1.cols();
  auto a = e1.values(), b = e2.values();

  if (auto* cs = std::get_if<ColumnSwap>(&strategy)) return swap_columns(e1, e2, cs->f);

  std::vector<float> out(h * w);
  if (auto* li = std::get_if<LinearInterpolation>(&strategy)) {
    if (!(li->lambda >= 0.0 && li->lambda <= 1.0))
      throw InvalidArgument("interpolation weight must lie in [0, 1]");
    const double lam = li->lambda;
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = static_cast<float>(lam * a[i] + (1.0 - lam) * b[i]);
  } else {
    const auto& rs = std::get<RowSwap>(strategy);
    detail::check_mask(rs.rows, h, "row mask");
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t c = 0; c < w; ++c) out[r * w + c] = rs.rows[r] ? a[r * w + c] : b[r * w + c];
  }
  return PromptEmbedding(h, w, std::move(out), detail::mixed_label(e1, e2), e1.encoder_id())
      .with_lineage(e1.prompt_text(), e2.prompt_text(), std::nullopt);
}

// Draws n distinct swap vectors of length w with Bernoulli(0.5) bits.
// All-zero and all-one vectors reproduce an input prompt and are redrawn.
inline std::vector<SwapVector> generate_swap_set(std::size_t w, std::size_t n, std::uint64_t seed) {
  if (w < 2) throw InvalidArgument("swap vectors need at least 2 columns");
  if (n < 1) throw InvalidArgument("swap set size must be at least 1");
  if (w < 64) {
    const std::uint64_t admissible = (std::uint64_t{1} << w) - 2;
    if (n > admissible)
      throw InfeasibleCountError("cannot draw " + std::to_string(n) + " distinct swap vectors of width " +
                                 std::to_string(w) + " (only " + std::to_string(admissible) +
                                 " admissible)");
  }

  SplitMix64 rng(seed);
  std::set<std::vector<std::uint8_t>> seen;
  std::vector<SwapVector> out;
  out.reserve(n);
  while (out.size() < n) {
    std::vector<std::uint8_t> bits(w);
    std::size_t ones = 0;
    for (auto& b : bits) {
      b = rng.bit();
      ones += b;
    }
    if (ones == 0 || ones == w) continue;
    if (!seen.insert(bits).second) continue;
    out.push_back(SwapVector{std::move(bits), static_cast<int>(out.size())});
  }
  return out;
}

// ---- BASSEMB1 serialization ------------------------------------------------
//
//   "BASSEMB1" | h:u32 | w:u32 | encoder_id_len:u32 encoder_id | prompt_len:u32 prompt
//   | h*w f32, row-major, little-endian

inline constexpr std::string_view kEmbeddingMagic = "BASSEMB1";

inline void write_embedding(ByteWriter& out, const PromptEmbedding& e) {
  out.put_bytes(kEmbeddingMagic);
  out.put_u32(static_cast<std::uint32_t>(e.rows()));
  out.put_u32(static_cast<std::uint32_t>(e.cols()));
  out.put_string(e.encoder_id());
  out.put_string(e.prompt_text());
  out.put_f32s(e.values());
}

inline std::string serialize_embedding(const PromptEmbedding& e) {
  ByteWriter w;
  write_embedding(w, e);
  return std::move(w).take();
}

inline PromptEmbedding read_embedding(ByteReader& in) {
  if (in.bytes(kEmbeddingMagic.size()) != kEmbeddingMagic) throw FormatError("bad embedding magic");
  const std::size_t h = in.u32(), w = in.u32();
  std::string encoder = in.string();
  std::string prompt = in.string();
  if (h == 0 || w == 0 || h > (1u << 20) / w) throw FormatError("implausible embedding shape");
  auto values = in.f32s(h * w);
  return PromptEmbedding(h, w, std::move(values), std::move(prompt), std::move(encoder));
}

inline PromptEmbedding deserialize_embedding(std::string_view bytes) {
  ByteReader r(bytes);
  auto e = read_embedding(r);
  if (!r.done()) throw FormatError("trailing bytes after embedding");
  return e;
}

}  // namespace bass
