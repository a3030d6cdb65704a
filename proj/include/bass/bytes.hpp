#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bass/errors.hpp"

namespace bass {

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

// Append-only little-endian byte writer.
class ByteWriter {
 public:
  void put_u32(std::uint32_t v) { put_raw(&v, sizeof v); }
  void put_u64(std::uint64_t v) { put_raw(&v, sizeof v); }
  void put_f32(float v) { put_raw(&v, sizeof v); }
  void put_f64(double v) { put_raw(&v, sizeof v); }
  void put_bytes(std::string_view s) { buf_.append(s); }
  void put_string(std::string_view s) {
    put_u32(static_cast<std::uint32_t>(s.size()));
    buf_.append(s);
  }
  void put_f32s(std::span<const float> v) {
    put_raw(v.data(), v.size_bytes());
  }

  const std::string& data() const& { return buf_; }
  std::string take() && { return std::move(buf_); }

 private:
  void put_raw(const void* p, std::size_t n) {
    buf_.append(static_cast<const char*>(p), n);
  }
  std::string buf_;
};

// Bounds-checked little-endian reader over a borrowed buffer.
class ByteReader {
 public:
  explicit ByteReader(std::string_view buf) : buf_(buf) {}

  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  float f32() { return get<float>(); }
  double f64() { return get<double>(); }

  std::string_view bytes(std::size_t n) {
    need(n);
    auto out = buf_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::string string() { return std::string(bytes(u32())); }

  std::vector<float> f32s(std::size_t n) {
    if (n > remaining() / sizeof(float)) throw FormatError("truncated float payload");
    std::vector<float> out(n);
    std::memcpy(out.data(), buf_.data() + pos_, n * sizeof(float));
    pos_ += n * sizeof(float);
    return out;
  }

  std::size_t remaining() const { return buf_.size() - pos_; }
  bool done() const { return pos_ == buf_.size(); }

 private:
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void need(std::size_t n) const {
    if (n > remaining()) throw FormatError("unexpected end of buffer");
  }

  std::string_view buf_;
  std::size_t pos_ = 0;
};

inline std::string f32_to_bytes(std::span<const float> v) {
  ByteWriter w;
  w.put_f32s(v);
  return std::move(w).take();
}

inline std::vector<float> f32_from_bytes(std::string_view bytes) {
  if (bytes.size() % sizeof(float) != 0) throw FormatError("float payload length is not a multiple of 4");
  ByteReader r(bytes);
  return r.f32s(bytes.size() / sizeof(float));
}

}  // namespace bass
