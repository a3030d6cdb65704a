#pragma once

#include <zlib.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bass/errors.hpp"

// Minimal PNG writer/reader: 8-bit grayscale images plus arbitrary extra
// chunks. Enough for the mock generator to emit real, viewable PNG files.
namespace bass::png {

inline constexpr std::string_view kSignature{"\x89PNG\r\n\x1a\n", 8};

namespace detail {

inline void put_be32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v >> 24));
  out.push_back(static_cast<char>(v >> 16));
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v));
}

inline std::uint32_t get_be32(std::string_view s, std::size_t pos) {
  auto b = [&](std::size_t i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(s[pos + i])); };
  return b(0) << 24 | b(1) << 16 | b(2) << 8 | b(3);
}

inline void put_chunk(std::string& out, std::string_view type, std::string_view data) {
  put_be32(out, static_cast<std::uint32_t>(data.size()));
  std::string body(type);
  body.append(data);
  out.append(body);
  auto crc = crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
  put_be32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace detail

struct Chunk {
  std::string type;
  std::string data;
};

inline std::string encode_gray(std::uint32_t width, std::uint32_t height,
                               const std::vector<std::uint8_t>& pixels,
                               const std::vector<Chunk>& extra = {}) {
  if (pixels.size() != std::size_t{width} * height) throw InvalidArgument("pixel buffer size mismatch");
  std::string out(kSignature);

  std::string ihdr;
  detail::put_be32(ihdr, width);
  detail::put_be32(ihdr, height);
  ihdr += std::string("\x08\x00\x00\x00\x00", 5);  // depth 8, grayscale, deflate, no filter, no interlace
  detail::put_chunk(out, "IHDR", ihdr);
  for (const auto& c : extra) detail::put_chunk(out, c.type, c.data);

  std::string raw;
  raw.reserve((width + 1) * height);
  for (std::uint32_t y = 0; y < height; ++y) {
    raw.push_back('\0');  // filter: none
    raw.append(reinterpret_cast<const char*>(pixels.data() + std::size_t{y} * width), width);
  }
  uLongf len = compressBound(static_cast<uLong>(raw.size()));
  std::string idat(len, '\0');
  if (compress2(reinterpret_cast<Bytef*>(idat.data()), &len, reinterpret_cast<const Bytef*>(raw.data()),
                static_cast<uLong>(raw.size()), 9) != Z_OK)
    throw Error("zlib compression failed");
  idat.resize(len);
  detail::put_chunk(out, "IDAT", idat);
  detail::put_chunk(out, "IEND", "");
  return out;
}

// Walks the chunk list, verifying every CRC.
inline std::vector<Chunk> read_chunks(std::string_view bytes) {
  if (bytes.substr(0, kSignature.size()) != kSignature) throw FormatError("not a PNG file");
  std::vector<Chunk> chunks;
  std::size_t pos = kSignature.size();
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 12) throw FormatError("truncated PNG chunk");
    const std::uint32_t len = detail::get_be32(bytes, pos);
    if (len > bytes.size() - pos - 12) throw FormatError("PNG chunk overruns file");
    auto body = bytes.substr(pos + 4, 4 + len);
    auto crc = crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
    if (static_cast<std::uint32_t>(crc) != detail::get_be32(bytes, pos + 8 + len))
      throw FormatError("PNG chunk CRC mismatch");
    chunks.push_back(Chunk{std::string(body.substr(0, 4)), std::string(body.substr(4))});
    pos += 12 + len;
    if (chunks.back().type == "IEND") break;
  }
  if (chunks.empty() || chunks.front().type != "IHDR") throw FormatError("PNG is missing IHDR");
  return chunks;
}

inline std::optional<std::string> find_chunk(std::string_view bytes, std::string_view type) {
  for (auto& c : read_chunks(bytes))
    if (c.type == type) return std::move(c.data);
  return std::nullopt;
}

inline std::pair<std::uint32_t, std::uint32_t> dimensions(std::string_view bytes) {
  auto chunks = read_chunks(bytes);
  const auto& ihdr = chunks.front().data;
  if (ihdr.size() < 8) throw FormatError("short IHDR");
  return {detail::get_be32(ihdr, 0), detail::get_be32(ihdr, 4)};
}

}  // namespace bass::png
