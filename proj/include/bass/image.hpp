#pragma once

#include <cstdint>
#include <string>

#include "bass/digest.hpp"

namespace bass {

// Content-addressed reference to generated image bytes.
struct ImageRef {
  Digest digest{};
  std::string media_type = "image/png";
  std::uint64_t byte_length = 0;

  std::string hex() const { return to_hex(digest); }

  static ImageRef of(const std::string& bytes, std::string media_type = "image/png") {
    return ImageRef{sha256(bytes), std::move(media_type), bytes.size()};
  }

  friend bool operator==(const ImageRef&, const ImageRef&) = default;
};

}  // namespace bass
