#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <semaphore>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "bass/backend.hpp"
#include "bass/bytes.hpp"
#include "bass/digest.hpp"
#include "bass/embedding.hpp"
#include "bass/errors.hpp"
#include "bass/image.hpp"
#include "bass/metrics.hpp"

namespace bass {

struct RetryPolicy {
  int attempts = 3;
  int backoff_ms = 100;  // doubled after every failed attempt
};

// Where and how to reach the models. Endpoint is an http(s) URL or "mock:<seed>".
struct BackendHandle {
  std::string endpoint = "mock:0";
  int timeout_ms = 120000;
  int max_inflight = 4;
  RetryPolicy retry;

  void validate() const {
    if (max_inflight < 1) throw InvalidArgument("max_inflight must be at least 1");
    if (retry.attempts < 1) throw InvalidArgument("retry attempts must be at least 1");
    if (retry.backoff_ms < 0) throw InvalidArgument("retry backoff must be >= 0");
    if (timeout_ms < 1) throw InvalidArgument("timeout must be positive");
  }
};

// Result of one item in a batch: a value, or the error it failed with.
template <typename T>
struct Outcome {
  std::optional<T> value;
  std::exception_ptr error;

  bool ok() const { return value.has_value(); }
};

struct Segmentation {
  std::vector<FeatureVector> components;
  std::vector<double> mask_areas;
  std::size_t dropped = 0;  // zero or non-finite vectors discarded
};

// Content-addressed request cache: an in-memory map, optionally backed by a
// directory. Disk entries are written to a temporary name and renamed.
class ResponseCache {
 public:
  explicit ResponseCache(std::optional<std::filesystem::path> dir = std::nullopt) : dir_(std::move(dir)) {
    if (dir_) std::filesystem::create_directories(*dir_);
  }

  std::optional<std::string> get(const std::string& key) {
    {
      std::lock_guard lock(mu_);
      if (auto it = mem_.find(key); it != mem_.end()) return it->second;
    }
    if (!dir_) return std::nullopt;
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string bytes = ss.str();
    std::lock_guard lock(mu_);
    mem_.emplace(key, bytes);
    return bytes;
  }

  void put(const std::string& key, const std::string& value) {
    {
      std::lock_guard lock(mu_);
      mem_[key] = value;
    }
    if (!dir_) return;
    auto final_path = path_for(key);
    std::filesystem::create_directories(final_path.parent_path());
    auto tmp = final_path;
    tmp += ".tmp-" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "-" +
           std::to_string(counter_.fetch_add(1));
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out.write(value.data(), static_cast<std::streamsize>(value.size()));
      if (!out) throw Error("failed to write cache entry " + tmp.string());
    }
    std::filesystem::rename(tmp, final_path);
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return mem_.size();
  }

 private:
  std::filesystem::path path_for(const std::string& key) const {
    auto hex = sha256_hex(key);
    return *dir_ / hex.substr(0, 2) / hex;
  }

  std::optional<std::filesystem::path> dir_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::string> mem_;
  std::atomic<std::uint64_t> counter_{0};
};

struct ClientStats {
  long backend_calls = 0;
  long cache_hits = 0;
  long retries = 0;
};

// Caching, retrying, concurrency-bounded front end over a Backend.
// Batch calls return results in request order regardless of completion order.
class BackendClient {
 public:
  BackendClient(std::shared_ptr<Backend> backend, BackendHandle handle,
                std::optional<std::filesystem::path> cache_dir = std::nullopt)
      : backend_(std::move(backend)), handle_(std::move(handle)), cache_(std::move(cache_dir)),
        inflight_(handle_.max_inflight) {
    handle_.validate();
  }

  const BackendHandle& handle() const noexcept { return handle_; }
  Backend& backend() noexcept { return *backend_; }

  ClientStats stats() const {
    return ClientStats{backend_calls_.load(), cache_hits_.load(), retries_.load()};
  }

  BackendInfo info() {
    std::lock_guard lock(info_mu_);
    if (!info_) info_ = call([&] { return backend_->info(); });
    return *info_;
  }

  PromptEmbedding encode_text(const std::string& prompt) {
    if (prompt.empty()) throw InvalidArgument("prompt must be non-empty");
    auto bytes = cached(key("encode", prompt), [&] { return serialize_embedding(backend_->encode_text(prompt)); });
    return deserialize_embedding(bytes);
  }

  ImageRef generate_image(const PromptEmbedding& e, std::uint64_t seed) {
    ByteWriter req;
    req.put_u32(static_cast<std::uint32_t>(e.rows()));
    req.put_u32(static_cast<std::uint32_t>(e.cols()));
    req.put_string(e.encoder_id());
    req.put_f32s(e.values());
    req.put_u64(seed);
    auto bytes = cached(key("generate", req.data()), [&] { return backend_->generate_image(e, seed); });
    auto ref = ImageRef::of(bytes);
    cache_.put(image_key(ref.digest), bytes);
    return ref;
  }

  // Bytes of an image previously produced through this client (or its cache).
  std::string image_bytes(const ImageRef& ref) {
    auto bytes = cache_.get(image_key(ref.digest));
    if (!bytes) throw Error("image " + ref.hex() + " is not in the cache");
    if (sha256(*bytes) != ref.digest) throw Error("cached image " + ref.hex() + " failed digest check");
    return *bytes;
  }

  FeatureVector image_features(const ImageRef& ref) {
    auto bytes = cached(key("image_features", to_hex(ref.digest)),
                        [&] { return f32_to_bytes(backend_->image_features(image_bytes(ref))); });
    return FeatureVector(f32_from_bytes(bytes), FeatureSource::image, extractor_id());
  }

  FeatureVector text_features(const std::string& prompt) {
    auto bytes = cached(key("text_features", prompt),
                        [&] { return f32_to_bytes(backend_->text_features(prompt)); });
    return FeatureVector(f32_from_bytes(bytes), FeatureSource::text, extractor_id());
  }

  Segmentation segment_components(const ImageRef& ref) {
    auto bytes = cached(key("segment", to_hex(ref.digest)), [&] {
      ByteWriter w;
      auto comps = backend_->segment(image_bytes(ref));
      w.put_u32(static_cast<std::uint32_t>(comps.size()));
      for (const auto& c : comps) {
        w.put_u32(static_cast<std::uint32_t>(c.values.size()));
        w.put_f32s(c.values);
        w.put_f64(c.mask_area_px);
      }
      return std::move(w).take();
    });
    ByteReader r(bytes);
    Segmentation seg;
    const auto count = r.u32();
    for (std::uint32_t i = 0; i < count; ++i) {
      auto values = r.f32s(r.u32());
      const double area = r.f64();
      try {
        seg.components.emplace_back(std::move(values), FeatureSource::component, extractor_id());
        seg.mask_areas.push_back(area);
      } catch (const DegenerateFeatureError&) {
        ++seg.dropped;
      }
    }
    return seg;
  }

  // Runs fn(i) for i in [0, n) on up to max_inflight workers. Each item
  // fails independently; retries already happen inside the per-item calls.
  template <typename T, typename Fn>
  std::vector<Outcome<T>> batch(std::size_t n, Fn fn) {
    std::vector<Outcome<T>> out(n);
    auto work = [&](std::size_t i) {
      try {
        out[i].value.emplace(fn(i));
      } catch (...) {
        out[i].error = std::current_exception();
      }
    };
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(handle_.max_inflight), n);
    if (workers <= 1) {
      for (std::size_t i = 0; i < n; ++i) work(i);
      return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) work(i);
      });
    pool.clear();
    return out;
  }

  std::vector<Outcome<ImageRef>> generate_images(std::span<const PromptEmbedding> embeddings,
                                                 std::span<const std::uint64_t> seeds) {
    if (embeddings.size() != seeds.size()) throw InvalidArgument("one seed per embedding required");
    return batch<ImageRef>(embeddings.size(), [&](std::size_t i) { return generate_image(embeddings[i], seeds[i]); });
  }

  std::vector<Outcome<FeatureVector>> image_features(std::span<const ImageRef> refs) {
    return batch<FeatureVector>(refs.size(), [&](std::size_t i) { return image_features(refs[i]); });
  }

  std::vector<Outcome<Segmentation>> segment_components(std::span<const ImageRef> refs) {
    return batch<Segmentation>(refs.size(), [&](std::size_t i) { return segment_components(refs[i]); });
  }

  // Unwraps a batch, rethrowing the first failure in request order.
  template <typename T>
  static std::vector<T> collect(std::vector<Outcome<T>> outcomes) {
    std::vector<T> values;
    values.reserve(outcomes.size());
    for (auto& o : outcomes) {
      if (!o.ok()) std::rethrow_exception(o.error);
      values.push_back(std::move(*o.value));
    }
    return values;
  }

 private:
  std::string extractor_id() {
    auto i = info();
    auto it = i.models.find("features");
    return it != i.models.end() ? it->second : backend_->identity();
  }

  std::string key(std::string_view op, std::string_view payload) const {
    std::string k(op);
    k.push_back('\0');
    k += backend_->identity();
    k.push_back('\0');
    k += payload;
    return k;
  }

  static std::string image_key(const Digest& d) { return std::string("image\0", 6) + to_hex(d); }

  template <typename Fn>
  std::string cached(const std::string& k, Fn&& produce) {
    if (auto hit = cache_.get(k)) {
      ++cache_hits_;
      return *hit;
    }
    std::string value = call(produce);
    cache_.put(k, value);
    return value;
  }

  // One backend round trip with bounded concurrency and exponential backoff.
  template <typename Fn>
  auto call(Fn&& fn) -> decltype(fn()) {
    int delay = handle_.retry.backoff_ms;
    for (int attempt = 1;; ++attempt) {
      try {
        inflight_.acquire();
        struct Release {
          std::counting_semaphore<>& s;
          ~Release() { s.release(); }
        } release{inflight_};
        ++backend_calls_;
        return fn();
      } catch (const BackendError& e) {
        if (!e.transient() || attempt >= handle_.retry.attempts) throw;
      }
      ++retries_;
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
      delay *= 2;
    }
  }

  std::shared_ptr<Backend> backend_;
  BackendHandle handle_;
  ResponseCache cache_;
  std::counting_semaphore<> inflight_;
  std::mutex info_mu_;
  std::optional<BackendInfo> info_;
  std::atomic<long> backend_calls_{0};
  std::atomic<long> cache_hits_{0};
  std::atomic<long> retries_{0};
};

}  // namespace bass
