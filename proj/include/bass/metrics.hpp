#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bass/errors.hpp"

namespace bass {

enum class FeatureSource { text, image, component };

inline std::string_view to_string(FeatureSource s) {
  switch (s) {
    case FeatureSource::text: return "text";
    case FeatureSource::image: return "image";
    case FeatureSource::component: return "component";
  }
  return "?";
}

inline FeatureSource feature_source_from(std::string_view s) {
  if (s == "text") return FeatureSource::text;
  if (s == "image") return FeatureSource::image;
  if (s == "component") return FeatureSource::component;
  throw InvalidArgument("unknown feature source '" + std::string(s) + "'");
}

// Raw extractor output. Kept unnormalized so cached payloads stay bit-exact;
// normalization happens inside cosine().
class FeatureVector {
 public:
  FeatureVector(std::vector<float> values, FeatureSource source, std::string extractor_id = {})
      : values_(std::move(values)), source_(source), extractor_id_(std::move(extractor_id)) {
    if (values_.empty()) throw DegenerateFeatureError("feature vector has dimension 0");
    bool nonzero = false;
    for (float v : values_) {
      if (!std::isfinite(v)) throw DegenerateFeatureError("feature vector has a non-finite entry");
      nonzero = nonzero || v != 0.0f;
    }
    if (!nonzero) throw DegenerateFeatureError("feature vector is the zero vector");
  }

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const float> values() const noexcept { return values_; }
  FeatureSource source() const noexcept { return source_; }
  const std::string& extractor_id() const noexcept { return extractor_id_; }

  FeatureVector scaled(float c) const {
    std::vector<float> v(values_);
    for (auto& x : v) x *= c;
    return FeatureVector(std::move(v), source_, extractor_id_);
  }

  friend bool operator==(const FeatureVector& a, const FeatureVector& b) {
    return a.values_ == b.values_ && a.source_ == b.source_ && a.extractor_id_ == b.extractor_id_;
  }

 private:
  std::vector<float> values_;
  FeatureSource source_;
  std::string extractor_id_;
};

// Cosine similarity, accumulated in double. The result is clamped to [-1, 1].
inline double cosine(const FeatureVector& a, const FeatureVector& b) {
  if (a.dim() != b.dim())
    throw ShapeError("feature dimensions differ: " + std::to_string(a.dim()) + " vs " +
                     std::to_string(b.dim()));
  auto x = a.values(), y = b.values();
  double dot = 0, nx = 0, ny = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += double(x[i]) * y[i];
    nx += double(x[i]) * x[i];
    ny += double(y[i]) * y[i];
  }
  return std::clamp(dot / (std::sqrt(nx) * std::sqrt(ny)), -1.0, 1.0);
}

// How the image-average similarity combines the two anchor similarities.
// `sum` averages them; `difference` is the alternative printed formula,
// retained only to replicate it exactly.
enum class ImageAverageForm { sum, difference };

struct BalanceReport {
  double text_balance = 0;
  double image_balance = 0;
  double text_avg_sim = 0;
  double image_avg_sim = 0;
};

inline BalanceReport balance_from_similarities(double sim_p1, double sim_p2, double sim_i1,
                                               double sim_i2,
                                               ImageAverageForm form = ImageAverageForm::sum) {
  BalanceReport r;
  r.text_balance = std::abs(sim_p1 - sim_p2);
  r.image_balance = std::abs(sim_i1 - sim_i2);
  r.text_avg_sim = (sim_p1 + sim_p2) / 2;
  r.image_avg_sim = form == ImageAverageForm::sum ? (sim_i1 + sim_i2) / 2 : (sim_i1 - sim_i2) / 2;
  return r;
}

inline BalanceReport balance_report(const FeatureVector& cand, const FeatureVector& p1,
                                    const FeatureVector& p2, const FeatureVector& i1,
                                    const FeatureVector& i2,
                                    ImageAverageForm form = ImageAverageForm::sum) {
  return balance_from_similarities(cosine(cand, p1), cosine(cand, p2), cosine(cand, i1),
                                   cosine(cand, i2), form);
}

}  // namespace bass
