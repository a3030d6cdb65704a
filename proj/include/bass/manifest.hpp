#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bass/backend.hpp"
#include "bass/embedding.hpp"
#include "bass/metrics.hpp"
#include "bass/sampler.hpp"

namespace bass {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "0.3.0";

struct AnchorRecord {
  int index = 1;  // 1 or 2
  std::string prompt;
  ImageRef image;
  std::string embedding_digest;
  std::optional<FeatureVector> text_feat;
  std::optional<FeatureVector> image_feat;
  std::vector<FeatureVector> components;
  std::vector<double> component_areas;
};

struct SelectionRecord {
  std::optional<int> id;
  std::optional<double> r_score;
  SelectionLevel level = SelectionLevel::none;
  std::vector<int> excluded_ids;
  std::optional<BalanceReport> balance;
};

struct RunStatus {
  bool complete = false;
  std::string stage = "init";
  std::string error;
};

// Wall-clock and scheduling details. Excluded from determinism comparisons.
struct ExecutionRecord {
  std::string started_at;
  std::string finished_at;
  double wall_ms = 0;
  int max_inflight = 1;
  long backend_calls = 0;
  long cache_hits = 0;
  long retries = 0;
};

struct RunManifest {
  int schema_version = kManifestSchemaVersion;
  std::string run_id;
  std::string tool_version{kToolVersion};
  std::string digest_algorithm{kDigestAlgorithm};
  PipelineConfig config;
  std::string prompt_a;
  std::string prompt_b;
  std::string templated_a;
  std::string templated_b;
  std::string backend_endpoint;
  BackendInfo backend_info;
  std::vector<AnchorRecord> anchors;
  std::vector<Candidate> candidates;
  std::optional<FilterTrace> coarse;
  std::optional<FilterTrace> fine;
  SelectionRecord selection;
  RunStatus status;
  ExecutionRecord execution;

  const Candidate* candidate(int id) const {
    for (const auto& c : candidates)
      if (c.id() == id) return &c;
    return nullptr;
  }
  Candidate* candidate(int id) {
    for (auto& c : candidates)
      if (c.id() == id) return &c;
    return nullptr;
  }
};

}  // namespace bass
