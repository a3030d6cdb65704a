#pragma once

#include <chrono>
#include <ctime>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bass/client.hpp"
#include "bass/embedding.hpp"
#include "bass/manifest.hpp"
#include "bass/metrics.hpp"
#include "bass/sampler.hpp"

namespace bass {

// Everything one run produced: the manifest plus the artifacts it references.
struct RunOutcome {
  RunManifest manifest;
  std::optional<PromptEmbedding> e1;
  std::optional<PromptEmbedding> e2;
  std::map<std::string, std::string> images;  // hex digest -> PNG bytes
};

inline std::string utc_timestamp(std::chrono::system_clock::time_point t = std::chrono::system_clock::now()) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline std::string new_run_id() {
  const std::time_t tt = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::random_device rd;
  std::ostringstream os;
  os << std::put_time(&tm, "%Y%m%d-%H%M%S") << '-' << std::hex << std::setw(8) << std::setfill('0') << rd();
  return os.str();
}

inline std::uint64_t candidate_seed(const PipelineConfig& cfg, int id) {
  return cfg.seed_per_candidate ? cfg.seed + 1 + static_cast<std::uint64_t>(id) : cfg.seed;
}

// Balance swap-sampling: encode both prompts, generate the two anchors and N
// column-swapped candidates, keep the text-balanced ones (coarse), then the
// image-balanced low-similarity ones (fine), and pick the candidate whose
// segmented components best match both anchors.
//
// Config and prompt errors throw. Failures after the run starts are recorded
// in manifest.status and the partial manifest is returned.
inline RunOutcome run_bass(const std::string& prompt_a, const std::string& prompt_b, const PipelineConfig& cfg,
                           BackendClient& client) {
  cfg.validate();
  if (prompt_a.empty() || prompt_b.empty()) throw InvalidArgument("prompts must be non-empty");

  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome out;
  RunManifest& m = out.manifest;
  m.run_id = new_run_id();
  m.config = cfg;
  m.prompt_a = prompt_a;
  m.prompt_b = prompt_b;
  m.templated_a = format_prompt(cfg.prompt_template, prompt_a);
  m.templated_b = format_prompt(cfg.prompt_template, prompt_b);
  m.backend_endpoint = client.handle().endpoint;
  m.execution.started_at = utc_timestamp();
  m.execution.max_inflight = client.handle().max_inflight;

  auto keep_image = [&](const ImageRef& ref) { out.images.emplace(ref.hex(), client.image_bytes(ref)); };

  try {
    m.status.stage = "encode";
    m.backend_info = client.info();
    PromptEmbedding e1 = client.encode_text(m.templated_a);
    PromptEmbedding e2 = client.encode_text(m.templated_b);
    detail::check_compatible(e1, e2);
    out.e1 = e1;
    out.e2 = e2;

    m.status.stage = "anchors";
    const std::vector<PromptEmbedding> anchor_embs{e1, e2};
    const std::vector<std::uint64_t> anchor_seeds{cfg.seed, cfg.seed};
    auto anchor_refs = BackendClient::collect(client.generate_images(anchor_embs, anchor_seeds));
    auto anchor_feats = BackendClient::collect(client.image_features(anchor_refs));
    for (int i = 0; i < 2; ++i) {
      AnchorRecord a;
      a.index = i + 1;
      a.prompt = i == 0 ? m.templated_a : m.templated_b;
      a.image = anchor_refs[i];
      a.embedding_digest = sha256_hex(serialize_embedding(anchor_embs[i]));
      a.text_feat = client.text_features(a.prompt);
      a.image_feat = anchor_feats[i];
      keep_image(a.image);
      m.anchors.push_back(std::move(a));
    }

    m.status.stage = "generate";
    auto swaps = generate_swap_set(e1.cols(), cfg.n, cfg.seed);
    std::vector<PromptEmbedding> mixed;
    std::vector<std::uint64_t> seeds;
    mixed.reserve(swaps.size());
    for (const auto& f : swaps) {
      mixed.push_back(swap_columns(e1, e2, f));
      seeds.push_back(candidate_seed(cfg, f.id));
    }
    auto refs = BackendClient::collect(client.generate_images(mixed, seeds));

    m.status.stage = "features";
    auto feats = BackendClient::collect(client.image_features(refs));
    const auto& tp1 = *m.anchors[0].text_feat;
    const auto& tp2 = *m.anchors[1].text_feat;
    const auto& ai1 = *m.anchors[0].image_feat;
    const auto& ai2 = *m.anchors[1].image_feat;
    for (std::size_t i = 0; i < swaps.size(); ++i) {
      Candidate c;
      c.swap = swaps[i];
      c.image = refs[i];
      c.scores = Scores::from_similarities(cosine(feats[i], tp1), cosine(feats[i], tp2), cosine(feats[i], ai1),
                                           cosine(feats[i], ai2));
      c.feat = std::move(feats[i]);
      keep_image(c.image);
      m.candidates.push_back(std::move(c));
    }

    m.status.stage = "filter";
    m.coarse = coarse_filter(m.candidates, cfg.theta);
    std::vector<Candidate> coarse_set;
    for (int id : m.coarse->kept_ids) coarse_set.push_back(*m.candidate(id));
    m.fine = fine_filter(coarse_set, cfg.alpha_bar, cfg.beta_bar, cfg.filter_mode);

    m.status.stage = "segment";
    auto anchor_segs = BackendClient::collect(client.segment_components(anchor_refs));
    for (int i = 0; i < 2; ++i) {
      m.anchors[i].components = anchor_segs[i].components;
      m.anchors[i].component_areas = anchor_segs[i].mask_areas;
    }
    auto load = [&](std::span<const int> ids) {
      std::vector<Candidate*> todo;
      for (int id : ids) {
        auto* c = m.candidate(id);
        if (!c->segmented) todo.push_back(c);
      }
      std::vector<ImageRef> todo_refs;
      for (auto* c : todo) todo_refs.push_back(c->image);
      auto segs = BackendClient::collect(client.segment_components(todo_refs));
      for (std::size_t i = 0; i < todo.size(); ++i) {
        todo[i]->components = std::move(segs[i].components);
        todo[i]->component_areas = std::move(segs[i].mask_areas);
        todo[i]->segmented = true;
      }
    };

    m.status.stage = "select";
    auto sel = select_with_fallback(m.candidates, *m.coarse, *m.fine, m.anchors[0].components,
                                    m.anchors[1].components, load);
    m.selection.id = sel.id;
    m.selection.r_score = sel.r_score;
    m.selection.level = sel.level;
    m.selection.excluded_ids = sel.excluded_ids;
    if (sel.id) {
      const auto& s = m.candidate(*sel.id)->scores;
      m.selection.balance = balance_from_similarities(s.sim_p1, s.sim_p2, s.sim_i1, s.sim_i2, cfg.image_average);
      m.status.stage = "done";
      m.status.complete = true;
    } else {
      m.status.error = "no candidate could be scored";
    }
  } catch (const std::exception& e) {
    m.status.complete = false;
    m.status.error = e.what();
  }

  const auto stats = client.stats();
  m.execution.backend_calls = stats.backend_calls;
  m.execution.cache_hits = stats.cache_hits;
  m.execution.retries = stats.retries;
  m.execution.finished_at = utc_timestamp();
  m.execution.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace bass
