#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bass/bytes.hpp"
#include "bass/digest.hpp"
#include "bass/embedding.hpp"
#include "bass/errors.hpp"
#include "bass/manifest.hpp"
#include "bass/pipeline.hpp"

namespace bass {

namespace fs = std::filesystem;
using json = nlohmann::json;

// ---- manifest <-> JSON -----------------------------------------------------

namespace detail {

// +inf is written as the string "inf"; JSON has no infinity literal.
inline json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

inline double number_from(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw FormatError("expected a number, got '" + s + "'");
  }
  return j.get<double>();
}

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline std::optional<double> optional_number_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

inline json feature_to_json(const FeatureVector& f) {
  json values = json::array();
  for (float v : f.values()) values.push_back(v);
  return json{{"extractor", f.extractor_id()}, {"values", values}};
}

inline FeatureVector feature_from(const json& j, FeatureSource src) {
  std::vector<float> v;
  for (const auto& x : j.at("values")) v.push_back(x.get<float>());
  return FeatureVector(std::move(v), src, j.value("extractor", std::string{}));
}

inline json features_to_json(const std::vector<FeatureVector>& fs) {
  json arr = json::array();
  for (const auto& f : fs) arr.push_back(feature_to_json(f));
  return arr;
}

inline std::vector<FeatureVector> features_from(const json& j, FeatureSource src) {
  std::vector<FeatureVector> out;
  for (const auto& x : j) out.push_back(feature_from(x, src));
  return out;
}

inline json image_to_json(const ImageRef& r, const std::string& path) {
  return json{{"digest", r.hex()}, {"media_type", r.media_type}, {"byte_length", r.byte_length}, {"path", path}};
}

inline ImageRef image_from(const json& j) {
  return ImageRef{digest_from_hex(j.at("digest").get<std::string>()), j.at("media_type").get<std::string>(),
                  j.at("byte_length").get<std::uint64_t>()};
}

inline json trace_to_json(const FilterTrace& t) {
  json th = json::object();
  for (const auto& [k, v] : t.thresholds) th[k] = v;
  return json{{"stage", t.stage},         {"mode", t.mode},     {"input_ids", t.input_ids},
              {"kept_ids", t.kept_ids},   {"thresholds", th},   {"ranks", t.ranks},
              {"empty_input", t.empty_input}};
}

inline FilterTrace trace_from(const json& j) {
  FilterTrace t;
  t.stage = j.at("stage").get<std::string>();
  t.mode = j.at("mode").get<std::string>();
  t.input_ids = j.at("input_ids").get<std::vector<int>>();
  t.kept_ids = j.at("kept_ids").get<std::vector<int>>();
  for (auto& [k, v] : j.at("thresholds").items()) t.thresholds[k] = v.get<double>();
  for (auto& [k, v] : j.at("ranks").items()) t.ranks[k] = v.get<long>();
  t.empty_input = j.at("empty_input").get<bool>();
  return t;
}

inline json balance_to_json(const BalanceReport& b) {
  return json{{"text_avg", b.text_avg_sim},
              {"text_bal", b.text_balance},
              {"image_avg", b.image_avg_sim},
              {"image_bal", b.image_balance}};
}

inline BalanceReport balance_from(const json& j) {
  BalanceReport b;
  b.text_avg_sim = j.at("text_avg").get<double>();
  b.text_balance = j.at("text_bal").get<double>();
  b.image_avg_sim = j.at("image_avg").get<double>();
  b.image_balance = j.at("image_bal").get<double>();
  return b;
}

}  // namespace detail

inline json config_to_json(const PipelineConfig& c) {
  return json{{"n", c.n},
              {"theta", detail::number_or_inf(c.theta)},
              {"alpha_bar", c.alpha_bar},
              {"beta_bar", c.beta_bar},
              {"seed", c.seed},
              {"filter_mode", to_string(c.filter_mode)},
              {"prompt_template", c.prompt_template},
              {"seed_per_candidate", c.seed_per_candidate},
              {"image_average", c.image_average == ImageAverageForm::sum ? "sum" : "difference"}};
}

inline PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  c.n = j.at("n").get<std::size_t>();
  c.theta = detail::number_from(j.at("theta"));
  c.alpha_bar = j.at("alpha_bar").get<double>();
  c.beta_bar = j.at("beta_bar").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.filter_mode = filter_mode_from(j.at("filter_mode").get<std::string>());
  c.prompt_template = j.at("prompt_template").get<std::string>();
  c.seed_per_candidate = j.value("seed_per_candidate", false);
  c.image_average = j.value("image_average", std::string("sum")) == "difference" ? ImageAverageForm::difference
                                                                                 : ImageAverageForm::sum;
  return c;
}

inline std::string candidate_image_path(int id) { return "candidates/" + std::to_string(id) + ".png"; }
inline std::string anchor_image_path(int index) { return "anchors/anchor" + std::to_string(index) + ".png"; }
inline std::string anchor_embedding_path(int index) { return "anchors/e" + std::to_string(index) + ".bassemb"; }

inline json manifest_to_json(const RunManifest& m) {
  using namespace detail;
  json anchors = json::array();
  for (const auto& a : m.anchors) {
    anchors.push_back({{"index", a.index},
                       {"prompt", a.prompt},
                       {"image", image_to_json(a.image, anchor_image_path(a.index))},
                       {"embedding", {{"digest", a.embedding_digest}, {"path", anchor_embedding_path(a.index)}}},
                       {"text_feat", a.text_feat ? feature_to_json(*a.text_feat) : json(nullptr)},
                       {"image_feat", a.image_feat ? feature_to_json(*a.image_feat) : json(nullptr)},
                       {"components", features_to_json(a.components)},
                       {"component_areas", a.component_areas}});
  }
  json cands = json::array();
  for (const auto& c : m.candidates) {
    const auto& s = c.scores;
    cands.push_back({{"id", c.id()},
                     {"swap", c.swap.to_string()},
                     {"image", image_to_json(c.image, candidate_image_path(c.id()))},
                     {"feat", c.feat ? feature_to_json(*c.feat) : json(nullptr)},
                     {"segmented", c.segmented},
                     {"components", features_to_json(c.components)},
                     {"component_areas", c.component_areas},
                     {"scores",
                      {{"sim_p1", s.sim_p1},
                       {"sim_p2", s.sim_p2},
                       {"sim_i1", s.sim_i1},
                       {"sim_i2", s.sim_i2},
                       {"gap_text", s.gap_text},
                       {"gap_image", s.gap_image},
                       {"sum_image", s.sum_image},
                       {"r_score", optional_number(s.r_score)}}}});
  }
  json traces = json::object();
  if (m.coarse) traces["coarse"] = trace_to_json(*m.coarse);
  if (m.fine) traces["fine"] = trace_to_json(*m.fine);

  return json{
      {"schema_version", m.schema_version},
      {"run_id", m.run_id},
      {"tool_version", m.tool_version},
      {"digest_algorithm", m.digest_algorithm},
      {"config", config_to_json(m.config)},
      {"prompts",
       {{"a", m.prompt_a}, {"b", m.prompt_b}, {"templated_a", m.templated_a}, {"templated_b", m.templated_b}}},
      {"backend",
       {{"endpoint", m.backend_endpoint},
        {"encoder_id", m.backend_info.encoder_id},
        {"h", m.backend_info.h},
        {"w", m.backend_info.w},
        {"d", m.backend_info.d},
        {"models", m.backend_info.models}}},
      {"anchors", anchors},
      {"candidates", cands},
      {"traces", traces},
      {"selection",
       {{"id", m.selection.id ? json(*m.selection.id) : json(nullptr)},
        {"r_score", optional_number(m.selection.r_score)},
        {"level", to_string(m.selection.level)},
        {"fallback", m.selection.level != SelectionLevel::fine},
        {"excluded_ids", m.selection.excluded_ids},
        {"balance", m.selection.balance ? balance_to_json(*m.selection.balance) : json(nullptr)}}},
      {"status", {{"complete", m.status.complete}, {"stage", m.status.stage}, {"error", m.status.error}}},
      {"execution",
       {{"started_at", m.execution.started_at},
        {"finished_at", m.execution.finished_at},
        {"wall_ms", m.execution.wall_ms},
        {"max_inflight", m.execution.max_inflight},
        {"backend_calls", m.execution.backend_calls},
        {"cache_hits", m.execution.cache_hits},
        {"retries", m.execution.retries}}},
  };
}

inline RunManifest manifest_from_json(const json& j) {
  using namespace detail;
  RunManifest m;
  m.schema_version = j.at("schema_version").get<int>();
  if (m.schema_version != kManifestSchemaVersion)
    throw FormatError("unsupported manifest schema_version " + std::to_string(m.schema_version));
  m.run_id = j.at("run_id").get<std::string>();
  m.tool_version = j.at("tool_version").get<std::string>();
  m.digest_algorithm = j.at("digest_algorithm").get<std::string>();
  m.config = config_from_json(j.at("config"));
  const auto& p = j.at("prompts");
  m.prompt_a = p.at("a").get<std::string>();
  m.prompt_b = p.at("b").get<std::string>();
  m.templated_a = p.at("templated_a").get<std::string>();
  m.templated_b = p.at("templated_b").get<std::string>();
  const auto& b = j.at("backend");
  m.backend_endpoint = b.at("endpoint").get<std::string>();
  m.backend_info.encoder_id = b.at("encoder_id").get<std::string>();
  m.backend_info.h = b.at("h").get<std::size_t>();
  m.backend_info.w = b.at("w").get<std::size_t>();
  m.backend_info.d = b.at("d").get<std::size_t>();
  m.backend_info.models = b.at("models").get<std::map<std::string, std::string>>();

  for (const auto& a : j.at("anchors")) {
    AnchorRecord r;
    r.index = a.at("index").get<int>();
    r.prompt = a.at("prompt").get<std::string>();
    r.image = image_from(a.at("image"));
    r.embedding_digest = a.at("embedding").at("digest").get<std::string>();
    if (!a.at("text_feat").is_null()) r.text_feat = feature_from(a["text_feat"], FeatureSource::text);
    if (!a.at("image_feat").is_null()) r.image_feat = feature_from(a["image_feat"], FeatureSource::image);
    r.components = features_from(a.at("components"), FeatureSource::component);
    r.component_areas = a.at("component_areas").get<std::vector<double>>();
    m.anchors.push_back(std::move(r));
  }
  for (const auto& c : j.at("candidates")) {
    Candidate cand;
    cand.swap = SwapVector::parse(c.at("swap").get<std::string>(), c.at("id").get<int>());
    cand.image = image_from(c.at("image"));
    if (!c.at("feat").is_null()) cand.feat = feature_from(c["feat"], FeatureSource::image);
    cand.segmented = c.at("segmented").get<bool>();
    cand.components = features_from(c.at("components"), FeatureSource::component);
    cand.component_areas = c.at("component_areas").get<std::vector<double>>();
    const auto& s = c.at("scores");
    cand.scores.sim_p1 = s.at("sim_p1").get<double>();
    cand.scores.sim_p2 = s.at("sim_p2").get<double>();
    cand.scores.sim_i1 = s.at("sim_i1").get<double>();
    cand.scores.sim_i2 = s.at("sim_i2").get<double>();
    cand.scores.gap_text = s.at("gap_text").get<double>();
    cand.scores.gap_image = s.at("gap_image").get<double>();
    cand.scores.sum_image = s.at("sum_image").get<double>();
    cand.scores.r_score = optional_number_from(s.at("r_score"));
    m.candidates.push_back(std::move(cand));
  }
  const auto& t = j.at("traces");
  if (t.contains("coarse")) m.coarse = trace_from(t["coarse"]);
  if (t.contains("fine")) m.fine = trace_from(t["fine"]);

  const auto& s = j.at("selection");
  if (!s.at("id").is_null()) m.selection.id = s["id"].get<int>();
  m.selection.r_score = optional_number_from(s.at("r_score"));
  m.selection.level = selection_level_from(s.at("level").get<std::string>());
  m.selection.excluded_ids = s.at("excluded_ids").get<std::vector<int>>();
  if (!s.at("balance").is_null()) m.selection.balance = balance_from(s["balance"]);

  const auto& st = j.at("status");
  m.status.complete = st.at("complete").get<bool>();
  m.status.stage = st.at("stage").get<std::string>();
  m.status.error = st.at("error").get<std::string>();

  const auto& e = j.at("execution");
  m.execution.started_at = e.at("started_at").get<std::string>();
  m.execution.finished_at = e.at("finished_at").get<std::string>();
  m.execution.wall_ms = e.at("wall_ms").get<double>();
  m.execution.max_inflight = e.at("max_inflight").get<int>();
  m.execution.backend_calls = e.at("backend_calls").get<long>();
  m.execution.cache_hits = e.at("cache_hits").get<long>();
  m.execution.retries = e.at("retries").get<long>();
  return m;
}

// Manifest JSON without run id and execution details: equal for two runs
// with the same seed, backend and config.
inline std::string canonical_manifest(const RunManifest& m) {
  auto j = manifest_to_json(m);
  j.erase("run_id");
  j.erase("execution");
  return j.dump();
}

// Cross-checks a manifest against its own invariants. Returns problems found.
inline std::vector<std::string> check_manifest(const RunManifest& m) {
  std::vector<std::string> problems;
  std::set<int> ids;
  for (const auto& c : m.candidates) ids.insert(c.id());
  auto check_ids = [&](const std::vector<int>& v, const std::string& what) {
    for (int id : v)
      if (!ids.count(id)) problems.push_back(what + " references unknown candidate " + std::to_string(id));
  };
  auto subset = [](const std::vector<int>& a, const std::vector<int>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  std::vector<int> all(ids.begin(), ids.end());
  if (m.coarse) {
    check_ids(m.coarse->input_ids, "coarse input");
    check_ids(m.coarse->kept_ids, "coarse kept");
    if (!subset(m.coarse->kept_ids, all)) problems.push_back("coarse set is not a subset of all candidates");
  }
  if (m.fine) {
    check_ids(m.fine->kept_ids, "fine kept");
    if (m.coarse && m.fine->input_ids != m.coarse->kept_ids) problems.push_back("fine input differs from coarse output");
    if (!subset(m.fine->kept_ids, m.fine->input_ids)) problems.push_back("fine set is not a subset of its input");
  }
  if (m.selection.id) {
    const int id = *m.selection.id;
    const std::vector<int>* set = nullptr;
    switch (m.selection.level) {
      case SelectionLevel::fine: set = m.fine ? &m.fine->kept_ids : nullptr; break;
      case SelectionLevel::coarse: set = m.coarse ? &m.coarse->kept_ids : nullptr; break;
      case SelectionLevel::all: set = &all; break;
      case SelectionLevel::none: problems.push_back("selection id present with level none"); break;
    }
    if (set && !std::binary_search(set->begin(), set->end(), id))
      problems.push_back("selection " + std::to_string(id) + " is not in the " +
                         std::string(to_string(m.selection.level)) + " set");
  }
  for (const auto& c : m.candidates) {
    const auto& s = c.scores;
    if (s.gap_text != std::abs(s.sim_p1 - s.sim_p2) || s.gap_image != std::abs(s.sim_i1 - s.sim_i2) ||
        s.sum_image != s.sim_i1 + s.sim_i2)
      problems.push_back("candidate " + std::to_string(c.id()) + " has inconsistent derived scores");
  }
  return problems;
}

// ---- run directories -------------------------------------------------------

namespace detail {

inline void write_file(const fs::path& path, const std::string& bytes) {
  fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed to write " + path.string());
  }
  fs::rename(tmp, path);
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

// Writes <root>/run-<id>/ with manifest.json, anchors/, candidates/<id>.png
// and selected.png. Never overwrites an existing run directory.
inline fs::path write_run(const RunOutcome& run, const fs::path& root) {
  const auto& m = run.manifest;
  const fs::path dir = root / ("run-" + m.run_id);
  if (fs::exists(dir)) throw Error("run directory already exists: " + dir.string());
  fs::create_directories(dir / "anchors");
  fs::create_directories(dir / "candidates");

  auto image = [&](const ImageRef& r) -> const std::string& {
    auto it = run.images.find(r.hex());
    if (it == run.images.end()) throw Error("missing bytes for image " + r.hex());
    return it->second;
  };
  for (const auto& a : m.anchors) detail::write_file(dir / anchor_image_path(a.index), image(a.image));
  if (run.e1) detail::write_file(dir / anchor_embedding_path(1), serialize_embedding(*run.e1));
  if (run.e2) detail::write_file(dir / anchor_embedding_path(2), serialize_embedding(*run.e2));
  for (const auto& c : m.candidates) detail::write_file(dir / candidate_image_path(c.id()), image(c.image));
  if (m.selection.id) detail::write_file(dir / "selected.png", image(m.candidate(*m.selection.id)->image));
  detail::write_file(dir / "manifest.json", manifest_to_json(m).dump(2) + "\n");
  return dir;
}

inline RunManifest read_manifest(const fs::path& run_dir) {
  try {
    return manifest_from_json(json::parse(detail::read_file(run_dir / "manifest.json")));
  } catch (const json::exception& e) {
    throw FormatError(run_dir.string() + "/manifest.json: " + e.what());
  }
}

inline PromptEmbedding read_anchor_embedding(const fs::path& run_dir, int index) {
  return deserialize_embedding(detail::read_file(run_dir / anchor_embedding_path(index)));
}

struct AuditReport {
  std::vector<std::string> missing;
  std::vector<std::string> corrupted;
  bool ok() const { return missing.empty() && corrupted.empty(); }
};

// Re-hashes every artifact the manifest references.
inline AuditReport audit_run(const fs::path& run_dir) {
  const auto m = read_manifest(run_dir);
  AuditReport report;
  auto check = [&](const std::string& rel, const std::string& expected_hex) {
    const auto path = run_dir / rel;
    if (!fs::exists(path)) {
      report.missing.push_back(rel);
      return;
    }
    if (sha256_hex(detail::read_file(path)) != expected_hex) report.corrupted.push_back(rel);
  };
  for (const auto& a : m.anchors) {
    check(anchor_image_path(a.index), a.image.hex());
    if (m.status.complete) check(anchor_embedding_path(a.index), a.embedding_digest);
  }
  for (const auto& c : m.candidates) check(candidate_image_path(c.id()), c.image.hex());
  if (m.selection.id)
    if (const auto* c = m.candidate(*m.selection.id)) check("selected.png", c->image.hex());
  return report;
}

// ---- training triples ------------------------------------------------------
//
//   "BASSTRN1" | count:u32 | count x ( len:u32 | record )
//   record = run_id:(u32 len + bytes) | E1 BASSEMB1 | E2 BASSEMB1 | w:u32 | w bytes of 0/1

inline constexpr std::string_view kTriplesMagic = "BASSTRN1";

struct TrainingTriple {
  std::string run_id;
  PromptEmbedding e1;
  PromptEmbedding e2;
  SwapVector f_opt;
};

// One triple per completed run with a selection; other runs are skipped.
inline std::vector<TrainingTriple> collect_training_triples(const std::vector<fs::path>& run_dirs) {
  std::vector<TrainingTriple> out;
  for (const auto& dir : run_dirs) {
    auto m = read_manifest(dir);
    if (!m.status.complete || !m.selection.id) continue;
    const auto* c = m.candidate(*m.selection.id);
    if (!c) throw FormatError(dir.string() + ": selected candidate missing from manifest");
    out.push_back(TrainingTriple{m.run_id, read_anchor_embedding(dir, 1), read_anchor_embedding(dir, 2), c->swap});
  }
  return out;
}

inline std::string serialize_training_triples(const std::vector<TrainingTriple>& triples) {
  ByteWriter w;
  w.put_bytes(kTriplesMagic);
  w.put_u32(static_cast<std::uint32_t>(triples.size()));
  for (const auto& t : triples) {
    ByteWriter rec;
    rec.put_string(t.run_id);
    write_embedding(rec, t.e1);
    write_embedding(rec, t.e2);
    rec.put_u32(static_cast<std::uint32_t>(t.f_opt.size()));
    rec.put_bytes(std::string(t.f_opt.bits.begin(), t.f_opt.bits.end()));
    w.put_string(rec.data());
  }
  return std::move(w).take();
}

inline std::vector<TrainingTriple> parse_training_triples(std::string_view bytes) {
  ByteReader r(bytes);
  if (r.bytes(kTriplesMagic.size()) != kTriplesMagic) throw FormatError("bad training-triples magic");
  const auto count = r.u32();
  std::vector<TrainingTriple> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = r.u32();
    ByteReader rec(r.bytes(len));
    auto run_id = rec.string();
    auto e1 = read_embedding(rec);
    auto e2 = read_embedding(rec);
    auto w = rec.u32();
    auto bits = rec.bytes(w);
    SwapVector f;
    f.bits.assign(bits.begin(), bits.end());
    if (!rec.done()) throw FormatError("trailing bytes in training record");
    out.push_back(TrainingTriple{std::move(run_id), std::move(e1), std::move(e2), std::move(f)});
  }
  if (!r.done()) throw FormatError("trailing bytes after training records");
  return out;
}

inline std::size_t export_training_triples(const std::vector<fs::path>& run_dirs, const fs::path& out_file) {
  auto triples = collect_training_triples(run_dirs);
  if (out_file.has_parent_path()) fs::create_directories(out_file.parent_path());
  detail::write_file(out_file, serialize_training_triples(triples));
  return triples.size();
}

// ---- evaluation ------------------------------------------------------------

struct EvalRow {
  std::string run_id;
  BalanceReport balance;
};

struct EvalReport {
  std::vector<EvalRow> rows;  // completed runs only
  BalanceReport mean;
  std::size_t skipped = 0;

  std::string csv() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "run,text_avg,text_bal,image_avg,image_bal\n";
    auto line = [&](const std::string& name, const BalanceReport& b) {
      os << name << ',' << b.text_avg_sim << ',' << b.text_balance << ',' << b.image_avg_sim << ','
         << b.image_balance << '\n';
    };
    for (const auto& r : rows) line(r.run_id, r.balance);
    line("mean", mean);
    return os.str();
  }

  std::string text() const {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3);
    os << "                 text-              image-\n";
    os << "runs      avg. sim.  balance   avg. sim.  balance\n";
    os << std::left << std::setw(10) << rows.size() << std::right << std::setw(9) << mean.text_avg_sim
       << std::setw(9) << mean.text_balance << std::setw(12) << mean.image_avg_sim << std::setw(9)
       << mean.image_balance << '\n';
    if (skipped) os << "(" << skipped << " incomplete run(s) skipped)\n";
    return os.str();
  }
};

inline EvalReport eval_report(const std::vector<RunManifest>& runs) {
  EvalReport rep;
  for (const auto& m : runs) {
    if (!m.status.complete || !m.selection.balance) {
      ++rep.skipped;
      continue;
    }
    rep.rows.push_back({m.run_id, *m.selection.balance});
  }
  if (!rep.rows.empty()) {
    for (const auto& r : rep.rows) {
      rep.mean.text_avg_sim += r.balance.text_avg_sim;
      rep.mean.text_balance += r.balance.text_balance;
      rep.mean.image_avg_sim += r.balance.image_avg_sim;
      rep.mean.image_balance += r.balance.image_balance;
    }
    const double n = static_cast<double>(rep.rows.size());
    rep.mean.text_avg_sim /= n;
    rep.mean.text_balance /= n;
    rep.mean.image_avg_sim /= n;
    rep.mean.image_balance /= n;
  }
  return rep;
}

}  // namespace bass
