#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bass/embedding.hpp"
#include "bass/errors.hpp"
#include "bass/image.hpp"
#include "bass/metrics.hpp"

namespace bass {

// Which reading of the rank-threshold rule the fine filter applies.
//   quantile: keep the alpha_bar fraction with the smallest image gap and the
//             beta_bar fraction with the smallest image similarity sum.
//   literal:  thresholds taken at the given ranks of the descending lists,
//             compared as gap <= alpha and sum <= 2 * beta.
enum class FilterMode { quantile, literal };

inline std::string_view to_string(FilterMode m) {
  return m == FilterMode::quantile ? "quantile" : "literal";
}

inline FilterMode filter_mode_from(std::string_view s) {
  if (s == "quantile") return FilterMode::quantile;
  if (s == "literal") return FilterMode::literal;
  throw InvalidArgument("filter mode must be 'quantile' or 'literal', got '" + std::string(s) + "'");
}

struct PipelineConfig {
  std::size_t n = 200;
  double theta = 0.05;
  double alpha_bar = 0.4;
  double beta_bar = 0.1;
  std::uint64_t seed = 0;
  FilterMode filter_mode = FilterMode::quantile;
  std::string prompt_template = "A photo of {}";
  // false: every candidate is generated with gen_seed = seed.
  // true:  candidate i uses seed + 1 + i (anchors keep seed).
  bool seed_per_candidate = false;
  ImageAverageForm image_average = ImageAverageForm::sum;

  void validate() const {
    if (n < 1) throw InvalidArgument("n must be at least 1");
    if (!(theta >= 0)) throw InvalidArgument("theta must be >= 0");
    if (!(alpha_bar >= 0 && alpha_bar <= 1)) throw InvalidArgument("alpha_bar must lie in [0, 1]");
    if (!(beta_bar >= 0 && beta_bar <= 1)) throw InvalidArgument("beta_bar must lie in [0, 1]");
    auto first = prompt_template.find("{}");
    if (first == std::string::npos || prompt_template.find("{}", first + 2) != std::string::npos)
      throw InvalidArgument("prompt template must contain exactly one '{}' placeholder");
  }
};

inline std::string format_prompt(std::string_view tmpl, std::string_view text) {
  auto pos = tmpl.find("{}");
  if (pos == std::string_view::npos) throw InvalidArgument("prompt template has no '{}' placeholder");
  std::string out(tmpl.substr(0, pos));
  out += text;
  out += tmpl.substr(pos + 2);
  return out;
}

struct Scores {
  double sim_p1 = 0;
  double sim_p2 = 0;
  double sim_i1 = 0;
  double sim_i2 = 0;
  double gap_text = 0;
  double gap_image = 0;
  double sum_image = 0;
  std::optional<double> r_score;

  static Scores from_similarities(double p1, double p2, double i1, double i2) {
    return Scores{p1, p2, i1, i2, std::abs(p1 - p2), std::abs(i1 - i2), i1 + i2, std::nullopt};
  }
};

struct Candidate {
  SwapVector swap;
  ImageRef image;
  std::optional<FeatureVector> feat;
  std::vector<FeatureVector> components;
  std::vector<double> component_areas;
  bool segmented = false;
  Scores scores;

  int id() const noexcept { return swap.id; }
};

// Audit record of one filtering step.
struct FilterTrace {
  std::string stage;
  std::string mode;
  std::vector<int> input_ids;
  std::vector<int> kept_ids;
  std::map<std::string, double> thresholds;  // absent when undefined (rank 0)
  std::map<std::string, long> ranks;
  bool empty_input = false;
};

namespace detail {

inline std::vector<int> sorted_ids(std::span<const Candidate> cands) {
  std::vector<int> ids;
  ids.reserve(cands.size());
  for (const auto& c : cands) ids.push_back(c.id());
  std::sort(ids.begin(), ids.end());
  return ids;
}

// ceil(n * fraction) robust to representation error in the fraction
// (0.1 * 30 must give 3, not 4).
inline long rank_for(std::size_t n, double fraction) {
  const double x = static_cast<double>(n) * fraction;
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, x)) return static_cast<long>(r);
  return static_cast<long>(std::ceil(x));
}

}  // namespace detail

// |sim_p1 - sim_p2| <= theta.
inline FilterTrace coarse_filter(std::span<const Candidate> cands, double theta) {
  FilterTrace t;
  t.stage = "coarse";
  t.mode = "text_gap";
  t.input_ids = detail::sorted_ids(cands);
  t.empty_input = cands.empty();
  if (std::isfinite(theta)) t.thresholds["theta"] = theta;
  for (const auto& c : cands)
    if (std::abs(c.scores.sim_p1 - c.scores.sim_p2) <= theta) t.kept_ids.push_back(c.id());
  std::sort(t.kept_ids.begin(), t.kept_ids.end());
  return t;
}

inline FilterTrace fine_filter(std::span<const Candidate> cands, double alpha_bar, double beta_bar,
                               FilterMode mode) {
  if (!(alpha_bar >= 0 && alpha_bar <= 1) || !(beta_bar >= 0 && beta_bar <= 1))
    throw InvalidArgument("alpha_bar and beta_bar must lie in [0, 1]");
  FilterTrace t;
  t.stage = "fine";
  t.mode = std::string(to_string(mode));
  t.input_ids = detail::sorted_ids(cands);
  t.empty_input = cands.empty();
  if (cands.empty()) return t;

  const long k_gap = detail::rank_for(cands.size(), alpha_bar);
  const long k_sum = detail::rank_for(cands.size(), beta_bar);
  t.ranks["alpha"] = k_gap;
  t.ranks["beta"] = k_sum;

  // Index order by (value, id), ascending or descending in value.
  auto order = [&](auto value, bool descending) {
    std::vector<const Candidate*> v;
    for (const auto& c : cands) v.push_back(&c);
    std::sort(v.begin(), v.end(), [&](const Candidate* a, const Candidate* b) {
      const double va = value(*a), vb = value(*b);
      if (va != vb) return descending ? va > vb : va < vb;
      return a->id() < b->id();
    });
    return v;
  };
  auto gap = [](const Candidate& c) { return c.scores.gap_image; };
  auto sum = [](const Candidate& c) { return c.scores.sum_image; };

  if (mode == FilterMode::quantile) {
    auto by_gap = order(gap, false);
    auto by_sum = order(sum, false);
    std::vector<char> in_gap(cands.size()), in_sum(cands.size());
    std::unordered_map<const Candidate*, std::size_t> index;
    for (std::size_t i = 0; i < cands.size(); ++i) index[&cands[i]] = i;
    for (long i = 0; i < k_gap; ++i) in_gap[index[by_gap[i]]] = 1;
    for (long i = 0; i < k_sum; ++i) in_sum[index[by_sum[i]]] = 1;
    if (k_gap > 0) t.thresholds["alpha"] = by_gap[k_gap - 1]->scores.gap_image;
    if (k_sum > 0) t.thresholds["beta_prime"] = by_sum[k_sum - 1]->scores.sum_image;
    for (std::size_t i = 0; i < cands.size(); ++i)
      if (in_gap[i] && in_sum[i]) t.kept_ids.push_back(cands[i].id());
  } else {
    if (k_gap > 0 && k_sum > 0) {
      const double alpha = order(gap, true)[k_gap - 1]->scores.gap_image;
      const double beta = order(sum, true)[k_sum - 1]->scores.sum_image;
      t.thresholds["alpha"] = alpha;
      t.thresholds["beta"] = beta;
      for (const auto& c : cands)
        if (c.scores.gap_image <= alpha && c.scores.sum_image <= 2 * beta) t.kept_ids.push_back(c.id());
    } else {
      if (k_gap > 0) t.thresholds["alpha"] = order(gap, true)[k_gap - 1]->scores.gap_image;
      if (k_sum > 0) t.thresholds["beta"] = order(sum, true)[k_sum - 1]->scores.sum_image;
    }
  }
  std::sort(t.kept_ids.begin(), t.kept_ids.end());
  return t;
}

// Mean pairwise cosine between two component sets.
inline double component_similarity(std::span<const FeatureVector> a, std::span<const FeatureVector> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("component sets must be non-empty");
  double total = 0;
  for (const auto& x : a)
    for (const auto& y : b) total += cosine(x, y);
  return total / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

// r = (s(C_f, C_1) + s(C_f, C_2)) / 2
inline double component_score(std::span<const FeatureVector> cand, std::span<const FeatureVector> anchor1,
                              std::span<const FeatureVector> anchor2) {
  return (component_similarity(cand, anchor1) + component_similarity(cand, anchor2)) / 2;
}

struct SelectionOutcome {
  std::optional<int> id;
  std::optional<double> r_score;
  std::vector<int> excluded_ids;  // candidates without components
};

// Argmax of r over `ids`; ties go to the lowest id. Stores r on each scored candidate.
inline SelectionOutcome select_optimal(std::span<Candidate> cands, std::span<const int> ids,
                                       std::span<const FeatureVector> anchor1,
                                       std::span<const FeatureVector> anchor2) {
  if (anchor1.empty() || anchor2.empty())
    throw InvalidArgument("anchor images produced no segmented components");
  std::unordered_map<int, Candidate*> by_id;
  for (auto& c : cands) by_id[c.id()] = &c;

  std::vector<int> order(ids.begin(), ids.end());
  std::sort(order.begin(), order.end());
  SelectionOutcome out;
  for (int id : order) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw InvalidArgument("unknown candidate id " + std::to_string(id));
    Candidate& c = *it->second;
    if (c.components.empty()) {
      out.excluded_ids.push_back(id);
      continue;
    }
    const double r = component_score(c.components, anchor1, anchor2);
    c.scores.r_score = r;
    if (!out.r_score || r > *out.r_score) {
      out.id = id;
      out.r_score = r;
    }
  }
  return out;
}

inline SelectionOutcome select_optimal(std::span<Candidate> cands, std::span<const FeatureVector> anchor1,
                                       std::span<const FeatureVector> anchor2) {
  std::vector<int> ids;
  for (const auto& c : cands) ids.push_back(c.id());
  return select_optimal(cands, ids, anchor1, anchor2);
}

// Set the selection was drawn from; anything but `fine` means a fallback fired.
enum class SelectionLevel { fine, coarse, all, none };

inline std::string_view to_string(SelectionLevel l) {
  switch (l) {
    case SelectionLevel::fine: return "fine";
    case SelectionLevel::coarse: return "coarse";
    case SelectionLevel::all: return "all";
    case SelectionLevel::none: return "none";
  }
  return "?";
}

inline SelectionLevel selection_level_from(std::string_view s) {
  if (s == "fine") return SelectionLevel::fine;
  if (s == "coarse") return SelectionLevel::coarse;
  if (s == "all") return SelectionLevel::all;
  if (s == "none") return SelectionLevel::none;
  throw FormatError("unknown selection level '" + std::string(s) + "'");
}

struct Selection {
  std::optional<int> id;
  std::optional<double> r_score;
  SelectionLevel level = SelectionLevel::none;
  std::vector<int> excluded_ids;
};

// Called with candidate ids whose components must be populated before scoring.
using ComponentLoader = std::function<void(std::span<const int>)>;

// Selects from the fine set; if nothing there can be scored, falls back to
// the coarse set, then to every candidate.
inline Selection select_with_fallback(std::vector<Candidate>& cands, const FilterTrace& coarse,
                                      const FilterTrace& fine, std::span<const FeatureVector> anchor1,
                                      std::span<const FeatureVector> anchor2,
                                      const ComponentLoader& load = {}) {
  std::vector<int> all_ids;
  for (const auto& c : cands) all_ids.push_back(c.id());
  std::sort(all_ids.begin(), all_ids.end());

  const std::pair<SelectionLevel, const std::vector<int>*> ladder[] = {
      {SelectionLevel::fine, &fine.kept_ids},
      {SelectionLevel::coarse, &coarse.kept_ids},
      {SelectionLevel::all, &all_ids},
  };
  Selection sel;
  for (const auto& [level, ids] : ladder) {
    if (ids->empty()) continue;
    if (load) load(*ids);
    auto out = select_optimal(cands, *ids, anchor1, anchor2);
    for (int id : out.excluded_ids)
      if (std::find(sel.excluded_ids.begin(), sel.excluded_ids.end(), id) == sel.excluded_ids.end())
        sel.excluded_ids.push_back(id);
    if (out.id) {
      sel.id = out.id;
      sel.r_score = out.r_score;
      sel.level = level;
      break;
    }
  }
  std::sort(sel.excluded_ids.begin(), sel.excluded_ids.end());
  return sel;
}

}  // namespace bass
