#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "bass/client.hpp"
#include "bass/errors.hpp"
#include "bass/pipeline.hpp"
#include "bass/runstore.hpp"

namespace bass {

// Parameter grid: a theta axis (alpha_bar, beta_bar at their base values) and
// an alpha_bar x beta_bar grid (theta at its base value).
struct SweepGrid {
  std::vector<double> thetas{0.01, 0.02, 0.05, 0.1, std::numeric_limits<double>::infinity()};
  std::vector<double> alpha_bars{0.0, 0.1, 0.2, 0.3};
  std::vector<double> beta_bars{0.0, 0.2, 0.4, 0.6};

  std::size_t cell_count() const { return thetas.size() + alpha_bars.size() * beta_bars.size(); }

  // {"theta": [0.01, "inf"], "alpha_bar": [...], "beta_bar": [...]}; missing keys keep defaults.
  static SweepGrid from_json(const nlohmann::json& j) {
    SweepGrid g;
    auto axis = [&](const char* key, std::vector<double>& out) {
      if (!j.contains(key)) return;
      out.clear();
      for (const auto& v : j.at(key)) out.push_back(detail::number_from(v));
      if (out.empty()) throw InvalidArgument(std::string("grid axis '") + key + "' is empty");
    };
    axis("theta", g.thetas);
    axis("alpha_bar", g.alpha_bars);
    axis("beta_bar", g.beta_bars);
    return g;
  }
};

inline std::string axis_label(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << v;
  return os.str();
}

struct SweepCell {
  std::string table;  // "theta" or "alpha_beta"
  double theta = 0;
  double alpha_bar = 0;
  double beta_bar = 0;
  std::filesystem::path run_dir;
  RunManifest manifest;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::filesystem::path theta_csv;
  std::filesystem::path alpha_beta_csv;
  std::filesystem::path cells_csv;
};

namespace detail {

inline std::string metric(const RunManifest& m, const std::string& name) {
  std::ostringstream os;
  os << std::setprecision(17);
  if (name == "coarse_size") os << (m.coarse ? m.coarse->kept_ids.size() : 0);
  else if (name == "fine_size") os << (m.fine ? m.fine->kept_ids.size() : 0);
  else if (name == "selected_id") { if (m.selection.id) os << *m.selection.id; }
  else if (name == "selection_level") os << to_string(m.selection.level);
  else if (name == "r_score") { if (m.selection.r_score) os << *m.selection.r_score; }
  else if (name == "text_bal") { if (m.selection.balance) os << m.selection.balance->text_balance; }
  else if (name == "image_bal") { if (m.selection.balance) os << m.selection.balance->image_balance; }
  return os.str();
}

inline const std::vector<std::string>& sweep_metrics() {
  static const std::vector<std::string> names{"coarse_size", "fine_size", "selected_id", "selection_level",
                                              "r_score",     "text_bal",  "image_bal"};
  return names;
}

}  // namespace detail

// Runs one BASS pass per grid cell and writes a manifest per cell plus CSVs
// laid out like the theta table (one column per theta) and the
// alpha_bar x beta_bar table (rows alpha_bar, columns beta_bar).
inline SweepResult run_sweep(const std::string& prompt_a, const std::string& prompt_b, const PipelineConfig& base,
                             const SweepGrid& grid, BackendClient& client, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  base.validate();
  for (double v : grid.alpha_bars)
    if (!(v >= 0 && v <= 1)) throw InvalidArgument("alpha_bar grid values must lie in [0, 1]");
  for (double v : grid.beta_bars)
    if (!(v >= 0 && v <= 1)) throw InvalidArgument("beta_bar grid values must lie in [0, 1]");
  for (double v : grid.thetas)
    if (!(v >= 0)) throw InvalidArgument("theta grid values must be >= 0");

  SweepResult res;
  auto run_cell = [&](const std::string& table, double theta, double a, double b, const fs::path& sub) {
    PipelineConfig cfg = base;
    cfg.theta = theta;
    cfg.alpha_bar = a;
    cfg.beta_bar = b;
    auto outcome = run_bass(prompt_a, prompt_b, cfg, client);
    auto dir = write_run(outcome, out_dir / sub);
    res.cells.push_back(SweepCell{table, theta, a, b, dir, std::move(outcome.manifest)});
  };
  for (double t : grid.thetas)
    run_cell("theta", t, base.alpha_bar, base.beta_bar, fs::path("theta") / ("theta-" + axis_label(t)));
  for (double a : grid.alpha_bars)
    for (double b : grid.beta_bars)
      run_cell("alpha_beta", base.theta, a, b,
               fs::path("alpha_beta") / ("alpha-" + axis_label(a) + "_beta-" + axis_label(b)));

  // theta table
  {
    std::ostringstream os;
    os << "metric";
    for (double t : grid.thetas) os << ',' << axis_label(t);
    os << '\n';
    for (const auto& name : detail::sweep_metrics()) {
      os << name;
      for (const auto& c : res.cells)
        if (c.table == "theta") os << ',' << detail::metric(c.manifest, name);
      os << '\n';
    }
    res.theta_csv = out_dir / "theta.csv";
    detail::write_file(res.theta_csv, os.str());
  }
  // alpha_bar x beta_bar table, one block per metric
  {
    std::ostringstream os;
    os << "metric,alpha_bar\\beta_bar";
    for (double b : grid.beta_bars) os << ',' << axis_label(b);
    os << '\n';
    for (const auto& name : detail::sweep_metrics()) {
      std::size_t k = 0;
      const std::size_t first = grid.thetas.size();
      for (double a : grid.alpha_bars) {
        os << name << ',' << axis_label(a);
        for (std::size_t j = 0; j < grid.beta_bars.size(); ++j, ++k)
          os << ',' << detail::metric(res.cells[first + k].manifest, name);
        os << '\n';
      }
    }
    res.alpha_beta_csv = out_dir / "alpha_beta.csv";
    detail::write_file(res.alpha_beta_csv, os.str());
  }
  // long format
  {
    std::ostringstream os;
    os << "table,theta,alpha_bar,beta_bar,run_dir";
    for (const auto& name : detail::sweep_metrics()) os << ',' << name;
    os << '\n';
    for (const auto& c : res.cells) {
      os << c.table << ',' << axis_label(c.theta) << ',' << axis_label(c.alpha_bar) << ','
         << axis_label(c.beta_bar) << ',' << fs::relative(c.run_dir, out_dir).string();
      for (const auto& name : detail::sweep_metrics()) os << ',' << detail::metric(c.manifest, name);
      os << '\n';
    }
    res.cells_csv = out_dir / "cells.csv";
    detail::write_file(res.cells_csv, os.str());
  }
  return res;
}

}  // namespace bass
