#pragma once

// Command-line front end: run, sweep, eval, export-triples, audit, mock-serve.
// Exit codes: 0 ok, 1 runtime failure, 2 usage error.

#include <CLI11.hpp>
#include <httplib.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bass/client.hpp"
#include "bass/http_backend.hpp"
#include "bass/pipeline.hpp"
#include "bass/runstore.hpp"
#include "bass/server.hpp"
#include "bass/sweep.hpp"

namespace bass::cli {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2 };

inline double parse_theta(const std::string& s) {
  if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || !(v >= 0)) throw CLI::ValidationError("--theta", "must be a number >= 0 or 'inf'");
  return v;
}

// Options shared by `run` and `sweep`.
struct RunOptions {
  std::string prompt_a;
  std::string prompt_b;
  PipelineConfig config;
  BackendHandle backend;
  std::string theta_text = "0.05";
  std::string filter_mode = "quantile";
  std::string out = "runs";
  std::string cache_dir;
  std::string grid_file;
};

inline void add_run_flags(CLI::App& cmd, RunOptions& o) {
  // A repeated option keeps its last value; config-file tokens are placed first (see expand_config).
  cmd.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd.add_option("--config", "key = value config file (TOML/INI); command-line flags take precedence");
  cmd.add_option("--prompt-a", o.prompt_a, "first concept, e.g. frog")->required();
  cmd.add_option("--prompt-b", o.prompt_b, "second concept, e.g. broccoli")->required();
  cmd.add_option("--template", o.config.prompt_template, "prompt template with one {} placeholder")
      ->capture_default_str();
  cmd.add_option("--n", o.config.n, "number of swap vectors / candidates")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--theta", o.theta_text, "coarse text-balance width (number or 'inf')")->capture_default_str();
  cmd.add_option("--alpha-bar", o.config.alpha_bar, "fraction kept by image-gap rank")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--beta-bar", o.config.beta_bar, "fraction kept by image-similarity-sum rank")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--seed", o.config.seed, "run seed")->capture_default_str();
  cmd.add_flag("--seed-per-candidate", o.config.seed_per_candidate,
               "generate candidate i with seed + 1 + i instead of the shared run seed");
  cmd.add_option("--filter-mode", o.filter_mode, "fine-filter threshold reading")
      ->capture_default_str()
      ->check(CLI::IsMember({"quantile", "literal"}));
  cmd.add_option("--backend", o.backend.endpoint, "model endpoint URL or mock:<seed>")
      ->envname("BASS_BACKEND_URL")
      ->capture_default_str();
  cmd.add_option("--max-inflight", o.backend.max_inflight, "maximum concurrent backend requests")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--timeout-ms", o.backend.timeout_ms, "per-request timeout")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--retries", o.backend.retry.attempts, "attempts per request")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--backoff-ms", o.backend.retry.backoff_ms, "initial retry backoff")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--cache-dir", o.cache_dir, "persistent response cache directory");
  cmd.add_option("--out", o.out, "output directory")->capture_default_str();
}

// Turns parsed text fields into typed config. Throws CLI::ValidationError.
inline void finalize(RunOptions& o) {
  o.config.theta = parse_theta(o.theta_text);
  o.config.filter_mode = filter_mode_from(o.filter_mode);
  try {
    o.config.validate();
    o.backend.validate();
  } catch (const InvalidArgument& e) {
    throw CLI::ValidationError(e.what());
  }
}

// CLI11 only reads config files attached to the top-level app, so a
// subcommand's `--config FILE` is expanded here into `--key=value` tokens
// inserted at `first`, ahead of the command-line flags. With TakeLast that
// gives: command line > file > environment > default. Keys may be bare or
// under a [section] named after the subcommand.
inline std::vector<std::string> expand_config(std::vector<std::string> args, std::size_t first,
                                              const std::string& section) {
  std::optional<std::string> file;
  for (std::size_t i = first; i < args.size(); ++i) {
    if (args[i] == "--") break;
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!file) return args;

  std::vector<std::string> tokens;
  for (const auto& item : CLI::ConfigTOML{}.from_file(*file)) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (!item.parents.empty() && item.parents != std::vector<std::string>{section}) continue;
    if (item.inputs.size() == 1) {
      tokens.push_back("--" + item.name + "=" + item.inputs.front());
    } else {
      tokens.push_back("--" + item.name);
      tokens.insert(tokens.end(), item.inputs.begin(), item.inputs.end());
    }
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(first), tokens.begin(), tokens.end());
  return args;
}

// Parses `run` flags alone (no subcommand), e.g. for inspecting precedence.
inline RunOptions parse_run_options(std::vector<std::string> args) {
  CLI::App app{"run"};
  RunOptions o;
  add_run_flags(app, o);
  args = expand_config(std::move(args), 0, "run");
  std::vector<const char*> argv{"bass"};
  for (const auto& a : args) argv.push_back(a.c_str());
  app.parse(static_cast<int>(argv.size()), argv.data());
  finalize(o);
  return o;
}

inline std::unique_ptr<BackendClient> make_client(const RunOptions& o) {
  std::optional<std::filesystem::path> cache;
  if (!o.cache_dir.empty()) cache = o.cache_dir;
  return std::make_unique<BackendClient>(make_backend(o.backend), o.backend, cache);
}

inline int cmd_run(RunOptions& o, std::ostream& out, std::ostream& err) {
  auto client = make_client(o);
  auto outcome = run_bass(o.prompt_a, o.prompt_b, o.config, *client);
  auto dir = write_run(outcome, o.out);
  const auto& m = outcome.manifest;
  out << "run:        " << dir.string() << '\n';
  out << "candidates: " << m.candidates.size() << ", coarse " << (m.coarse ? m.coarse->kept_ids.size() : 0)
      << ", fine " << (m.fine ? m.fine->kept_ids.size() : 0) << '\n';
  if (!m.status.complete) {
    err << "run incomplete at stage '" << m.status.stage << "': " << m.status.error << '\n';
    return kFailure;
  }
  out << "selected:   candidate " << *m.selection.id << " (swap " << m.candidate(*m.selection.id)->swap.to_string()
      << ", r=" << *m.selection.r_score << ", from " << to_string(m.selection.level) << " set)\n";
  return kOk;
}

inline int cmd_sweep(RunOptions& o, std::ostream& out, std::ostream& err) {
  SweepGrid grid;
  if (!o.grid_file.empty()) {
    std::ifstream in(o.grid_file);
    if (!in) throw CLI::ValidationError("--grid-file", "cannot open " + o.grid_file);
    try {
      grid = SweepGrid::from_json(nlohmann::json::parse(in));
    } catch (const std::exception& e) {
      throw CLI::ValidationError("--grid-file", e.what());
    }
  }
  auto client = make_client(o);
  auto res = run_sweep(o.prompt_a, o.prompt_b, o.config, grid, *client, o.out);
  std::size_t incomplete = 0;
  for (const auto& c : res.cells) incomplete += !c.manifest.status.complete;
  out << "cells:      " << res.cells.size() << '\n';
  out << "theta:      " << res.theta_csv.string() << '\n';
  out << "alpha/beta: " << res.alpha_beta_csv.string() << '\n';
  out << "all cells:  " << res.cells_csv.string() << '\n';
  if (incomplete) {
    err << incomplete << " cell(s) did not complete\n";
    return kFailure;
  }
  return kOk;
}

inline int cmd_eval(const std::vector<std::string>& dirs, const std::string& csv_path, std::ostream& out) {
  std::vector<RunManifest> runs;
  for (const auto& d : dirs) runs.push_back(read_manifest(d));
  auto rep = eval_report(runs);
  out << rep.text();
  if (!csv_path.empty()) detail::write_file(csv_path, rep.csv());
  return rep.rows.empty() ? kFailure : kOk;
}

inline int cmd_export(const std::vector<std::string>& dirs, const std::string& file, std::ostream& out) {
  std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
  const auto n = export_training_triples(paths, file);
  out << "wrote " << n << " training triple(s) to " << file << '\n';
  return kOk;
}

inline int cmd_audit(const std::vector<std::string>& dirs, std::ostream& out) {
  int rc = kOk;
  for (const auto& d : dirs) {
    auto rep = audit_run(d);
    for (const auto& f : rep.missing) out << d << ": missing " << f << '\n';
    for (const auto& f : rep.corrupted) out << d << ": digest mismatch " << f << '\n';
    if (!rep.ok()) rc = kFailure;
    else out << d << ": ok\n";
  }
  return rc;
}

inline int cmd_mock_serve(const std::string& host, int port, std::uint64_t seed, std::ostream& out) {
  httplib::Server server;
  mount_protocol(server, std::make_shared<MockBackend>(seed));
  if (port == 0) {
    port = server.bind_to_any_port(host);
    if (port < 0) return kFailure;
    out << "mock backend (seed " << seed << ") on http://" << host << ':' << port << std::endl;
    return server.listen_after_bind() ? kOk : kFailure;
  }
  out << "mock backend (seed " << seed << ") on http://" << host << ':' << port << std::endl;
  return server.listen(host, port) ? kOk : kFailure;
}

inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Balance swap-sampling: fuse two concepts into one generated object"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "run one sampling pass and write a run directory");
  add_run_flags(*run, run_opts);

  RunOptions sweep_opts;
  sweep_opts.out = "sweep";
  auto* sweep = app.add_subcommand("sweep", "run the theta axis and the alpha_bar x beta_bar grid");
  add_run_flags(*sweep, sweep_opts);
  sweep->add_option("--grid-file", sweep_opts.grid_file, "JSON file overriding the grid axes");

  std::vector<std::string> eval_dirs;
  std::string eval_csv;
  auto* eval = app.add_subcommand("eval", "aggregate balance metrics over run directories");
  eval->add_option("runs", eval_dirs, "run directories")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--csv", eval_csv, "also write the table as CSV");

  std::vector<std::string> export_dirs;
  std::string export_file = "triples.bin";
  auto* exp = app.add_subcommand("export-triples", "export (E1, E2, f_opt) training records");
  exp->add_option("runs", export_dirs, "run directories")->check(CLI::ExistingDirectory);
  exp->add_option("--out", export_file, "output file")->capture_default_str();

  std::vector<std::string> audit_dirs;
  auto* audit = app.add_subcommand("audit", "verify artifact digests of run directories");
  audit->add_option("runs", audit_dirs, "run directories")->required()->check(CLI::ExistingDirectory);

  std::string host = "127.0.0.1";
  int port = 8080;
  std::uint64_t mock_seed = 0;
  auto* serve = app.add_subcommand("mock-serve", "serve the mock backend over the HTTP protocol");
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port, "0 picks a free port")->capture_default_str()->check(CLI::Range(0, 65535));
  serve->add_option("--seed", mock_seed)->capture_default_str();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (!args.empty() && (args[0] == "run" || args[0] == "sweep")) {
      const std::string command = args[0];
      args = expand_config(std::move(args), 1, command);
    }
    std::vector<const char*> expanded{argv[0]};
    for (const auto& a : args) expanded.push_back(a.c_str());
    app.parse(static_cast<int>(expanded.size()), expanded.data());
    if (run->parsed()) finalize(run_opts);
    if (sweep->parsed()) finalize(sweep_opts);
  } catch (const CLI::CallForHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    err << "run with --help for usage\n";
    return kUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_opts, out, err);
    if (sweep->parsed()) return cmd_sweep(sweep_opts, out, err);
    if (eval->parsed()) return cmd_eval(eval_dirs, eval_csv, out);
    if (exp->parsed()) return cmd_export(export_dirs, export_file, out);
    if (audit->parsed()) return cmd_audit(audit_dirs, out);
    if (serve->parsed()) return cmd_mock_serve(host, port, mock_seed, out);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace bass::cli
