// Copyright 2026 The NexusSum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nexussum/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nexussum/errors.hpp"
#include "nexussum/metrics.hpp"

namespace nexussum::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write file: " + path.string());
  out << content;
}

json load_config_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config file: " + path.string());
  try {
    json j;
    in >> j;
    if (!j.is_object()) throw ConfigError(path.string() + ": expected a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig: return 2;
    case ErrorCategory::kInput: return 3;
    case ErrorCategory::kBackend: return 4;
    case ErrorCategory::kInternal: return 5;
  }
  return 5;
}

const char* category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kInput: return "input";
    case ErrorCategory::kBackend: return "backend";
    case ErrorCategory::kInternal: return "internal";
  }
  return "internal";
}

int report_error(ErrorCategory category, const std::string& message) {
  json record = {{"error", {{"category", category_name(category)},
                            {"message", message}}}};
  std::cerr << record.dump() << '\n';
  return exit_code_for(category);
}

std::vector<std::string> split_csv(const std::string& value) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : value) {
    if (c == ',') {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

std::vector<std::int64_t> parse_int_list(const std::string& value,
                                         const std::string& what) {
  std::vector<std::int64_t> out;
  for (const std::string& part : split_csv(value)) {
    try {
      out.push_back(std::stoll(part));
    } catch (const std::exception&) {
      throw ConfigError(what + ": '" + part + "' is not an integer");
    }
  }
  return out;
}

// "4..8", "4", or "4,5,6"
std::vector<int> parse_n_range(const std::string& value) {
  std::size_t dots = value.find("..");
  if (dots != std::string::npos) {
    int lo = 0;
    int hi = 0;
    try {
      lo = std::stoi(value.substr(0, dots));
      hi = std::stoi(value.substr(dots + 2));
    } catch (const std::exception&) {
      throw ConfigError("--n: cannot parse range '" + value + "'");
    }
    if (lo < 1 || hi < lo) throw ConfigError("--n: bad range '" + value + "'");
    std::vector<int> out;
    for (int n = lo; n <= hi; ++n) out.push_back(n);
    return out;
  }
  std::vector<int> out;
  for (std::int64_t v : parse_int_list(value, "--n")) {
    if (v < 1) throw ConfigError("--n: values must be >= 1");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::string format_count(std::int64_t v) { return std::to_string(v); }

std::string format_real(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

// ---------------------------------------------------------------------------
// run / sweep

struct RunFlags {
  CliOverrides overrides;
  std::string config_path;
  std::string format = "table";
  bool resume = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& flags) {
  auto& o = flags.overrides;
  auto opt_str = [&](const char* name, std::optional<std::string>& slot,
                     const char* desc) {
    cmd->add_option_function<std::string>(
        name, [&slot](const std::string& v) { slot = v; }, desc);
  };
  auto opt_i64 = [&](const char* name, std::optional<std::int64_t>& slot,
                     const char* desc) {
    cmd->add_option_function<std::int64_t>(
        name, [&slot](std::int64_t v) { slot = v; }, desc);
  };
  auto opt_int = [&](const char* name, std::optional<int>& slot,
                     const char* desc) {
    cmd->add_option_function<int>(
        name, [&slot](int v) { slot = v; }, desc);
  };
  auto opt_real = [&](const char* name, std::optional<double>& slot,
                      const char* desc) {
    cmd->add_option_function<double>(
        name, [&slot](double v) { slot = v; }, desc);
  };

  cmd->add_option("--config", flags.config_path, "JSON config file");
  opt_str("--preset", o.preset, "preset: booksum, moviesum, mensa, summscreenfd");
  opt_str("--input", o.input, "input narrative text file (UTF-8)");
  opt_str("--medium", o.medium, "screenplay, prose, or transcript");
  opt_str("--out", o.output_dir, "output directory");
  opt_str("--id", o.doc_id, "document id (default: input file stem)");

  opt_i64("--scenes-per-chunk", o.scenes_per_chunk, "scenes per chunk (default 8)");
  opt_str("--delta", o.delta, "sentence-chunk word budget, or 'max'");
  opt_i64("--theta", o.theta, "target word count lower bound (0 = none)");
  opt_i64("--max-iterations", o.max_iterations, "compression iteration cap");
  cmd->add_option_function<std::string>(
      "--stages",
      [&o](const std::string& v) { o.stages = split_csv(v); },
      "comma list from P,P_cot,S,S_fewshot,C,C_fewshot,R");
  cmd->add_flag_function(
      "--stall,!--no-stall",
      [&o](std::int64_t count) { o.early_stop_on_stall = count > 0; },
      "halt when an iteration stops shrinking (default on)");
  opt_str("--prompt-dir", o.prompt_dir, "prompt template directory");

  opt_str("--backend", o.backend_kind,
          "http, mock-identity, mock-truncate, mock-halve, fixture");
  opt_str("--endpoint", o.endpoint, "http backend base URL");
  opt_str("--model", o.model, "http backend model name");
  opt_str("--credential-env", o.credential_env,
          "env var holding the API key (never a literal secret)");
  opt_real("--ratio", o.ratio, "mock-truncate keep ratio in (0,1]");
  opt_str("--fixture", o.fixture_path, "fixture JSON file for replay");
  opt_int("--max-in-flight", o.max_in_flight, "max concurrent backend calls");
  opt_int("--retry-attempts", o.retry_attempts, "max attempts per call");
  opt_i64("--retry-backoff-ms", o.retry_backoff_ms, "base retry backoff");

  opt_real("--temperature", o.temperature, "sampling temperature");
  opt_real("--top-p", o.top_p, "nucleus sampling mass");
  opt_i64("--seed", o.seed, "sampling seed");
  opt_i64("--max-output-tokens", o.max_output_tokens, "per-call output cap");

  cmd->add_option("--format", flags.format, "table or json")
      ->check(CLI::IsMember({"table", "json"}));
}

json overrides_to_json(const CliOverrides& o) {
  json j = json::object();
  if (o.scenes_per_chunk) j["scenes_per_chunk"] = *o.scenes_per_chunk;
  if (o.delta) {
    if (*o.delta == "max" || *o.delta == "maximum" || *o.delta == "unbounded") {
      j["delta"] = "max";
    } else {
      try {
        j["delta"] = std::stoll(*o.delta);
      } catch (const std::exception&) {
        throw ConfigError("--delta: expected an integer or 'max'");
      }
    }
  }
  if (o.theta) j["theta"] = *o.theta;
  if (o.max_iterations) j["max_iterations"] = *o.max_iterations;
  if (o.stages) j["stages"] = *o.stages;
  if (o.early_stop_on_stall) j["early_stop_on_stall"] = *o.early_stop_on_stall;
  if (o.prompt_dir) j["prompt_dir"] = *o.prompt_dir;

  json backend = json::object();
  if (o.backend_kind) backend["kind"] = *o.backend_kind;
  if (o.endpoint) backend["endpoint"] = *o.endpoint;
  if (o.model) backend["model"] = *o.model;
  if (o.credential_env) backend["credential_env"] = *o.credential_env;
  if (o.ratio) backend["ratio"] = *o.ratio;
  if (o.fixture_path) backend["fixture_path"] = *o.fixture_path;
  if (o.max_in_flight) backend["max_in_flight"] = *o.max_in_flight;
  json retry = json::object();
  if (o.retry_attempts) retry["max_attempts"] = *o.retry_attempts;
  if (o.retry_backoff_ms) retry["base_backoff_ms"] = *o.retry_backoff_ms;
  if (!retry.empty()) backend["retry"] = retry;
  if (!backend.empty()) j["backend"] = backend;

  json params = json::object();
  if (o.temperature) params["temperature"] = *o.temperature;
  if (o.top_p) params["top_p"] = *o.top_p;
  if (o.seed) params["seed"] = *o.seed;
  if (o.max_output_tokens) params["max_output_tokens"] = *o.max_output_tokens;
  if (!params.empty()) j["params"] = params;
  return j;
}

NarrativeDocument load_document(const RunOptions& options) {
  if (options.input_path.empty()) {
    throw ConfigError("no input file given (--input or config 'input')");
  }
  if (!options.medium) {
    throw ConfigError("no medium given (--medium or config 'medium'); "
                      "the medium is never sniffed");
  }
  if (!fs::exists(options.input_path)) {
    throw InputError("input file does not exist: " + options.input_path);
  }
  std::string id = options.doc_id.empty()
                       ? fs::path(options.input_path).stem().string()
                       : options.doc_id;
  return ingest(read_text_file(options.input_path), *options.medium, id);
}

struct RunOutcome {
  RunManifest manifest;
  fs::path manifest_path;
  fs::path summary_path;
};

RunOutcome execute_run(const RunOptions& options, bool resume_requested) {
  const NarrativeDocument doc = load_document(options);

  fs::create_directories(options.output_dir);
  RunOutcome outcome;
  outcome.manifest_path = fs::path(options.output_dir) / "manifest.json";
  outcome.summary_path = fs::path(options.output_dir) / "summary.txt";

  std::unique_ptr<Backend> backend = make_backend(options.config.backend);
  if (resume_requested && fs::exists(outcome.manifest_path)) {
    RunManifest partial = load_manifest(outcome.manifest_path);
    outcome.manifest = resume(partial, doc, options.config, *backend,
                              outcome.manifest_path);
  } else {
    outcome.manifest =
        run_pipeline(doc, options.config, *backend, outcome.manifest_path);
  }
  write_text_file(outcome.summary_path, outcome.manifest.final_summary);
  return outcome;
}

void print_run_outcome(const RunOutcome& outcome, const std::string& format) {
  const RunManifest& m = outcome.manifest;
  const std::int64_t final_words = word_count(m.final_summary);
  if (format == "json") {
    json j = {{"final_words", final_words},
              {"iterations_used", m.iterations_used},
              {"halt_reason", m.halt_reason ? json(to_string(*m.halt_reason)) : json()},
              {"total_calls", m.total_calls},
              {"run_id", m.run_id},
              {"manifest", outcome.manifest_path.string()},
              {"summary", outcome.summary_path.string()}};
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::cout << format_table(
      {"final_words", "iterations_used", "halt_reason", "total_calls"},
      {{format_count(final_words), format_count(m.iterations_used),
        m.halt_reason ? to_string(*m.halt_reason) : "-",
        format_count(m.total_calls)}});
  std::cout << "manifest: " << outcome.manifest_path.string() << '\n'
            << "summary:  " << outcome.summary_path.string() << '\n';
}

int cmd_run(const RunFlags& flags) {
  std::optional<json> file;
  if (!flags.config_path.empty()) file = load_config_file(flags.config_path);
  RunOptions options = resolve_run_options(file, flags.overrides);
  options.config.validate();
  RunOutcome outcome = execute_run(options, flags.resume);
  print_run_outcome(outcome, flags.format);
  return 0;
}

struct SweepCell {
  std::int64_t delta = 0;  // kUnboundedDelta encoded as 0 in output
  std::int64_t theta = 0;
  bool ok = false;
  std::string error;
  std::int64_t final_words = 0;
  double lar_value = 0.0;
  bool has_lar = false;
  double ratio = 0.0;
  bool has_ratio = false;
  std::int64_t iterations = 0;
  std::string halt;
};

// Compression ratio across the whole compressor stage: words entering the
// first compression iteration vs. the final summary.
void fill_ratio(const RunManifest& manifest, const NarrativeDocument& doc,
                SweepCell& cell) {
  std::int64_t before = -1;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    if (stage_slot(manifest.records[i].stage) == 2) {
      before = (i == 0) ? word_count(document_body(doc))
                        : manifest.records[i - 1].output_word_count;
      break;
    }
  }
  if (before >= 1) {
    cell.ratio = compression_ratio(static_cast<double>(before),
                                   static_cast<double>(cell.final_words));
    cell.has_ratio = true;
  }
}

int cmd_sweep(const RunFlags& flags, const std::string& theta_list,
              const std::string& delta_list, const std::string& out_dir) {
  if (theta_list.empty() && delta_list.empty()) {
    throw ConfigError("sweep needs at least one axis: --sweep-theta and/or "
                      "--sweep-delta");
  }
  std::optional<json> file;
  if (!flags.config_path.empty()) file = load_config_file(flags.config_path);
  RunOptions base = resolve_run_options(file, flags.overrides);
  const NarrativeDocument doc = load_document(base);

  std::vector<std::int64_t> thetas;
  if (!theta_list.empty()) thetas = parse_int_list(theta_list, "--sweep-theta");
  std::vector<std::int64_t> deltas;
  if (!delta_list.empty()) {
    for (const std::string& part : split_csv(delta_list)) {
      if (part == "max" || part == "maximum" || part == "unbounded") {
        deltas.push_back(kUnboundedDelta);
      } else {
        deltas.push_back(parse_int_list(part, "--sweep-delta").front());
      }
    }
  }
  if (thetas.empty()) thetas = {base.config.theta};
  if (deltas.empty()) deltas = {base.config.delta};

  std::vector<SweepCell> cells;
  for (std::int64_t delta : deltas) {
    for (std::int64_t theta : thetas) {
      SweepCell cell;
      cell.delta = delta;
      cell.theta = theta;
      PipelineConfig config = base.config;
      config.delta = delta;
      config.theta = theta;
      try {
        config.validate();
        std::unique_ptr<Backend> backend = make_backend(config.backend);
        std::optional<fs::path> checkpoint;
        if (!out_dir.empty()) {
          fs::path cell_dir =
              fs::path(out_dir) /
              ("delta" +
               (delta == kUnboundedDelta ? std::string("max")
                                         : std::to_string(delta)) +
               "_theta" + std::to_string(theta));
          fs::create_directories(cell_dir);
          checkpoint = cell_dir / "manifest.json";
        }
        RunManifest manifest = run_pipeline(doc, config, *backend, checkpoint);
        cell.ok = true;
        cell.final_words = word_count(manifest.final_summary);
        cell.iterations = manifest.iterations_used;
        cell.halt = manifest.halt_reason ? to_string(*manifest.halt_reason) : "-";
        if (theta >= 1) {
          cell.lar_value = lar(cell.final_words, theta);
          cell.has_lar = true;
        }
        fill_ratio(manifest, doc, cell);
        if (checkpoint) {
          write_text_file(checkpoint->parent_path() / "summary.txt",
                          manifest.final_summary);
        }
      } catch (const Error& e) {
        cell.error = e.what();
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      cells.push_back(std::move(cell));
    }
  }

  json report = json::array();
  std::vector<std::vector<std::string>> rows;
  bool any_ok = false;
  for (const SweepCell& cell : cells) {
    any_ok = any_ok || cell.ok;
    const std::string delta_str = cell.delta == kUnboundedDelta
                                      ? "max"
                                      : std::to_string(cell.delta);
    json cell_json = {{"delta", cell.delta == kUnboundedDelta ? json("max")
                                                              : json(cell.delta)},
                      {"theta", cell.theta}};
    if (cell.ok) {
      cell_json["final_words"] = cell.final_words;
      cell_json["lar"] = cell.has_lar ? json(cell.lar_value) : json();
      cell_json["compression_ratio"] = cell.has_ratio ? json(cell.ratio) : json();
      cell_json["iterations"] = cell.iterations;
      cell_json["halt_reason"] = cell.halt;
      rows.push_back({delta_str, std::to_string(cell.theta),
                      format_count(cell.final_words),
                      cell.has_lar ? format_real(cell.lar_value, 4) : "-",
                      cell.has_ratio ? format_real(cell.ratio, 4) : "-",
                      format_count(cell.iterations), cell.halt});
    } else {
      cell_json["error"] = cell.error;
      rows.push_back({delta_str, std::to_string(cell.theta), "-", "-", "-",
                      "-", "error: " + cell.error});
    }
    report.push_back(std::move(cell_json));
  }

  const std::string table =
      format_table({"delta", "theta", "final_words", "lar",
                    "compression_ratio", "iterations", "halt_reason"},
                   rows);
  if (flags.format == "json") {
    std::cout << report.dump(2) << '\n';
  } else {
    std::cout << table;
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_text_file(fs::path(out_dir) / "report.json", report.dump(2) + "\n");
    write_text_file(fs::path(out_dir) / "report.txt", table);
  }
  if (!any_ok) {
    throw Error(ErrorCategory::kBackend,
                "every sweep cell failed; first error: " + cells.front().error);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// metrics

void emit_report(const json& j, const std::string& table,
                 const std::string& format, const std::string& out_dir,
                 const std::string& csv = "") {
  if (format == "json") {
    std::cout << j.dump(2) << '\n';
  } else if (format == "csv" && !csv.empty()) {
    std::cout << csv;
  } else {
    std::cout << table;
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_text_file(fs::path(out_dir) / "report.json", j.dump(2) + "\n");
    write_text_file(fs::path(out_dir) / "report.txt", table);
    if (!csv.empty()) write_text_file(fs::path(out_dir) / "report.csv", csv);
  }
}

}  // namespace

RunOptions resolve_run_options(const std::optional<json>& config_file,
                               const CliOverrides& overrides) {
  std::string preset_name;
  json pipeline_part = json::object();
  RunOptions options;

  if (config_file) {
    for (auto it = config_file->begin(); it != config_file->end(); ++it) {
      const std::string& key = it.key();
      if (key == "preset") {
        preset_name = it.value().get<std::string>();
      } else if (key == "input") {
        options.input_path = it.value().get<std::string>();
      } else if (key == "medium") {
        options.medium = medium_from_string(it.value().get<std::string>());
      } else if (key == "output_dir") {
        options.output_dir = it.value().get<std::string>();
      } else if (key == "id") {
        options.doc_id = it.value().get<std::string>();
      } else {
        pipeline_part[key] = it.value();
      }
    }
  }
  if (overrides.preset) preset_name = *overrides.preset;

  options.config =
      preset_name.empty() ? PipelineConfig{} : preset_config(preset_name);
  options.config.apply_json(pipeline_part);
  options.config.apply_json(overrides_to_json(overrides));

  if (overrides.input) options.input_path = *overrides.input;
  if (overrides.medium) options.medium = medium_from_string(*overrides.medium);
  if (overrides.output_dir) options.output_dir = *overrides.output_dir;
  if (overrides.doc_id) options.doc_id = *overrides.doc_id;
  return options;
}

int main(int argc, const char* const* argv) {
  CLI::App app{"Hierarchical multi-agent narrative summarization pipeline"};
  app.require_subcommand(1);

  // run
  RunFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "run the pipeline on a document");
  add_run_flags(run_cmd, run_flags);
  run_cmd->add_flag("--resume", run_flags.resume,
                    "resume from an existing manifest in the output directory");

  // sweep
  RunFlags sweep_flags;
  std::string sweep_theta;
  std::string sweep_delta;
  std::string sweep_out;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "run the pipeline over a delta/theta grid");
  add_run_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--sweep-theta", sweep_theta, "comma list of theta values");
  sweep_cmd->add_option("--sweep-delta", sweep_delta,
                        "comma list of delta values ('max' allowed)");
  sweep_cmd->add_option("--sweep-out", sweep_out,
                        "directory for report.json/report.txt and per-cell runs");

  // metrics
  CLI::App* metrics_cmd = app.add_subcommand("metrics", "emit metric reports");
  metrics_cmd->require_subcommand(1);
  std::string m_format = "table";
  std::string m_out;

  // metrics lar
  CLI::App* lar_cmd = metrics_cmd->add_subcommand("lar", "length adherence rate");
  std::int64_t lar_generated_len = -1;
  std::string lar_generated_file;
  std::int64_t lar_target = 0;
  lar_cmd->add_option("--generated-len", lar_generated_len, "generated word count");
  lar_cmd->add_option("--generated", lar_generated_file,
                      "generated text file (word count taken from it)");
  lar_cmd->add_option("--target", lar_target, "target word count")->required();

  // metrics rouge
  CLI::App* rouge_cmd = metrics_cmd->add_subcommand("rouge", "ROUGE-1/2/L + G-M");
  std::string rouge_candidate;
  std::string rouge_reference;
  rouge_cmd->add_option("--candidate", rouge_candidate, "candidate text file")->required();
  rouge_cmd->add_option("--reference", rouge_reference, "reference text file")->required();

  // metrics contamination
  CLI::App* cont_cmd =
      metrics_cmd->add_subcommand("contamination", "n-gram overlap analysis");
  std::string cont_generated;
  std::string cont_reference;
  std::string cont_n = "4..8";
  cont_cmd->add_option("--generated", cont_generated, "generated text file")->required();
  cont_cmd->add_option("--reference", cont_reference, "reference text file")->required();
  cont_cmd->add_option("--n", cont_n, "n-gram sizes: '4..8', '4', or '4,6,8'");

  // metrics utilization
  CLI::App* util_cmd = metrics_cmd->add_subcommand(
      "utilization", "summary-sentence distribution over source deciles");
  std::string util_summary;
  std::string util_source;
  std::string util_reference;
  int util_bins = 10;
  util_cmd->add_option("--summary", util_summary, "summary text file")->required();
  util_cmd->add_option("--source", util_source, "source document file")->required();
  util_cmd->add_option("--reference", util_reference,
                       "reference summary file; adds KL(summary || reference)");
  util_cmd->add_option("--bins", util_bins, "segment count (default 10)");

  // metrics cost
  CLI::App* cost_cmd = metrics_cmd->add_subcommand("cost", "token cost model");
  double cost_n = 0.0;
  std::string cost_c;
  std::string cost_a;
  cost_cmd->add_option("--n", cost_n, "input tokens")->required();
  cost_cmd->add_option("--c", cost_c, "chunk sizes c1,c2,c3")->required();
  cost_cmd->add_option("--a", cost_a, "compression ratios a1,a2,a3")->required();

  for (CLI::App* sub : {lar_cmd, rouge_cmd, cont_cmd, util_cmd, cost_cmd}) {
    sub->add_option("--format", m_format, "table, json (utilization also csv)");
    sub->add_option("--out", m_out, "directory for report.json/report.txt");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      return app.exit(e);
    }
    std::stringstream dummy;
    app.exit(e, dummy, dummy);
    return report_error(ErrorCategory::kConfig, e.what());
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_flags);
    if (sweep_cmd->parsed()) {
      return cmd_sweep(sweep_flags, sweep_theta, sweep_delta, sweep_out);
    }

    if (lar_cmd->parsed()) {
      std::int64_t generated = lar_generated_len;
      if (!lar_generated_file.empty()) {
        generated = word_count(read_text_file(lar_generated_file));
      }
      if (generated < 0) {
        throw ConfigError("lar: give --generated-len or --generated");
      }
      LarReport report = lar_report(generated, lar_target);
      emit_report(to_json(report), to_table(report), m_format, m_out);
      return 0;
    }
    if (rouge_cmd->parsed()) {
      const std::vector<std::string> cand =
          metric_tokenize(read_text_file(rouge_candidate));
      const std::vector<std::string> ref =
          metric_tokenize(read_text_file(rouge_reference));
      const RougeScore r1 = rouge_n(cand, ref, 1);
      const RougeScore r2 = rouge_n(cand, ref, 2);
      const RougeScore rl = rouge_l(cand, ref);
      const double gm = rouge_geometric_mean(r1.f1, r2.f1, rl.f1);
      json j = {{"rouge_1", {{"precision", r1.precision}, {"recall", r1.recall}, {"f1", r1.f1}}},
                {"rouge_2", {{"precision", r2.precision}, {"recall", r2.recall}, {"f1", r2.f1}}},
                {"rouge_l", {{"precision", rl.precision}, {"recall", rl.recall}, {"f1", rl.f1}}},
                {"geometric_mean", gm}};
      auto row = [](const char* name, const RougeScore& s) {
        return std::vector<std::string>{name, format_real(s.precision),
                                        format_real(s.recall), format_real(s.f1)};
      };
      std::string table = format_table(
          {"metric", "precision", "recall", "f1"},
          {row("rouge_1", r1), row("rouge_2", r2), row("rouge_l", rl),
           {"geometric_mean", "", "", format_real(gm)}});
      emit_report(j, table, m_format, m_out);
      return 0;
    }
    if (cont_cmd->parsed()) {
      const std::string generated = read_text_file(cont_generated);
      const std::string reference = read_text_file(cont_reference);
      ContaminationReport report;
      for (int n : parse_n_range(cont_n)) {
        report.per_n[n] = ngram_overlap(generated, reference, n);
      }
      emit_report(to_json(report), to_table(report), m_format, m_out);
      return 0;
    }
    if (util_cmd->parsed()) {
      const std::string summary = read_text_file(util_summary);
      const std::string source = read_text_file(util_source);
      std::vector<std::string> sentences;
      for (const Sentence& s : split_sentences(summary)) sentences.push_back(s.text);
      UtilizationHistogram histogram =
          document_utilization(sentences, source, util_bins);
      json j = to_json(histogram);
      if (!util_reference.empty()) {
        std::vector<std::string> ref_sentences;
        for (const Sentence& s : split_sentences(read_text_file(util_reference))) {
          ref_sentences.push_back(s.text);
        }
        UtilizationHistogram ref_histogram =
            document_utilization(ref_sentences, source, util_bins);
        j["reference_bins"] = ref_histogram.bins;
        j["kl_divergence"] = kl_divergence(histogram.bins, ref_histogram.bins);
      }
      std::string table = to_table(histogram);
      if (j.contains("kl_divergence")) {
        table += "kl_divergence: " +
                 format_real(j["kl_divergence"].get<double>(), 6) + "\n";
      }
      emit_report(j, table, m_format, m_out, to_csv(histogram));
      return 0;
    }
    if (cost_cmd->parsed()) {
      std::vector<std::string> c_parts = split_csv(cost_c);
      std::vector<std::string> a_parts = split_csv(cost_a);
      if (c_parts.size() != 3 || a_parts.size() != 3) {
        throw ConfigError("cost: --c and --a take exactly three values");
      }
      auto to_real = [](const std::string& s, const char* what) {
        try {
          return std::stod(s);
        } catch (const std::exception&) {
          throw ConfigError(std::string(what) + ": '" + s + "' is not a number");
        }
      };
      CostEstimate estimate = estimate_cost(
          cost_n, to_real(c_parts[0], "--c"), to_real(c_parts[1], "--c"),
          to_real(c_parts[2], "--c"), to_real(a_parts[0], "--a"),
          to_real(a_parts[1], "--a"), to_real(a_parts[2], "--a"));
      emit_report(to_json(estimate), to_table(estimate), m_format, m_out);
      return 0;
    }
    return report_error(ErrorCategory::kConfig, "no subcommand given");
  } catch (const Error& e) {
    return report_error(e.category(), e.what());
  } catch (const std::exception& e) {
    return report_error(ErrorCategory::kInternal, e.what());
  }
}

}  // namespace nexussum::cli
