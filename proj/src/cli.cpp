#include "tomonet/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "tomonet/pipeline.hpp"

namespace tomonet::cli {

using nlohmann::json;

ExitCode exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::RejectionExhausted:
    case ErrorKind::NotPSD:
    case ErrorKind::NotHermitian:
    case ErrorKind::ZeroTrace:
    case ErrorKind::NonSquare:
      return kNumericalError;
    default:
      return kDataError;
  }
}

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  bool verbose = false;
};

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("TOMONET_SEED");
  if (!s || !*s) return std::nullopt;
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw Error(ErrorKind::Config, std::string("TOMONET_SEED is not an integer: ") + s);
  }
}

void apply_seed(ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.seed = seed;
  cfg.train.seed = seed;
}

/// Config file, then TOMONET_SEED when the file sets no seed, then --seed.
ExperimentConfig resolve_config(const Common& c) {
  ExperimentConfig cfg = load_config(c.config, env_seed());
  if (c.seed) apply_seed(cfg, *c.seed);
  cfg.validate();
  return cfg;
}

RunOptions options(const Common& c, std::ostream& err) {
  RunOptions o;
  o.threads = std::max<std::size_t>(1, c.threads);
  if (c.verbose) o.log = [&err](const std::string& m) { err << m << '\n'; };
  return o;
}

void write_manifest(const std::filesystem::path& out, const json& manifest) {
  std::filesystem::create_directories(out);
  write_text(out / "manifest.json", manifest.dump(2) + "\n");
}

void gen_data(const ExperimentConfig& cfg, const std::filesystem::path& out, const RunOptions& opts) {
  std::filesystem::create_directories(out);
  write_manifest(out, make_manifest("gen-data", cfg));
  write_dataset(generate_dataset(cfg, Split::Train, opts), out / "train.ndjson");
  write_dataset(generate_dataset(cfg, Split::Test, opts), out / "test.ndjson");
}

void train_cmd(const ExperimentConfig& cfg, const std::filesystem::path& data, const std::filesystem::path& out,
               const RunOptions& opts) {
  const Dataset ds = read_dataset(data);
  json manifest = make_manifest("train", cfg);
  manifest["data"] = std::filesystem::absolute(data).string();
  write_manifest(out, manifest);
  save_checkpoint(train(cfg, ds, opts), out / "model.ck");
}

void eval_cmd(const std::filesystem::path& ckpt, const std::filesystem::path& data, const std::filesystem::path& out,
              double window, const RunOptions& opts) {
  const Checkpoint ck = load_checkpoint(ckpt);
  const Dataset ds = read_dataset(data);
  const EvalReport report = evaluate(ck, ds, opts, window);
  write_manifest(out, json{{"tool", "tomonet"},
                           {"manifest_version", 1},
                           {"command", "eval"},
                           {"ckpt", std::filesystem::absolute(ckpt).string()},
                           {"data", std::filesystem::absolute(data).string()},
                           {"window_f_min", window}});
  write_text(out / "report.csv", report_csv(report));
  write_text(out / "aggregates.json", report.aggregates.to_json().dump(2) + "\n");
}

void rerun_manifest(const std::filesystem::path& path, const std::filesystem::path& out, const RunOptions& opts) {
  json m;
  try {
    m = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("unreadable manifest: ") + e.what());
  }
  const std::string command = m.value("command", "");
  if (command == "eval") {
    eval_cmd(m.at("ckpt").get<std::string>(), m.at("data").get<std::string>(), out, m.at("window_f_min").get<double>(),
             opts);
    return;
  }
  if (!m.contains("config")) throw Error(ErrorKind::Config, "manifest has no config");
  const ExperimentConfig cfg = ExperimentConfig::from_json(m.at("config"));
  if (command == "reproduce") run_experiment(cfg, out, opts);
  else if (command == "gen-data") gen_data(cfg, out, opts);
  else if (command == "train") train_cmd(cfg, m.at("data").get<std::string>(), out, opts);
  else throw Error(ErrorKind::Config, "manifest command '" + command + "' is not rerunnable");
}

void add_common(CLI::App* app, Common& c, bool needs_config) {
  auto* opt = app->add_option("--config", c.config, "experiment config file");
  if (needs_config) opt->required();
  app->add_option("--out", c.out, "output directory")->required();
  app->add_option("--seed", c.seed, "master seed override");
  app->add_option("--threads", c.threads, "worker thread cap");
  app->add_flag("-v,--verbose", c.verbose, "progress on stderr");
}

}  // namespace

void inspect(const std::filesystem::path& path, std::ostream& out) {
  const std::string bytes = read_text(path);
  if (bytes.rfind("TOMONET", 0) == 0) {
    const Checkpoint ck = deserialize_checkpoint(bytes);
    out << "checkpoint " << path.string() << "\n";
    out << "  format version: " << kCheckpointVersion << "\n";
    out << "  layer_dims: [";
    for (std::size_t i = 0; i < ck.model.layer_dims.size(); ++i) out << (i ? ", " : "") << ck.model.layer_dims[i];
    out << "]\n";
    out << "  N_sec: " << ck.model.n_sec << "\n";
    out << "  leak: " << ck.model.leak << "\n";
    out << "  n_qubits: " << ck.meta.n_qubits << "\n";
    out << "  parameters: " << ck.model.parameter_count() << "\n";
    out << "  measurements: " << ck.meta.measurement_labels.size();
    if (ck.meta.selection_seed) out << " (selection seed " << *ck.meta.selection_seed << ")";
    out << "\n";
    out << "  epochs: " << ck.meta.epochs << ", final loss: " << ck.meta.final_loss << "\n";
    out << "  config hash: " << ck.meta.config_hash << "\n";
    return;
  }
  const Dataset ds = dataset_from_ndjson(bytes);
  out << "dataset " << path.string() << "\n";
  out << "  format version: " << kDatasetVersion << "\n";
  out << "  split: " << to_string(ds.split) << "\n";
  out << "  n_qubits: " << ds.n_qubits << "\n";
  out << "  records: " << ds.records.size() << "\n";
  out << "  measurements: " << ds.measurement_labels.size();
  if (ds.selection_seed) out << " (selection seed " << *ds.selection_seed << ")";
  out << "\n";
  out << "  shots: " << (ds.shots ? std::to_string(*ds.shots) : std::string("exact")) << "\n";
  out << "  config hash: " << ds.config_hash << "\n";
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neural-network quantum state tomography with noise mitigation", "tomonet"};
  app.require_subcommand(1);

  Common gen_opts, train_opts, eval_opts, repro_opts;
  auto* gen = app.add_subcommand("gen-data", "generate train/test datasets from a config");
  add_common(gen, gen_opts, true);

  std::string train_data;
  auto* tr = app.add_subcommand("train", "train a model on a dataset");
  add_common(tr, train_opts, true);
  tr->add_option("--data", train_data, "training dataset (ndjson)")->required();

  std::string eval_ckpt, eval_data;
  double eval_window = 0.0;
  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  ev->add_option("--ckpt", eval_ckpt, "checkpoint file")->required();
  ev->add_option("--data", eval_data, "test dataset (ndjson)")->required();
  ev->add_option("--out", eval_opts.out, "output directory")->required();
  ev->add_option("--window-f-min", eval_window, "extra aggregates over F_noisy >= value");
  ev->add_option("--threads", eval_opts.threads, "worker thread cap");
  ev->add_flag("-v,--verbose", eval_opts.verbose, "progress on stderr");

  std::string repro_name, repro_scale = "desk", repro_manifest;
  std::optional<std::size_t> repro_train, repro_test, repro_epochs;
  auto* rep = app.add_subcommand("reproduce", "run a figure preset end to end, or rerun a manifest");
  rep->add_option("preset", repro_name, "fig2 | fig3 | fig4 | fig5");
  rep->add_option("--scale", repro_scale, "desk | paper")->check(CLI::IsMember({"desk", "paper"}));
  rep->add_option("--manifest", repro_manifest, "rerun from a manifest.json");
  rep->add_option("--train-size", repro_train, "override training set size");
  rep->add_option("--test-size", repro_test, "override test set size");
  rep->add_option("--epochs", repro_epochs, "override epoch count");
  add_common(rep, repro_opts, false);

  std::string inspect_path;
  auto* ins = app.add_subcommand("inspect", "summarize a dataset or checkpoint");
  ins->add_option("path", inspect_path, "file to inspect")->required();

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  if (!args.empty()) args.pop_back();  // program name
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*gen) {
      gen_data(resolve_config(gen_opts), gen_opts.out, options(gen_opts, err));
    } else if (*tr) {
      train_cmd(resolve_config(train_opts), train_data, train_opts.out, options(train_opts, err));
    } else if (*ev) {
      eval_cmd(eval_ckpt, eval_data, eval_opts.out, eval_window, options(eval_opts, err));
    } else if (*rep) {
      const RunOptions opts = options(repro_opts, err);
      if (!repro_manifest.empty()) {
        rerun_manifest(repro_manifest, repro_opts.out, opts);
        return kOk;
      }
      if (repro_name.empty()) {
        err << "error: usage: reproduce needs a preset name or --manifest\n";
        return kUsage;
      }
      const auto p = preset(repro_name, repro_scale == "paper" ? Scale::Paper : Scale::Desk);
      for (const auto& w : p.warnings) err << "warning: " << w << "\n";
      ExperimentConfig cfg = p.config;
      if (!repro_opts.config.empty()) cfg = resolve_config(repro_opts);
      else if (auto s = env_seed()) apply_seed(cfg, *s);
      if (repro_opts.seed) apply_seed(cfg, *repro_opts.seed);
      if (repro_train) cfg.train_size = *repro_train;
      if (repro_test) cfg.test_size = *repro_test;
      if (repro_epochs) cfg.train.epochs = *repro_epochs;
      cfg.validate();
      const auto results = run_experiment(cfg, repro_opts.out, opts);
      for (const auto& r : results) {
        const auto& a = r.report.aggregates;
        out << r.dir.string() << ": shots=" << (r.shots ? std::to_string(r.shots) : std::string("exact"))
            << " mean_f_noisy=" << a.mean_f_noisy << " mean_f_rec=" << a.mean_f_rec
            << " above_diagonal=" << a.fraction_above_diagonal << "\n";
      }
    } else if (*ins) {
      inspect(inspect_path, out);
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: Io: " << e.what() << "\n";
    return kDataError;
  } catch (const json::exception& e) {
    err << "error: Config: " << e.what() << "\n";
    return kDataError;
  }
  return kOk;
}

}  // namespace tomonet::cli
