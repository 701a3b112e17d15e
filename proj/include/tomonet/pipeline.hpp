#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tomonet/codec.hpp"
#include "tomonet/measurement.hpp"
#include "tomonet/mlp.hpp"
#include "tomonet/noise.hpp"

namespace tomonet {

enum class StateFamily { GhzLike, Dicke, Mixed };
/// Pure: equal GHZ-like / Dicke mixture. Mixed: Hilbert-Schmidt random states.
enum class StateMix { Pure, Mixed };
enum class Split { Train, Test };

std::string to_string(StateFamily f);
std::string to_string(StateMix m);
std::string to_string(Split s);
StateFamily family_from_string(const std::string& s);
StateMix mix_from_string(const std::string& s);

struct ExperimentConfig {
  std::string name = "custom";
  std::size_t n_qubits = 2;
  StateMix mix = StateMix::Mixed;
  NoiseConfig noise;
  std::size_t subset_size = 0;  // 0: full informationally complete set
  std::optional<std::uint64_t> shots;  // empty: exact expectations
  std::vector<std::uint64_t> shot_sweep;  // non-empty: one run per shot count
  std::size_t train_size = 20000;
  std::size_t test_size = 1000;
  std::size_t n_sec = kDefaultSectors;
  double bounds_margin = kDefaultBoundsMargin;
  std::size_t hidden_layers = 3;
  std::size_t hidden_width = 0;  // 0: hidden_width(n_qubits)
  TrainConfig train;
  std::uint64_t seed = 1;
  double report_window_f_min = 0.0;  // extra aggregates over F_noisy >= this

  void validate() const;
  std::size_t effective_subset_size() const;
  std::size_t effective_hidden_width() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  /// Hex FNV-1a of the canonical JSON form.
  std::string hash() const;
};

enum class Scale { Desk, Paper };

struct PresetResult {
  ExperimentConfig config;
  std::vector<std::string> warnings;
};

/// fig2 | fig3 | fig4 | fig5.
PresetResult preset(const std::string& name, Scale scale);

/// INI-style file with [experiment], [noise] and [train] sections. An
/// optional `preset` / `scale` key in [experiment] seeds the defaults;
/// `default_seed` applies when the file sets no seed.
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> default_seed = std::nullopt);

/// Measurement set selected by the config (full set or seeded subset).
MeasurementSet measurement_set_for(const ExperimentConfig& cfg);

struct DatasetRecord {
  std::uint64_t id = 0;
  StateFamily family = StateFamily::Mixed;
  nlohmann::json params;  // theta | k | seed
  NoiseDraw noise;
  std::vector<double> data;
  std::vector<double> target;
  double f_noisy = 1.0;
};

struct Dataset {
  std::size_t n_qubits = 0;
  std::vector<std::string> measurement_labels;
  std::optional<std::uint64_t> selection_seed;
  std::optional<std::uint64_t> shots;
  std::string config_hash;
  Split split = Split::Train;
  std::vector<DatasetRecord> records;
};

inline constexpr int kDatasetVersion = 1;

struct RunOptions {
  std::size_t threads = 1;
  std::function<void(const std::string&)> log;

  void info(const std::string& msg) const {
    if (log) log(msg);
  }
};

/// One record; deterministic in (cfg.seed, split, id).
DatasetRecord generate_record(const ExperimentConfig& cfg, const MeasurementSet& set, Split split,
                              std::uint64_t id);
Dataset generate_dataset(const ExperimentConfig& cfg, Split split, const RunOptions& opts = {});

/// Noise-free state behind a record, rebuilt from its target parameters.
DensityMatrix record_state(const Dataset& ds, const DatasetRecord& r);

std::string dataset_to_ndjson(const Dataset& ds);
Dataset dataset_from_ndjson(const std::string& text);
void write_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

Matrix dataset_inputs(const Dataset& ds, std::size_t begin, std::size_t end);
Matrix encoded_targets(const Dataset& ds, const Bounds& b, std::size_t n_sec, std::size_t begin, std::size_t end);

/// Bounds from the training split, then seeded mini-batch Adam.
Checkpoint train(const ExperimentConfig& cfg, const Dataset& train_set, const RunOptions& opts = {});

/// Loss of a model over a whole dataset, evaluated in chunks.
double dataset_loss(const MlpModel& m, const Dataset& ds);

struct EvalRow {
  std::uint64_t id = 0;
  StateFamily family = StateFamily::Mixed;
  double f_noisy = 0, f_rec = 0;
  double purity_ori = 0, purity_rec = 0;
  double negativity_ori = 0, negativity_rec = 0;
  double d_purity = 0, d_negativity = 0;
};

struct EvalAggregates {
  std::size_t count = 0;
  double mean_f_noisy = 0, mean_f_rec = 0, median_f_rec = 0, variance_f_rec = 0;
  double fraction_above_diagonal = 0;
  double worst_infidelity = 0, median_infidelity = 0;
  double median_d_purity = 0, median_d_negativity = 0;
  // restricted to rows with 1 - F_rec <= 0.1
  std::size_t low_infidelity_count = 0;
  double low_infidelity_median_d_purity = 0, low_infidelity_median_d_negativity = 0;
  // restricted to rows with F_noisy >= window_f_min
  double window_f_min = 0;
  std::size_t window_count = 0;
  double window_fraction_above_diagonal = 0, window_mean_f_rec = 0, window_mean_f_noisy = 0;

  nlohmann::json to_json() const;
};

inline constexpr double kDeviationWindowInfidelity = 0.1;

EvalAggregates compute_aggregates(const std::vector<EvalRow>& rows, double window_f_min = 0.0);

struct EvalReport {
  std::vector<EvalRow> rows;
  EvalAggregates aggregates;
};

/// Throws SelectionMismatch when the checkpoint and dataset disagree on the
/// measurement selection.
EvalReport evaluate(const Checkpoint& ck, const Dataset& test_set, const RunOptions& opts = {},
                    double window_f_min = 0.0);

std::string report_csv(const EvalReport& r);

struct ExperimentOutput {
  std::uint64_t shots = 0;  // 0: exact
  EvalReport report;
  std::filesystem::path dir;
};

/// Full run under `out`: datasets, checkpoint, report.csv, aggregates.json and
/// manifest.json. A shot sweep writes one subdirectory per shot count plus
/// sweep.json.
std::vector<ExperimentOutput> run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                             const RunOptions& opts = {});

nlohmann::json make_manifest(const std::string& command, const ExperimentConfig& cfg);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace tomonet
