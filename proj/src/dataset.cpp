#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "parallel.hpp"
#include "tomonet/error.hpp"
#include "tomonet/pipeline.hpp"

namespace tomonet {

using nlohmann::json;

MeasurementSet measurement_set_for(const ExperimentConfig& cfg) {
  MeasurementSet full = full_pauli_set(cfg.n_qubits);
  if (cfg.effective_subset_size() == full.size()) return full;
  return random_subset(full, cfg.subset_size, derive_seed(cfg.seed, {hash_tag("selection")}));
}

DatasetRecord generate_record(const ExperimentConfig& cfg, const MeasurementSet& set, Split split,
                              std::uint64_t id) {
  const std::uint64_t split_key = hash_tag(to_string(split));
  RandomStream rng(derive_seed(cfg.seed, {split_key, id}));
  DatasetRecord r;
  r.id = id;

  std::optional<DensityMatrix> ideal;
  if (cfg.mix == StateMix::Pure) {
    if (rng.uniform() < 0.5) {
      const double theta = rng.uniform(0.0, std::numbers::pi / 2);
      r.family = StateFamily::GhzLike;
      r.params = {{"theta", theta}};
      ideal = DensityMatrix::from_pure(ghz_like(cfg.n_qubits, theta));
    } else {
      const auto k = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(cfg.n_qubits)));
      r.family = StateFamily::Dicke;
      r.params = {{"k", k}};
      ideal = DensityMatrix::from_pure(dicke(cfg.n_qubits, k));
    }
  } else {
    const std::uint64_t state_seed = rng.next();
    RandomStream state_rng(state_seed);
    r.family = StateFamily::Mixed;
    r.params = {{"seed", state_seed}};
    ideal = random_mixed_hs(cfg.n_qubits, state_rng);
  }

  CorruptedState noisy = corrupt(*ideal, cfg.noise, rng);
  r.noise = noisy.draw;
  r.f_noisy = noisy.fidelity;

  if (cfg.shots) {
    RandomStream shot_rng(derive_seed(cfg.seed, {split_key, id, hash_tag("shots"), *cfg.shots}));
    r.data = sample_cube_shots(noisy.state, set, *cfg.shots, shot_rng).values;
  } else {
    r.data = exact_expectations(noisy.state, set).values;
  }
  r.target = state_to_params(*ideal).alpha;
  return r;
}

Dataset generate_dataset(const ExperimentConfig& cfg, Split split, const RunOptions& opts) {
  cfg.validate();
  const MeasurementSet set = measurement_set_for(cfg);
  Dataset ds;
  ds.n_qubits = cfg.n_qubits;
  ds.measurement_labels = set.labels();
  ds.selection_seed = set.selection_seed;
  ds.shots = cfg.shots;
  ds.config_hash = cfg.hash();
  ds.split = split;
  const std::size_t count = split == Split::Train ? cfg.train_size : cfg.test_size;
  ds.records.resize(count);

  detail::parallel_for(count, opts.threads,
                       [&](std::size_t i) { ds.records[i] = generate_record(cfg, set, split, i); });
  opts.info("generated " + std::to_string(count) + " " + to_string(split) + " records");
  return ds;
}

DensityMatrix record_state(const Dataset& ds, const DatasetRecord& r) {
  return params_to_state(ParamVector{ds.n_qubits, r.target});
}

namespace {

json header_json(const Dataset& ds) {
  return json{{"version", kDatasetVersion},
              {"n_qubits", ds.n_qubits},
              {"measurement_set", ds.measurement_labels},
              {"selection_seed", ds.selection_seed ? json(*ds.selection_seed) : json(nullptr)},
              {"shots", ds.shots ? json(*ds.shots) : json(nullptr)},
              {"config_hash", ds.config_hash},
              {"split", to_string(ds.split)}};
}

json record_json(const DatasetRecord& r) {
  json noise;
  for (ChannelKind k : kChannelOrder) noise[std::string(to_string(k))] = r.noise[k];
  return json{{"id", r.id},         {"family", to_string(r.family)}, {"params", r.params}, {"noise_draw", noise},
              {"data", r.data},     {"target", r.target},            {"f_noisy", r.f_noisy}};
}

[[noreturn]] void bad_dataset(const std::string& why) {
  throw Error(ErrorKind::CorruptPayload, "dataset: " + why);
}

}  // namespace

std::string dataset_to_ndjson(const Dataset& ds) {
  std::string out = header_json(ds).dump();
  out.push_back('\n');
  for (const auto& r : ds.records) {
    out += record_json(r).dump();
    out.push_back('\n');
  }
  return out;
}

Dataset dataset_from_ndjson(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) bad_dataset("missing header line");
  Dataset ds;
  try {
    const json h = json::parse(line);
    if (h.at("version").get<int>() != kDatasetVersion)
      throw Error(ErrorKind::VersionMismatch, "dataset version " + h.at("version").dump() + " is not supported");
    ds.n_qubits = h.at("n_qubits").get<std::size_t>();
    ds.measurement_labels = h.at("measurement_set").get<std::vector<std::string>>();
    if (!h.at("selection_seed").is_null()) ds.selection_seed = h.at("selection_seed").get<std::uint64_t>();
    if (!h.at("shots").is_null()) ds.shots = h.at("shots").get<std::uint64_t>();
    ds.config_hash = h.at("config_hash").get<std::string>();
    ds.split = h.at("split").get<std::string>() == "test" ? Split::Test : Split::Train;

    const std::size_t n_params = param_count(ds.n_qubits);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      DatasetRecord r;
      r.id = j.at("id").get<std::uint64_t>();
      r.family = family_from_string(j.at("family").get<std::string>());
      r.params = j.at("params");
      for (ChannelKind k : kChannelOrder)
        r.noise.strength[static_cast<std::size_t>(k)] = j.at("noise_draw").at(std::string(to_string(k))).get<double>();
      r.data = j.at("data").get<std::vector<double>>();
      r.target = j.at("target").get<std::vector<double>>();
      r.f_noisy = j.at("f_noisy").get<double>();
      if (r.data.size() != ds.measurement_labels.size()) bad_dataset("record data length differs from measurement set");
      if (r.target.size() != n_params) bad_dataset("record target length differs from 4^n");
      ds.records.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    bad_dataset(e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) bad_dataset(e.what());
    throw;
  }
  return ds;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorKind::Io, "short write to " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) { write_text(path, dataset_to_ndjson(ds)); }

Dataset read_dataset(const std::filesystem::path& path) { return dataset_from_ndjson(read_text(path)); }

Matrix dataset_inputs(const Dataset& ds, std::size_t begin, std::size_t end) {
  const std::size_t width = ds.measurement_labels.size();
  Matrix x(static_cast<Eigen::Index>(end - begin), static_cast<Eigen::Index>(width));
  for (std::size_t i = begin; i < end; ++i)
    for (std::size_t c = 0; c < width; ++c)
      x(static_cast<Eigen::Index>(i - begin), static_cast<Eigen::Index>(c)) = ds.records[i].data[c];
  return x;
}

Matrix encoded_targets(const Dataset& ds, const Bounds& b, std::size_t n_sec, std::size_t begin, std::size_t end) {
  const std::size_t width = param_count(ds.n_qubits) * (n_sec + 1);
  Matrix t(static_cast<Eigen::Index>(end - begin), static_cast<Eigen::Index>(width));
  for (std::size_t i = begin; i < end; ++i) {
    const EncodedVector y = onehot_encode(ParamVector{ds.n_qubits, ds.records[i].target}, b, n_sec);
    for (std::size_t c = 0; c < width; ++c)
      t(static_cast<Eigen::Index>(i - begin), static_cast<Eigen::Index>(c)) = y.values[c];
  }
  return t;
}

}  // namespace tomonet
