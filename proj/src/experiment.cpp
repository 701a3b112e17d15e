#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "parallel.hpp"
#include "tomonet/error.hpp"
#include "tomonet/pipeline.hpp"

namespace tomonet {

using nlohmann::json;

namespace {

constexpr std::size_t kEvalChunk = 256;

std::vector<std::size_t> shuffled_indices(std::size_t n, RandomStream& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

Matrix gather_targets(const Dataset& ds, const Bounds& b, std::size_t n_sec, std::span<const std::size_t> rows) {
  const std::size_t width = param_count(ds.n_qubits) * (n_sec + 1);
  Matrix t = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const EncodedVector y = onehot_encode(ParamVector{ds.n_qubits, ds.records[rows[i]].target}, b, n_sec);
    for (std::size_t c = 0; c < width; ++c)
      if (y.values[c] != 0.0) t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = y.values[c];
  }
  return t;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double dataset_loss(const MlpModel& m, const Dataset& ds) {
  double total = 0.0;
  for (std::size_t begin = 0; begin < ds.records.size(); begin += kEvalChunk) {
    const std::size_t end = std::min(ds.records.size(), begin + kEvalChunk);
    const double chunk = loss_only(m, dataset_inputs(ds, begin, end), encoded_targets(ds, m.bounds, m.n_sec, begin, end));
    total += chunk * static_cast<double>(end - begin);
  }
  return total / static_cast<double>(ds.records.size());
}

Checkpoint train(const ExperimentConfig& cfg, const Dataset& train_set, const RunOptions& opts) {
  cfg.validate();
  if (train_set.records.empty()) throw Error(ErrorKind::InvalidArgument, "training set is empty");
  if (train_set.n_qubits != cfg.n_qubits) throw Error(ErrorKind::DimensionMismatch, "dataset qubit count differs from config");

  std::vector<ParamVector> params;
  params.reserve(train_set.records.size());
  for (const auto& r : train_set.records) params.push_back(ParamVector{train_set.n_qubits, r.target});
  const Bounds bounds = estimate_bounds(params, cfg.bounds_margin);

  std::vector<std::size_t> dims{train_set.measurement_labels.size()};
  for (std::size_t i = 0; i < cfg.hidden_layers; ++i) dims.push_back(cfg.effective_hidden_width());
  dims.push_back(param_count(cfg.n_qubits) * (cfg.n_sec + 1));
  RandomStream init_rng(derive_seed(cfg.train.seed, {hash_tag("init")}));
  Checkpoint ck{init_model(dims, cfg.n_sec, init_rng), {}};
  MlpModel& model = ck.model;
  model.bounds = bounds;

  const std::size_t n = train_set.records.size();
  const Matrix inputs = dataset_inputs(train_set, 0, n);
  AdamState adam = AdamState::for_model(model);
  for (std::size_t epoch = 0; epoch < cfg.train.epochs; ++epoch) {
    RandomStream shuffle_rng(derive_seed(cfg.train.seed, {hash_tag("shuffle"), epoch}));
    const auto order = shuffled_indices(n, shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < n; begin += cfg.train.batch_size) {
      const std::size_t end = std::min(n, begin + cfg.train.batch_size);
      const std::span<const std::size_t> rows(order.data() + begin, end - begin);
      const auto lg = loss_and_grad(model, gather_rows(inputs, rows), gather_targets(train_set, bounds, cfg.n_sec, rows));
      adam_step(model, lg.grads, adam, cfg.train);
      epoch_loss += lg.loss * static_cast<double>(end - begin);
    }
    ck.meta.epoch_losses.push_back(epoch_loss / static_cast<double>(n));
    opts.info("epoch " + std::to_string(epoch + 1) + "/" + std::to_string(cfg.train.epochs) +
              " loss " + fmt_double(ck.meta.epoch_losses.back()));
  }

  ck.meta.n_qubits = cfg.n_qubits;
  ck.meta.measurement_labels = train_set.measurement_labels;
  ck.meta.selection_seed = train_set.selection_seed;
  ck.meta.subset_size = train_set.measurement_labels.size();
  ck.meta.train_seed = cfg.train.seed;
  ck.meta.epochs = cfg.train.epochs;
  ck.meta.config_hash = cfg.hash();
  ck.meta.final_loss = dataset_loss(model, train_set);
  return ck;
}

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

EvalAggregates compute_aggregates(const std::vector<EvalRow>& rows, double window_f_min) {
  EvalAggregates a;
  a.count = rows.size();
  a.window_f_min = window_f_min;
  if (rows.empty()) return a;

  std::vector<double> f_rec, f_noisy, infid, dp, dn, low_dp, low_dn, win_rec, win_noisy;
  std::size_t above = 0, win_above = 0;
  for (const auto& r : rows) {
    f_rec.push_back(r.f_rec);
    f_noisy.push_back(r.f_noisy);
    infid.push_back(1.0 - r.f_rec);
    dp.push_back(r.d_purity);
    dn.push_back(r.d_negativity);
    if (r.f_rec > r.f_noisy) ++above;
    if (1.0 - r.f_rec <= kDeviationWindowInfidelity) {
      low_dp.push_back(r.d_purity);
      low_dn.push_back(r.d_negativity);
    }
    if (r.f_noisy >= window_f_min) {
      win_rec.push_back(r.f_rec);
      win_noisy.push_back(r.f_noisy);
      if (r.f_rec > r.f_noisy) ++win_above;
    }
  }
  const double count = static_cast<double>(rows.size());
  a.mean_f_noisy = mean_of(f_noisy);
  a.mean_f_rec = mean_of(f_rec);
  a.median_f_rec = median_of(f_rec);
  double var = 0.0;
  for (double f : f_rec) var += (f - a.mean_f_rec) * (f - a.mean_f_rec);
  a.variance_f_rec = var / count;
  a.fraction_above_diagonal = static_cast<double>(above) / count;
  a.worst_infidelity = *std::max_element(infid.begin(), infid.end());
  a.median_infidelity = median_of(infid);
  a.median_d_purity = median_of(dp);
  a.median_d_negativity = median_of(dn);
  a.low_infidelity_count = low_dp.size();
  a.low_infidelity_median_d_purity = median_of(low_dp);
  a.low_infidelity_median_d_negativity = median_of(low_dn);
  a.window_count = win_rec.size();
  if (!win_rec.empty()) {
    a.window_fraction_above_diagonal = static_cast<double>(win_above) / static_cast<double>(win_rec.size());
    a.window_mean_f_rec = mean_of(win_rec);
    a.window_mean_f_noisy = mean_of(win_noisy);
  }
  return a;
}

json EvalAggregates::to_json() const {
  return json{{"count", count},
              {"mean_f_noisy", mean_f_noisy},
              {"mean_f_rec", mean_f_rec},
              {"median_f_rec", median_f_rec},
              {"variance_f_rec", variance_f_rec},
              {"fraction_above_diagonal", fraction_above_diagonal},
              {"worst_infidelity", worst_infidelity},
              {"median_infidelity", median_infidelity},
              {"median_d_purity", median_d_purity},
              {"median_d_negativity", median_d_negativity},
              {"low_infidelity",
               {{"max_infidelity", kDeviationWindowInfidelity},
                {"count", low_infidelity_count},
                {"median_d_purity", low_infidelity_median_d_purity},
                {"median_d_negativity", low_infidelity_median_d_negativity}}},
              {"window",
               {{"f_noisy_min", window_f_min},
                {"count", window_count},
                {"fraction_above_diagonal", window_fraction_above_diagonal},
                {"mean_f_rec", window_mean_f_rec},
                {"mean_f_noisy", window_mean_f_noisy}}}};
}

EvalReport evaluate(const Checkpoint& ck, const Dataset& test_set, const RunOptions& opts, double window_f_min) {
  if (ck.meta.n_qubits != test_set.n_qubits || ck.meta.measurement_labels != test_set.measurement_labels ||
      ck.meta.selection_seed != test_set.selection_seed)
    throw Error(ErrorKind::SelectionMismatch, "checkpoint measurement selection does not match the dataset");
  ck.model.validate();

  const std::size_t n = test_set.records.size();
  EvalReport report;
  report.rows.resize(n);
  for (std::size_t begin = 0; begin < n; begin += kEvalChunk) {
    const std::size_t end = std::min(n, begin + kEvalChunk);
    const Matrix probs = forward_batch(ck.model, dataset_inputs(test_set, begin, end));
    detail::parallel_for(end - begin, opts.threads, [&](std::size_t i) {
      const auto& rec = test_set.records[begin + i];
      const auto row = probs.row(static_cast<Eigen::Index>(i));
      const EncodedVector y{ck.model.n_sec, std::vector<double>(row.data(), row.data() + row.size())};
      const DensityMatrix reconstructed = params_to_state(onehot_decode(y, ck.model.bounds, test_set.n_qubits));
      const DensityMatrix original = record_state(test_set, rec);

      EvalRow& out = report.rows[begin + i];
      out.id = rec.id;
      out.family = rec.family;
      out.f_noisy = rec.f_noisy;
      out.f_rec = fidelity(original, reconstructed);
      out.purity_ori = purity(original);
      out.purity_rec = purity(reconstructed);
      if (test_set.n_qubits >= 2) {
        out.negativity_ori = negativity(original);
        out.negativity_rec = negativity(reconstructed);
      }
      out.d_purity = std::abs(out.purity_rec - out.purity_ori);
      out.d_negativity = std::abs(out.negativity_rec - out.negativity_ori);
    });
  }
  report.aggregates = compute_aggregates(report.rows, window_f_min);
  opts.info("evaluated " + std::to_string(n) + " records: mean F_rec " + fmt_double(report.aggregates.mean_f_rec) +
            ", above diagonal " + fmt_double(report.aggregates.fraction_above_diagonal));
  return report;
}

std::string report_csv(const EvalReport& r) {
  std::ostringstream os;
  os << "id,family,f_noisy,f_rec,purity_ori,purity_rec,negativity_ori,negativity_rec,d_purity,d_negativity\n";
  for (const auto& row : r.rows) {
    os << row.id << ',' << to_string(row.family) << ',' << fmt_double(row.f_noisy) << ',' << fmt_double(row.f_rec)
       << ',' << fmt_double(row.purity_ori) << ',' << fmt_double(row.purity_rec) << ','
       << fmt_double(row.negativity_ori) << ',' << fmt_double(row.negativity_rec) << ',' << fmt_double(row.d_purity)
       << ',' << fmt_double(row.d_negativity) << '\n';
  }
  return os.str();
}

json make_manifest(const std::string& command, const ExperimentConfig& cfg) {
  return json{{"tool", "tomonet"},
              {"manifest_version", 1},
              {"command", command},
              {"config", cfg.to_json()},
              {"config_hash", cfg.hash()},
              {"seed", cfg.seed},
              {"train_seed", cfg.train.seed}};
}

namespace {

ExperimentOutput run_single(const ExperimentConfig& cfg, const std::filesystem::path& dir, const RunOptions& opts) {
  std::filesystem::create_directories(dir);
  const Dataset train_set = generate_dataset(cfg, Split::Train, opts);
  write_dataset(train_set, dir / "train.ndjson");
  const Dataset test_set = generate_dataset(cfg, Split::Test, opts);
  write_dataset(test_set, dir / "test.ndjson");

  const Checkpoint ck = train(cfg, train_set, opts);
  save_checkpoint(ck, dir / "model.ck");

  ExperimentOutput out{cfg.shots.value_or(0), evaluate(ck, test_set, opts, cfg.report_window_f_min), dir};
  write_text(dir / "report.csv", report_csv(out.report));
  write_text(dir / "aggregates.json", out.report.aggregates.to_json().dump(2) + "\n");
  return out;
}

}  // namespace

std::vector<ExperimentOutput> run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                             const RunOptions& opts) {
  cfg.validate();
  std::filesystem::create_directories(out);
  write_text(out / "manifest.json", make_manifest("reproduce", cfg).dump(2) + "\n");

  std::vector<ExperimentOutput> results;
  if (cfg.shot_sweep.empty()) {
    results.push_back(run_single(cfg, out, opts));
    return results;
  }
  json sweep = json::array();
  for (std::uint64_t m : cfg.shot_sweep) {
    ExperimentConfig sub = cfg;
    sub.shot_sweep.clear();
    sub.shots = m;
    opts.info("shot sweep: m = " + std::to_string(m));
    results.push_back(run_single(sub, out / ("m" + std::to_string(m)), opts));
    const auto& a = results.back().report.aggregates;
    sweep.push_back({{"shots", m},
                     {"mean_f_rec", a.mean_f_rec},
                     {"variance_f_rec", a.variance_f_rec},
                     {"mean_f_noisy", a.mean_f_noisy},
                     {"fraction_above_diagonal", a.fraction_above_diagonal}});
  }
  write_text(out / "sweep.json", sweep.dump(2) + "\n");
  return results;
}

}  // namespace tomonet
