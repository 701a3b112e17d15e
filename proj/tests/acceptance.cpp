// Acceptance suite: runs every acceptance criterion and prints one PASS/FAIL
// line per criterion. Exit status is non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tomonet/cli.hpp"
#include "tomonet/codec.hpp"
#include "tomonet/error.hpp"
#include "tomonet/measurement.hpp"
#include "tomonet/mlp.hpp"
#include "tomonet/noise.hpp"
#include "tomonet/pipeline.hpp"
#include "tomonet/states.hpp"

using namespace tomonet;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Detail {
 public:
  template <class T>
  Detail& operator()(const std::string& key, T value) {
    os_ << (first_ ? "" : ", ") << key << "=" << value;
    first_ = false;
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
  bool first_ = true;
};

struct Criterion {
  int id;
  std::string title;
  double limit_seconds;  // 0: no runtime limit
  std::function<Outcome()> body;
};

int cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "tomonet");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

json read_json(const fs::path& p) { return json::parse(read_text(p)); }

// --- 1 -----------------------------------------------------------------

Outcome codec_round_trips() {
  RandomStream rng(derive_seed(1, {hash_tag("acceptance-codec")}));
  double onehot_worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t n = 1 + i % 3;
    const std::size_t k = param_count(n);
    Bounds b{std::vector<double>(k), std::vector<double>(k)};
    ParamVector p{n, std::vector<double>(k)};
    for (std::size_t j = 0; j < k; ++j) {
      b.lo[j] = rng.uniform(-1.5, 0.5);
      b.hi[j] = b.lo[j] + rng.uniform(0.01, 2.0);
      p.alpha[j] = rng.uniform(b.lo[j], b.hi[j]);
    }
    const auto back = onehot_decode(onehot_encode(p, b), b, n);
    for (std::size_t j = 0; j < k; ++j) onehot_worst = std::max(onehot_worst, std::abs(back.alpha[j] - p.alpha[j]));
  }
  double state_worst = 0.0;
  for (std::size_t n = 1; n <= 3; ++n)
    for (int i = 0; i < 1000; ++i) {
      const auto rho = random_mixed_hs(n, rng);
      state_worst = std::max(state_worst, max_abs_diff(params_to_state(state_to_params(rho)).matrix(), rho.matrix()));
    }
  return {onehot_worst <= 1e-12 && state_worst <= 1e-8,
          Detail()("onehot_max_err", onehot_worst)("state_max_err", state_worst).str()};
}

// --- 2 -----------------------------------------------------------------

Outcome decoder_totality() {
  RandomStream rng(derive_seed(1, {hash_tag("acceptance-fuzz")}));
  std::size_t bad = 0;
  double worst_herm = 0, worst_trace = 0, min_eig = 0;
  for (int i = 0; i < 100000; ++i) {
    const std::size_t n = 1 + i % 3;
    ParamVector p{n, std::vector<double>(param_count(n))};
    const double scale = std::pow(10.0, rng.uniform(-8, 8));
    const int style = i % 4;
    for (auto& a : p.alpha) {
      if (style == 0) a = rng.normal() * scale;
      else if (style == 1) a = rng.uniform(-1, 1);
      else if (style == 2) a = rng.uniform() < 0.7 ? 0.0 : rng.normal() * scale;  // sparse, often rank-deficient
      else a = (rng.uniform() < 0.5 ? -1 : 1) * std::pow(10.0, rng.uniform(-12, 12));
    }
    if (std::all_of(p.alpha.begin(), p.alpha.end(), [](double a) { return a == 0.0; })) p.alpha[0] = 1.0;
    const auto c = check_density(params_to_state(p).matrix());
    worst_herm = std::max(worst_herm, c.hermitian_defect);
    worst_trace = std::max(worst_trace, c.trace_error);
    min_eig = std::min(min_eig, c.min_eigenvalue);
    if (!c.ok(1e-10)) ++bad;
  }
  return {bad == 0, Detail()("invalid", bad)("max_herm", worst_herm)("max_trace_err", worst_trace)(
                        "min_eig", min_eig).str()};
}

// --- 3 -----------------------------------------------------------------

Outcome channel_physics() {
  double completeness = 0.0;
  for (ChannelKind kind : kChannelOrder)
    for (int i = 0; i <= 100; ++i) {
      ComplexMatrix sum(2, 2);
      for (const auto& k : kraus_ops(kind, i / 100.0)) sum += k.adjoint() * k;
      completeness = std::max(completeness, max_abs_diff(sum, ComplexMatrix::identity(2)));
    }
  RandomStream rng(derive_seed(1, {hash_tag("acceptance-channels")}));
  double trace_err = 0.0, min_eig = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const auto rho = random_mixed_hs(1 + s % 3, rng);
    for (ChannelKind kind : kChannelOrder) {
      const auto c = check_density(apply_channel(rho, kind, rng.uniform()).matrix());
      trace_err = std::max(trace_err, c.trace_error);
      min_eig = std::min(min_eig, c.min_eigenvalue);
    }
  }
  return {completeness <= 1e-12 && trace_err <= 1e-10 && min_eig >= -1e-10,
          Detail()("completeness_err", completeness)("trace_err", trace_err)("min_eig", min_eig).str()};
}

// --- 4 -----------------------------------------------------------------

Outcome gradient_check() {
  RandomStream rng(derive_seed(1, {hash_tag("acceptance-grad")}));
  const std::vector<std::size_t> dims{6, 12, 10, 9, 2 * 5};  // three hidden layers
  auto m = init_model(dims, 4, rng);
  for (auto& w : m.weights)
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(w.rows() - 1, c) = 0.3 * rng.normal();
  Matrix x(8, 6);
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = rng.normal();
  Matrix t = Matrix::Zero(8, 10);
  for (Eigen::Index r = 0; r < 8; ++r)
    for (Eigen::Index b = 0; b < 2; ++b) {
      const auto j = rng.uniform_int(0, 3);
      const double f = rng.uniform();
      t(r, b * 5 + j) = f;
      t(r, b * 5 + j + 1) = 1 - f;
    }

  std::size_t neg = 0, pos = 0;
  Matrix cur = x;
  for (std::size_t l = 0; l + 1 < m.weights.size(); ++l) {
    const Matrix& w = m.weights[l];
    Matrix pre = cur * w.topRows(w.rows() - 1);
    pre.rowwise() += w.row(w.rows() - 1);
    neg += static_cast<std::size_t>((pre.array() < 0).count());
    pos += static_cast<std::size_t>((pre.array() >= 0).count());
    cur = pre.unaryExpr([&](double v) { return leaky_relu(v, m.leak); });
  }

  const auto lg = loss_and_grad(m, x, t);
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t l = 0; l < m.weights.size(); ++l)
    for (Eigen::Index r = 0; r < m.weights[l].rows(); ++r)
      for (Eigen::Index c = 0; c < m.weights[l].cols(); ++c) {
        const double orig = m.weights[l](r, c);
        m.weights[l](r, c) = orig + h;
        const double up = loss_only(m, x, t);
        m.weights[l](r, c) = orig - h;
        const double down = loss_only(m, x, t);
        m.weights[l](r, c) = orig;
        const double fd = (up - down) / (2 * h);
        const double g = lg.grads[l](r, c);
        worst = std::max(worst, std::abs(fd - g) / std::max({std::abs(fd), std::abs(g), 1e-4}));
      }
  return {worst <= 1e-6 && m.parameter_count() <= 1000 && neg > 0 && pos > 0,
          Detail()("params", m.parameter_count())("max_rel_err", worst)("neg_preact", neg)("pos_preact", pos).str()};
}

// --- 5 -----------------------------------------------------------------

Outcome linalg_oracles() {
  RandomStream rng(derive_seed(1, {hash_tag("acceptance-linalg")}));
  double recon = 0.0, unitary = 0.0;
  for (std::size_t dim = 1; dim <= 64; ++dim) {
    ComplexMatrix g(dim, dim);
    for (auto& z : g.entries()) z = Complex(rng.normal(), rng.normal());
    const ComplexMatrix a = hermitian_part(g);
    const auto e = hermitian_eig(a);
    const ComplexMatrix rebuilt = e.eigenvectors * ComplexMatrix::diagonal(e.eigenvalues) * e.eigenvectors.adjoint();
    recon = std::max(recon, max_abs_diff(rebuilt, a) / std::max(1.0, a.max_abs()));
    unitary = std::max(unitary, max_abs_diff(e.eigenvectors.adjoint() * e.eigenvectors, ComplexMatrix::identity(dim)));
  }
  const double h = 1 / std::sqrt(2.0);
  const auto bell = DensityMatrix::from_pure(StateVector{2, {h, 0, 0, h}});
  const auto pt_eigs = hermitian_eig(partial_transpose(bell.matrix(), 2, 1)).eigenvalues;
  const std::vector<double> expected{-0.5, 0.5, 0.5, 0.5};
  double spec_err = 0.0;
  for (std::size_t i = 0; i < 4; ++i) spec_err = std::max(spec_err, std::abs(pt_eigs[i] - expected[i]));
  const double neg_err = std::abs(negativity(bell) - 0.5);
  const double pur_err = std::abs(purity(DensityMatrix::maximally_mixed(2)) - 0.25);
  return {recon <= 1e-10 && unitary <= 1e-10 && spec_err <= 1e-10 && neg_err <= 1e-10 && pur_err <= 1e-10,
          Detail()("eig_recon", recon)("eig_unitarity", unitary)("bell_pt_err", spec_err)("neg_err", neg_err)(
              "purity_err", pur_err).str()};
}

// --- 6 -----------------------------------------------------------------

Outcome sampling_convergence() {
  RandomStream rng(derive_seed(1, {hash_tag("acceptance-shots")}));
  const auto set = full_pauli_set(2);
  std::size_t within = 0, total = 0;
  double worst = 0.0;
  for (int s = 0; s < 10; ++s) {
    const auto rho = random_mixed_hs(2, rng);
    const auto exact = exact_expectations(rho, set);
    const auto est = sample_cube_shots(rho, set, 1000000, rng);
    for (std::size_t i = 0; i < set.size(); ++i) {
      const double err = std::abs(est.values[i] - exact.values[i]);
      worst = std::max(worst, err);
      within += err <= 5e-3;
      ++total;
    }
  }
  const double frac = static_cast<double>(within) / total;
  return {frac >= 0.99, Detail()("within_5e-3", frac)("max_err", worst).str()};
}

// --- 7-11: experiment presets ------------------------------------------

struct Runs {
  fs::path root;
  bool fig3_ok = false, fig2_ok = false, fig5_ok = false;
  std::string fig3_error, fig2_error, fig5_error;
};

Outcome preset_run(const fs::path& dir, const std::string& name, bool& ok, std::string& error) {
  fs::remove_all(dir);
  const auto t0 = std::chrono::steady_clock::now();
  ok = cli_run({"reproduce", name, "--scale", "desk", "--out", dir.string()}) == 0;
  if (!ok) error = "reproduce " + name + " failed";
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {ok, Detail()("run_seconds", secs).str()};
}

Outcome fig3_criterion(const Runs& r) {
  if (!r.fig3_ok) return {false, r.fig3_error};
  const json a = read_json(r.root / "fig3" / "aggregates.json");
  const double above = a.at("fraction_above_diagonal");
  const double gain = a.at("mean_f_rec").get<double>() - a.at("mean_f_noisy").get<double>();
  return {a.at("count") == 1000 && above >= 0.70 && gain > 0,
          Detail()("above_diagonal", above)("mean_f_rec", a.at("mean_f_rec").get<double>())(
              "mean_f_noisy", a.at("mean_f_noisy").get<double>()).str()};
}

Outcome fig4_criterion(const Runs& r) {
  if (!r.fig3_ok) return {false, r.fig3_error};
  const json low = read_json(r.root / "fig3" / "aggregates.json").at("low_infidelity");
  const double dp = low.at("median_d_purity"), dn = low.at("median_d_negativity");
  return {low.at("count").get<std::size_t>() > 0 && dp <= 0.05 && dn <= 0.05,
          Detail()("states", low.at("count").get<std::size_t>())("median_d_purity", dp)("median_d_negativity", dn)
              .str()};
}

Outcome fig2_criterion(const Runs& r) {
  if (!r.fig2_ok) return {false, r.fig2_error};
  const json a = read_json(r.root / "fig2" / "aggregates.json");
  const json m = read_json(r.root / "fig2" / "manifest.json").at("config");
  const double mean = a.at("mean_f_rec"), median_inf = a.at("median_infidelity");
  const bool setup = m.at("n_qubits") == 4 && m.at("subset_size") == 32 && a.at("count") == 1000;
  return {setup && mean >= 0.98 && median_inf <= 1e-2,
          Detail()("mean_f_rec", mean)("median_infidelity", median_inf)(
              "worst_infidelity", a.at("worst_infidelity").get<double>()).str()};
}

Outcome fig5_criterion(const Runs& r) {
  if (!r.fig5_ok) return {false, r.fig5_error};
  const std::vector<std::string> subdirs{"m100", "m1000", "m10000"};
  std::vector<double> mean, var;
  std::set<std::string> test_sets;
  for (const auto& s : subdirs) {
    const json a = read_json(r.root / "fig5" / s / "aggregates.json");
    mean.push_back(a.at("mean_f_rec"));
    var.push_back(a.at("variance_f_rec"));
    // same states across m: compare the targets of the test split
    std::string targets;
    for (const auto& rec : read_dataset(r.root / "fig5" / s / "test.ndjson").records) targets += json(rec.target).dump();
    test_sets.insert(targets);
  }
  bool ok = test_sets.size() == 1;
  for (std::size_t i = 0; i + 1 < mean.size(); ++i) ok = ok && mean[i + 1] >= mean[i] - 0.002 && var[i + 1] <= var[i] + 0.002;
  Detail d;
  for (std::size_t i = 0; i < mean.size(); ++i) d(subdirs[i] + "_mean", mean[i])(subdirs[i] + "_var", var[i]);
  d("fixed_test_set", test_sets.size() == 1 ? "yes" : "no");
  return {ok, d.str()};
}

Outcome determinism(const Runs& r) {
  std::vector<std::string> mismatched;
  std::size_t compared = 0;
  auto rerun = [&](const std::string& name, const std::vector<fs::path>& leaves) {
    const fs::path src = r.root / name, dst = r.root / (name + "_rerun");
    fs::remove_all(dst);
    if (cli_run({"reproduce", "--manifest", (src / "manifest.json").string(), "--out", dst.string()}) != 0) {
      mismatched.push_back(name + ": rerun failed");
      return;
    }
    for (const auto& leaf : leaves)
      for (const auto* f : {"train.ndjson", "test.ndjson", "model.ck", "report.csv"}) {
        ++compared;
        if (read_text(src / leaf / f) != read_text(dst / leaf / f)) mismatched.push_back((leaf / f).string());
      }
  };
  if (r.fig3_ok) rerun("fig3", {"."});
  if (r.fig2_ok) rerun("fig2", {"."});
  if (!r.fig3_ok || !r.fig2_ok) return {false, "preset runs missing"};
  Detail d;
  d("files_compared", compared)("mismatches", mismatched.size());
  for (const auto& m : mismatched) d("differs", m);
  return {mismatched.empty(), d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tomonet acceptance suite", "tomonet_acceptance"};
  std::string workdir = (fs::temp_directory_path() / "tomonet_acceptance").string();
  std::vector<int> only;
  app.add_option("--workdir", workdir, "directory for preset runs");
  app.add_option("--only", only, "run only these criteria (experiments are run as needed)");
  CLI11_PARSE(app, argc, argv);

  Runs runs;
  runs.root = workdir;
  fs::create_directories(runs.root);
  auto wanted = [&](std::initializer_list<int> ids) {
    if (only.empty()) return true;
    for (int id : ids)
      if (std::find(only.begin(), only.end(), id) != only.end()) return true;
    return false;
  };

  // Experiment runs are timed separately and charged to the criteria that
  // carry a runtime limit.
  Outcome fig3_run, fig2_run, fig5_run;
  if (wanted({7, 8, 11})) fig3_run = preset_run(runs.root / "fig3", "fig3", runs.fig3_ok, runs.fig3_error);
  if (wanted({9, 11})) fig2_run = preset_run(runs.root / "fig2", "fig2", runs.fig2_ok, runs.fig2_error);
  if (wanted({10})) fig5_run = preset_run(runs.root / "fig5", "fig5", runs.fig5_ok, runs.fig5_error);
  auto run_seconds = [](const Outcome& o) {
    const auto pos = o.detail.find("run_seconds=");
    return pos == std::string::npos ? 0.0 : std::stod(o.detail.substr(pos + 12));
  };

  const std::vector<Criterion> criteria{
      {1, "codec round trips", 10, codec_round_trips},
      {2, "decoder totality", 60, decoder_totality},
      {3, "channel physics", 60, channel_physics},
      {4, "gradient correctness", 0, gradient_check},
      {5, "linear-algebra oracles", 0, linalg_oracles},
      {6, "sampling convergence", 0, sampling_convergence},
      {7, "fig3 desk-scale reproduction", 0, [&] { return fig3_criterion(runs); }},
      {8, "fig4 deviation medians", 0, [&] { return fig4_criterion(runs); }},
      {9, "fig2 desk-scale stand-in", 0, [&] { return fig2_criterion(runs); }},
      {10, "fig5 shot-count trend", 0, [&] { return fig5_criterion(runs); }},
      {11, "determinism from manifest", 0, [&] { return determinism(runs); }},
  };

  std::ostringstream summary;
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double limit = c.limit_seconds;
    if (c.id == 7) secs += run_seconds(fig3_run), limit = 30 * 60;
    if (c.id == 9) secs += run_seconds(fig2_run), limit = 60 * 60;
    if (c.id == 10) secs += run_seconds(fig5_run);
    bool pass = o.pass;
    if (limit > 0 && secs > limit) {
      pass = false;
      o.detail += ", runtime limit exceeded";
    }
    if (!pass) ++failures;
    char head[96];
    std::snprintf(head, sizeof head, "criterion %2d %-30s %s (%.1fs)", c.id, c.title.c_str(), pass ? "PASS" : "FAIL",
                  secs);
    std::cout << head << "  " << o.detail << std::endl;
    summary << head << "  " << o.detail << "\n";
  }
  const std::string verdict = failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed";
  std::cout << verdict << std::endl;
  summary << verdict << "\n";
  write_text(runs.root / "summary.txt", summary.str());
  return failures == 0 ? 0 : 1;
}
