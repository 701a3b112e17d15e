#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "tomonet/error.hpp"
#include "tomonet/pipeline.hpp"

namespace tomonet {

using nlohmann::json;

std::string to_string(StateFamily f) {
  switch (f) {
    case StateFamily::GhzLike: return "ghz-like";
    case StateFamily::Dicke: return "dicke";
    case StateFamily::Mixed: return "mixed";
  }
  return "unknown";
}

std::string to_string(StateMix m) { return m == StateMix::Pure ? "pure" : "mixed"; }
std::string to_string(Split s) { return s == Split::Train ? "train" : "test"; }

StateFamily family_from_string(const std::string& s) {
  if (s == "ghz-like") return StateFamily::GhzLike;
  if (s == "dicke") return StateFamily::Dicke;
  if (s == "mixed") return StateFamily::Mixed;
  throw Error(ErrorKind::Config, "unknown state family '" + s + "'");
}

StateMix mix_from_string(const std::string& s) {
  if (s == "pure") return StateMix::Pure;
  if (s == "mixed") return StateMix::Mixed;
  throw Error(ErrorKind::Config, "unknown state mix '" + s + "' (expected pure or mixed)");
}

void ExperimentConfig::validate() const {
  if (n_qubits < 1 || n_qubits > 10) throw Error(ErrorKind::Config, "n_qubits must be in [1, 10]");
  const std::size_t full = (std::size_t{1} << (2 * n_qubits)) - 1;
  if (subset_size > full) throw Error(ErrorKind::Config, "subset_size exceeds 4^n - 1");
  if (train_size < 1 || test_size < 1) throw Error(ErrorKind::Config, "dataset sizes must be >= 1");
  if (n_sec < 2) throw Error(ErrorKind::Config, "n_sec must be >= 2");
  if (!(bounds_margin >= 0.0)) throw Error(ErrorKind::Config, "bounds_margin must be >= 0");
  if (shots && *shots == 0) throw Error(ErrorKind::Config, "shots must be >= 1");
  for (auto m : shot_sweep)
    if (m == 0) throw Error(ErrorKind::Config, "shot_sweep entries must be >= 1");
  if (hidden_layers < 1) throw Error(ErrorKind::Config, "hidden_layers must be >= 1");
  noise.validate();
  train.validate();
}

std::size_t ExperimentConfig::effective_subset_size() const {
  const std::size_t full = (std::size_t{1} << (2 * n_qubits)) - 1;
  return subset_size == 0 ? full : subset_size;
}

std::size_t ExperimentConfig::effective_hidden_width() const {
  return hidden_width == 0 ? tomonet::hidden_width(n_qubits) : hidden_width;
}

json ExperimentConfig::to_json() const {
  json noise_j = {{"p_max", noise.p_max}, {"enabled", noise.enabled}, {"f_min", noise.f_min}};
  json train_j = {{"learning_rate", train.learning_rate}, {"beta1", train.beta1}, {"beta2", train.beta2},
                  {"epsilon", train.epsilon},             {"batch_size", train.batch_size},
                  {"epochs", train.epochs},               {"seed", train.seed}};
  return json{{"name", name},
              {"n_qubits", n_qubits},
              {"mix", to_string(mix)},
              {"noise", noise_j},
              {"subset_size", subset_size},
              {"shots", shots ? json(*shots) : json(nullptr)},
              {"shot_sweep", shot_sweep},
              {"train_size", train_size},
              {"test_size", test_size},
              {"n_sec", n_sec},
              {"bounds_margin", bounds_margin},
              {"hidden_layers", hidden_layers},
              {"hidden_width", hidden_width},
              {"train", train_j},
              {"seed", seed},
              {"report_window_f_min", report_window_f_min}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  try {
    c.name = j.at("name").get<std::string>();
    c.n_qubits = j.at("n_qubits").get<std::size_t>();
    c.mix = mix_from_string(j.at("mix").get<std::string>());
    c.noise.p_max = j.at("noise").at("p_max").get<std::array<double, 4>>();
    c.noise.enabled = j.at("noise").at("enabled").get<std::array<bool, 4>>();
    c.noise.f_min = j.at("noise").at("f_min").get<double>();
    c.subset_size = j.at("subset_size").get<std::size_t>();
    if (!j.at("shots").is_null()) c.shots = j.at("shots").get<std::uint64_t>();
    c.shot_sweep = j.at("shot_sweep").get<std::vector<std::uint64_t>>();
    c.train_size = j.at("train_size").get<std::size_t>();
    c.test_size = j.at("test_size").get<std::size_t>();
    c.n_sec = j.at("n_sec").get<std::size_t>();
    c.bounds_margin = j.at("bounds_margin").get<double>();
    c.hidden_layers = j.at("hidden_layers").get<std::size_t>();
    c.hidden_width = j.at("hidden_width").get<std::size_t>();
    const auto& t = j.at("train");
    c.train.learning_rate = t.at("learning_rate").get<double>();
    c.train.beta1 = t.at("beta1").get<double>();
    c.train.beta2 = t.at("beta2").get<double>();
    c.train.epsilon = t.at("epsilon").get<double>();
    c.train.batch_size = t.at("batch_size").get<std::size_t>();
    c.train.epochs = t.at("epochs").get<std::size_t>();
    c.train.seed = t.at("seed").get<std::uint64_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.report_window_f_min = j.at("report_window_f_min").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_tag(to_json().dump())));
  return buf;
}

namespace {

ExperimentConfig mixed_two_qubit(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.n_qubits = 2;
  c.mix = StateMix::Mixed;
  c.train_size = 20000;
  c.test_size = 1000;
  c.hidden_layers = 3;
  c.hidden_width = 100;
  c.report_window_f_min = 0.85;
  // stronger than the library default so noisy fidelities span roughly [0.85, 1]
  c.noise.p_max = {0.1, 0.1, 0.1, 0.1};
  c.train.epochs = 150;
  return c;
}

}  // namespace

PresetResult preset(const std::string& name, Scale scale) {
  PresetResult r;
  auto& c = r.config;
  if (name == "fig2") {
    c.name = name;
    c.mix = StateMix::Pure;
    c.n_qubits = scale == Scale::Desk ? 4 : 6;
    c.subset_size = std::size_t{1} << (c.n_qubits + 1);
    c.train_size = 20000;
    c.test_size = 1000;
    c.train.epochs = 30;
    if (scale == Scale::Paper)
      r.warnings.push_back("scale=paper fig2 covers 6 to 10 qubits; set n_qubits and subset_size = 2^(n+1) per run");
  } else if (name == "fig3" || name == "fig4") {
    c = mixed_two_qubit(name);
  } else if (name == "fig5") {
    c = mixed_two_qubit(name);
    c.shot_sweep = {100, 1000, 10000};
  } else {
    throw Error(ErrorKind::Config, "unknown preset '" + name + "' (expected fig2, fig3, fig4 or fig5)");
  }
  c.train.seed = c.seed;
  if (scale == Scale::Paper)
    r.warnings.push_back("training set size, epochs and optimizer are unreported for these settings; "
                         "scale=paper presets reuse the desk-scale training budget");
  c.validate();
  return r;
}

namespace {

std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) return s.substr(1, s.size() - 2);
  return s;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end) throw Error(ErrorKind::Config, "bad value for " + key + ": '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw Error(ErrorKind::Config, "bad boolean for " + key + ": '" + text + "'");
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> default_seed) {
  namespace pt = boost::property_tree;
  if (!std::filesystem::exists(path)) throw Error(ErrorKind::Config, "config file not found: " + path.string());
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::Config, std::string("cannot parse config: ") + e.what());
  }

  std::map<std::string, std::string> kv;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw Error(ErrorKind::Config, "config key '" + section + "' must sit inside a section");
    for (const auto& [key, value] : body) kv[section + "." + key] = unquote(value.get_value<std::string>());
  }

  ExperimentConfig c;
  if (auto it = kv.find("experiment.preset"); it != kv.end()) {
    Scale scale = Scale::Desk;
    if (auto s = kv.find("experiment.scale"); s != kv.end()) {
      if (s->second == "paper") scale = Scale::Paper;
      else if (s->second != "desk") throw Error(ErrorKind::Config, "scale must be desk or paper");
    }
    c = preset(it->second, scale).config;
  }
  if (default_seed) {
    c.seed = *default_seed;
    c.train.seed = *default_seed;
  }

  std::set<std::string> used{"experiment.preset", "experiment.scale"};
  auto take = [&](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    used.insert(key);
    return &it->second;
  };
  auto size_key = [&](const std::string& key, std::size_t& dst) {
    if (auto v = take(key)) dst = parse_number<std::size_t>(key, *v);
  };
  auto double_key = [&](const std::string& key, double& dst) {
    if (auto v = take(key)) dst = parse_number<double>(key, *v);
  };

  if (auto v = take("experiment.name")) c.name = *v;
  size_key("experiment.n_qubits", c.n_qubits);
  if (auto v = take("experiment.mix")) c.mix = mix_from_string(*v);
  size_key("experiment.subset_size", c.subset_size);
  if (auto v = take("experiment.shots")) {
    if (*v == "exact") c.shots.reset();
    else c.shots = parse_number<std::uint64_t>("experiment.shots", *v);
  }
  if (auto v = take("experiment.shot_sweep")) {
    c.shot_sweep.clear();
    std::stringstream ss(*v);
    for (std::string item; std::getline(ss, item, ',');) {
      item.erase(0, item.find_first_not_of(" \t"));
      item.erase(item.find_last_not_of(" \t") + 1);
      if (!item.empty()) c.shot_sweep.push_back(parse_number<std::uint64_t>("experiment.shot_sweep", item));
    }
  }
  size_key("experiment.train_size", c.train_size);
  size_key("experiment.test_size", c.test_size);
  size_key("experiment.n_sec", c.n_sec);
  double_key("experiment.bounds_margin", c.bounds_margin);
  size_key("experiment.hidden_layers", c.hidden_layers);
  size_key("experiment.hidden_width", c.hidden_width);
  if (auto v = take("experiment.seed")) {
    c.seed = parse_number<std::uint64_t>("experiment.seed", *v);
    c.train.seed = c.seed;
  }
  double_key("experiment.report_window_f_min", c.report_window_f_min);

  for (ChannelKind kind : kChannelOrder) {
    const auto i = static_cast<std::size_t>(kind);
    const std::string k(to_string(kind));
    double_key("noise.p_" + k, c.noise.p_max[i]);
    if (auto v = take("noise.enable_" + k)) c.noise.enabled[i] = parse_bool("noise.enable_" + k, *v);
  }
  double_key("noise.f_min", c.noise.f_min);

  double_key("train.learning_rate", c.train.learning_rate);
  double_key("train.beta1", c.train.beta1);
  double_key("train.beta2", c.train.beta2);
  double_key("train.epsilon", c.train.epsilon);
  size_key("train.batch_size", c.train.batch_size);
  size_key("train.epochs", c.train.epochs);
  if (auto v = take("train.seed")) c.train.seed = parse_number<std::uint64_t>("train.seed", *v);

  for (const auto& [key, value] : kv)
    if (!used.contains(key)) throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
  c.validate();
  return c;
}

}  // namespace tomonet
