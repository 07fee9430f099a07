#include "run_config.hpp"

#include <fstream>
#include <set>

#include "rgnn/electrodes.hpp"
#include "rgnn/errors.hpp"

namespace rgnn::cli {

namespace {

class Section {
 public:
  Section(const nlohmann::json& node, std::string path, std::set<std::string> allowed)
      : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError("config: '" + path_ + "' must be an object");
    for (const auto& [key, value] : node_.items())
      if (!allowed.count(key)) throw ConfigError("config: unknown key '" + qualified(key) + "'");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  void require(const std::string& key) const {
    if (!has(key)) throw ConfigError("config: missing required field '" + qualified(key) + "'");
  }

  void read(const std::string& key, double& out) const {
    if (!has(key)) return;
    const auto& v = node_.at(key);
    if (!v.is_number()) throw ConfigError("config: '" + qualified(key) + "' must be a number");
    out = v.get<double>();
  }

  template <typename T>
  void read_count(const std::string& key, T& out) const {
    if (!has(key)) return;
    const auto& v = node_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ConfigError("config: '" + qualified(key) + "' must be a nonnegative integer");
    out = static_cast<T>(v.get<unsigned long long>());
  }

  void read(const std::string& key, bool& out) const {
    if (!has(key)) return;
    const auto& v = node_.at(key);
    if (!v.is_boolean()) throw ConfigError("config: '" + qualified(key) + "' must be a boolean");
    out = v.get<bool>();
  }

  void read(const std::string& key, std::string& out) const {
    if (!has(key)) return;
    const auto& v = node_.at(key);
    if (!v.is_string()) throw ConfigError("config: '" + qualified(key) + "' must be a string");
    out = v.get<std::string>();
  }

  const nlohmann::json& at(const std::string& key) const { return node_.at(key); }
  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const nlohmann::json& node_;
  std::string path_;
};

SynthConfig parse_synth(const nlohmann::json& node) {
  const Section s(node, "synth",
                  {"subjects", "trials_per_class", "samples_per_trial", "channels", "bands", "classes",
                   "class_separation", "subject_shift_scale", "label_noise_rate", "seed"});
  s.require("subjects");
  s.require("seed");
  SynthConfig c;
  s.read_count("subjects", c.subjects);
  s.read_count("trials_per_class", c.trials_per_class);
  s.read_count("samples_per_trial", c.samples_per_trial);
  s.read_count("channels", c.channels);
  s.read_count("bands", c.bands);
  s.read_count("classes", c.classes);
  s.read("class_separation", c.class_separation);
  s.read("subject_shift_scale", c.subject_shift_scale);
  s.read("label_noise_rate", c.label_noise_rate);
  s.read_count("seed", c.seed);
  c.validate();
  return c;
}

void parse_train(const nlohmann::json& node, TrainConfig& c) {
  const Section s(node, "train",
                  {"epochs", "batch_size", "lr", "alpha", "epsilon", "node_dat", "emotion_dl", "dat_graph_level",
                   "seed", "hidden", "steps", "dropout", "weight_decay", "beta1", "beta2", "adam_eps",
                   "beta_override", "grl_weight"});
  s.require("epochs");
  s.read_count("epochs", c.epochs);
  s.read_count("batch_size", c.batch_size);
  s.read("lr", c.adam.lr);
  s.read("alpha", c.alpha);
  s.read("epsilon", c.epsilon);
  s.read("node_dat", c.node_dat);
  s.read("emotion_dl", c.emotion_dl);
  s.read("dat_graph_level", c.dat_graph_level);
  s.read_count("seed", c.seed);
  s.read_count("hidden", c.hidden);
  s.read_count("steps", c.steps);
  s.read("dropout", c.dropout);
  s.read("weight_decay", c.adam.weight_decay);
  s.read("beta1", c.adam.beta1);
  s.read("beta2", c.adam.beta2);
  s.read("adam_eps", c.adam.eps);
  s.read("grl_weight", c.grl_weight);
  if (s.has("beta_override")) {
    double beta = 0.0;
    s.read("beta_override", beta);
    c.beta_override = beta;
  }
}

void parse_adjacency(const nlohmann::json& node, AdjacencyConfig& c) {
  const Section s(node, "adjacency", {"init", "delta", "calibrate", "sparsity_target", "layout", "global_pairs"});
  std::string init = "distance";
  s.read("init", init);
  if (init == "distance")
    c.init = AdjacencyConfig::Init::distance;
  else if (init == "correlation")
    c.init = AdjacencyConfig::Init::correlation;
  else
    throw ConfigError("config: 'adjacency.init' must be \"distance\" or \"correlation\"");
  s.read("delta", c.delta);
  s.read("calibrate", c.calibrate);
  s.read("sparsity_target", c.sparsity_target);
  if (!(c.delta > 0.0)) throw ConfigError("config: 'adjacency.delta' must be positive");
  if (!(c.sparsity_target > 0.0 && c.sparsity_target < 1.0))
    throw ConfigError("config: 'adjacency.sparsity_target' must be in (0,1)");
  std::string layout = "seed62";
  s.read("layout", layout);
  c.layout = layout == "seed62" ? seed62_layout() : ElectrodeLayout::load(layout);
  std::string pairs = "default";
  s.read("global_pairs", pairs);
  const bool named = pairs == "default" || pairs == "near_central" || pairs == "far_lateral" || pairs == "none";
  c.global_pairs = named ? named_global_pairs(pairs) : GlobalPairSet::load(pairs);
  c.global_pairs.validate(c.layout);
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& doc) {
  const Section root(doc, "", {"synth", "train", "adjacency", "protocol", "train_trials", "bands", "jobs"});
  RunConfig rc;
  if (root.has("synth")) rc.synth = parse_synth(root.at("synth"));
  if (root.has("train")) {
    rc.has_train = true;
    parse_train(root.at("train"), rc.protocol.train);
  }
  if (root.has("adjacency")) parse_adjacency(root.at("adjacency"), rc.protocol.train.adjacency);
  if (root.has("protocol")) {
    std::string name;
    root.read("protocol", name);
    rc.protocol.protocol = parse_protocol(name);
  }
  root.read_count("train_trials", rc.protocol.train_trials);
  root.read_count("jobs", rc.protocol.jobs);
  if (root.has("bands")) {
    const auto& bands = root.at("bands");
    if (!bands.is_array()) throw ConfigError("config: 'bands' must be an array of band names");
    for (const auto& b : bands) {
      if (!b.is_string()) throw ConfigError("config: 'bands' must be an array of band names");
      rc.bands.push_back(b.get<std::string>());
    }
  }
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return parse_run_config(doc);
}

}  // namespace rgnn::cli
