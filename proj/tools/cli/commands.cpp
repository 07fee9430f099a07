#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rgnn/checkpoint.hpp"
#include "rgnn/diffcore.hpp"
#include "rgnn/errors.hpp"
#include "rgnn/eval.hpp"
#include "run_config.hpp"

namespace rgnn::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
}

ElectrodeLayout layout_for(const AdjacencyConfig& adjacency, std::size_t channels) {
  return adjacency.layout.size() > channels ? layout_prefix(adjacency.layout, channels) : adjacency.layout;
}

}  // namespace

int cmd_synth(const SynthArgs& args, std::ostream& out) {
  const RunConfig rc = load_run_config(args.config);
  if (!rc.synth) throw ConfigError("config: missing required field 'synth'");
  SynthConfig synth = *rc.synth;
  if (args.seed) synth.seed = *args.seed;
  const FeatureDataset ds = synthesize(synth);
  ds.validate();
  save_dataset(ds, args.out);
  out << nlohmann::json{{"out", args.out},
                        {"samples", ds.size()},
                        {"channels", ds.channels},
                        {"bands", ds.bands},
                        {"classes", ds.classes},
                        {"label_scheme", to_string(ds.scheme)}}
             .dump(2)
      << "\n";
  return kOk;
}

int cmd_train(const TrainArgs& args, std::ostream& out) {
  RunConfig rc = load_run_config(args.config);
  if (!rc.has_train) throw ConfigError("config: missing required field 'train'");
  ProtocolConfig& pc = rc.protocol;
  if (args.protocol) pc.protocol = parse_protocol(*args.protocol);
  if (args.bands) rc.bands = split_commas(*args.bands);
  if (args.seed) pc.train.seed = *args.seed;
  if (args.jobs) pc.jobs = *args.jobs;
  if (args.epochs) pc.train.epochs = *args.epochs;
  pc.train.validate();

  FeatureDataset ds = load_dataset(args.data);
  ds.validate();
  if (!rc.bands.empty()) ds = band_select(ds, rc.bands);

  const ElectrodeLayout layout = layout_for(pc.train.adjacency, ds.channels);
  const GlobalPairSet pairs = pc.train.adjacency.global_pairs.restricted_to(layout);

  const fs::path root(args.out);
  fs::create_directories(root);
  const EvalReport report = run_protocol(ds, pc, [&](const FoldResult& fold) {
    const fs::path dir = root / ("fold_" + std::to_string(fold.subject));
    fs::create_directories(dir);
    Checkpoint ckpt;
    ckpt.model = fold.trained.model;
    ckpt.params = fold.trained.params;
    ckpt.optimizer = fold.trained.optimizer;
    ckpt.channel_names = layout.names;
    ckpt.global_pairs = pairs;
    save_checkpoint(dir / "checkpoint.rgnn", ckpt);
    nlohmann::json history = {{"subject", fold.subject},
                              {"accuracy", fold.accuracy},
                              {"epochs", fold.trained.history},
                              {"beta_first", fold.trained.beta_trace.front()},
                              {"beta_last", fold.trained.beta_trace.back()}};
    write_text(dir / "history.json", history.dump(2) + "\n");
  });

  nlohmann::json doc = report_json(report);
  if (!rc.bands.empty()) doc["config"]["bands"] = rc.bands;
  const std::string text = doc.dump(2) + "\n";
  write_text(root / "report.json", text);
  out << text;
  return kOk;
}

int cmd_inspect(const InspectArgs& args, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(args.checkpoint);
  const auto& names = ckpt.channel_names;
  auto name = [&](std::size_t i) { return i < names.size() ? names[i] : std::to_string(i); };

  std::vector<std::pair<std::size_t, std::size_t>> excluded;
  if (args.exclude_global) {
    ElectrodeLayout named;
    named.names = names;
    excluded = global_pair_indices(named, ckpt.global_pairs);
  }

  nlohmann::json activation = nlohmann::json::array();
  const std::vector<double> map = activation_map(ckpt.params.adjacency);
  for (std::size_t i = 0; i < map.size(); ++i) activation.push_back({{"channel", name(i)}, {"value", map[i]}});

  nlohmann::json top = nlohmann::json::array();
  for (const auto& c : top_k_connections(ckpt.params.adjacency, args.top_k, excluded))
    top.push_back({{"i", c.i}, {"j", c.j}, {"a", name(c.i)}, {"b", name(c.j)}, {"weight", c.weight}});

  out << nlohmann::json{{"channels", ckpt.model.channels},
                        {"exclude_global", args.exclude_global},
                        {"activation_map", activation},
                        {"top_k", top}}
             .dump(2)
      << "\n";
  return kOk;
}

int cmd_gradcheck(const GradcheckArgs& args, std::ostream& out) {
  ModelConfig config;
  std::size_t batch = 2;
  if (args.size == "small") {
    config.channels = 4;
    config.bands = 3;
    config.hidden = 2;
    config.classes = 3;
    config.steps = 2;
  } else if (args.size == "default") {
    config.channels = 16;
    config.bands = 5;
    config.hidden = 8;
    config.classes = 3;
    config.steps = 2;
    batch = 4;
  } else {
    throw ConfigError("--size must be small or default");
  }
  GradCheckSetup setup = random_gradcheck_setup(config, batch, args.seed);
  setup.spec.corrupt_degree_adjoint = args.corrupt_adjoint;
  const CompositeGradCheck check = check_composite_gradients(setup);
  auto part = [](const GradCheckReport& r) {
    return nlohmann::json{{"max_relative_error", r.max_relative_error},
                          {"worst_tensor", r.worst_tensor},
                          {"worst_index", r.worst_index},
                          {"analytic", r.worst_analytic},
                          {"numeric", r.worst_numeric},
                          {"checked", r.checked}};
  };
  const bool passed = check.max_relative_error <= 1e-4;
  out << nlohmann::json{{"size", args.size},
                        {"seed", args.seed},
                        {"beta", setup.beta},
                        {"max_relative_error", check.max_relative_error},
                        {"passed", passed},
                        {"task", part(check.task)},
                        {"domain", part(check.domain)},
                        {"composite", part(check.composite)}}
             .dump(2)
      << "\n";
  return passed ? kOk : kRuntime;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"rgnn: regularized graph network for band-feature emotion recognition"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "generate a synthetic dataset bundle");
  s->add_option("--config", synth.config, "run config JSON")->required();
  s->add_option("--out", synth.out, "output bundle directory")->required();
  s->add_option("--seed", synth.seed, "override synth.seed");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "train and evaluate under a protocol");
  t->add_option("--data", train.data, "dataset bundle directory")->required();
  t->add_option("--config", train.config, "run config JSON")->required();
  t->add_option("--out", train.out, "output directory")->required();
  t->add_option("--protocol", train.protocol, "subject_dependent or loso");
  t->add_option("--bands", train.bands, "comma-separated band names");
  t->add_option("--seed", train.seed, "override train.seed");
  t->add_option("--jobs", train.jobs, "folds trained in parallel");
  t->add_option("--epochs", train.epochs, "override train.epochs");

  InspectArgs inspect;
  auto* i = app.add_subcommand("inspect", "activation map and strongest connections of a checkpoint");
  i->add_option("--checkpoint", inspect.checkpoint, "checkpoint file")->required();
  i->add_option("--top-k", inspect.top_k, "number of connections");
  i->add_flag("--exclude-global", inspect.exclude_global, "drop the global pairs before ranking");

  GradcheckArgs grad;
  auto* g = app.add_subcommand("gradcheck", "finite-difference check of the full objective");
  g->add_option("--seed", grad.seed, "instance seed");
  g->add_option("--size", grad.size, "small or default");
  g->add_flag("--corrupt-adjoint", grad.corrupt_adjoint)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << nlohmann::json{{"error", e.what()}, {"kind", "usage"}}.dump() << "\n";
    return kValidation;
  }

  auto fail = [&](const std::exception& e, const char* kind, int code) {
    err << nlohmann::json{{"error", e.what()}, {"kind", kind}}.dump() << "\n";
    return code;
  };
  try {
    if (*s) return cmd_synth(synth, out);
    if (*t) return cmd_train(train, out);
    if (*i) return cmd_inspect(inspect, out);
    return cmd_gradcheck(grad, out);
  } catch (const ConfigError& e) {
    return fail(e, "config", kValidation);
  } catch (const NumericError& e) {
    return fail(e, "numeric", kRuntime);
  } catch (const Error& e) {
    return fail(e, "runtime", kRuntime);
  } catch (const std::exception& e) {
    return fail(e, "runtime", kRuntime);
  }
}

}  // namespace rgnn::cli
