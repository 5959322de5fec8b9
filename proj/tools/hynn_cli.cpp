#include "hynn/bench.hpp"
#include "hynn/checkpoint.hpp"
#include "hynn/gradcheck.hpp"
#include "hynn/trainer.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace hynn;

namespace {

void write_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failure on " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

SpaceTag parse_space(const std::string& s) {
  if (s == "hyperbolic") return SpaceTag::Hyperbolic;
  if (s == "euclidean") return SpaceTag::Euclidean;
  throw std::invalid_argument("unknown space '" + s + "' (expected hyperbolic|euclidean)");
}

EmbeddingSpace parse_embedding_space(const std::string& s) {
  if (s == "poincare") return EmbeddingSpace::Poincare;
  if (s == "euclidean") return EmbeddingSpace::Euclidean;
  throw std::invalid_argument("unknown embedding space '" + s + "' (expected poincare|euclidean)");
}

// Flat key-value run configuration; every key has its preset default.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  double tangent_rescale = 1.0;

  void apply_preset(const std::string& preset) {
    if (preset == "base") {
      model.d_M = 40; model.d_C = 20; model.d_S = 20;
    } else if (preset == "large") {
      model.d_M = 100; model.d_C = 50; model.d_S = 50;
    } else if (preset == "xlarge") {
      model.d_M = 200; model.d_C = 100; model.d_S = 100;
    } else {
      throw std::invalid_argument("unknown preset '" + preset + "'");
    }
  }

  void set(const std::string& key, const std::string& value) {
    auto d = [&] { return std::stod(value); };
    auto i = [&] { return std::stoi(value); };
    if (key == "d_M") model.d_M = i();
    else if (key == "d_C") model.d_C = i();
    else if (key == "d_S") model.d_S = i();
    else if (key == "char_vocab") model.char_vocab = i();
    else if (key == "max_mention_len") model.max_mention_len = i();
    else if (key == "max_rel") model.max_rel = i();
    else if (key == "dropout_input") model.dropout_input = d();
    else if (key == "dropout_concat") model.dropout_concat = d();
    else if (key == "epochs") train.epochs = i();
    else if (key == "batch_size") train.batch_size = i();
    else if (key == "main_passes") train.schedule.main_passes = i();
    else if (key == "crowd_cycles") train.schedule.crowd_cycles = i();
    else if (key == "learning_rate") train.adam.learning_rate = d();
    else if (key == "beta1") train.adam.beta1 = d();
    else if (key == "beta2") train.adam.beta2 = d();
    else if (key == "adam_eps") train.adam.eps = d();
    else if (key == "weight_decay") train.adam.weight_decay = d();
    else if (key == "max_grad_norm") train.adam.max_grad_norm = d();
    else if (key == "tangent_rescale") tangent_rescale = d();
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }

  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream row(line);
      std::string key, value, extra;
      if (!(row >> key)) continue;
      std::replace(key.begin(), key.end(), '=', ' ');
      std::istringstream kv(key);
      kv >> key >> value;
      if (value.empty() && !(row >> value))
        throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected 'key value'");
      if (row >> extra)
        throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": trailing tokens");
      try {
        set(key, value);
      } catch (const std::exception& e) {
        throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
  }

  // Collects every violation before aborting.
  void validate() const {
    std::vector<std::string> errors;
    auto positive = [&](int v, const char* name) {
      if (v <= 0) errors.push_back(std::string(name) + " must be positive");
    };
    positive(model.d_M, "d_M");
    positive(model.d_C, "d_C");
    positive(model.d_S, "d_S");
    positive(model.char_vocab, "char_vocab");
    positive(model.max_mention_len, "max_mention_len");
    positive(model.max_rel, "max_rel");
    positive(train.epochs, "epochs");
    positive(train.batch_size, "batch_size");
    if (model.dropout_input < 0 || model.dropout_input >= 1)
      errors.push_back("dropout_input must be in [0, 1)");
    if (model.dropout_concat < 0 || model.dropout_concat >= 1)
      errors.push_back("dropout_concat must be in [0, 1)");
    if (train.adam.learning_rate <= 0) errors.push_back("learning_rate must be positive");
    if (train.schedule.main_passes <= 0) errors.push_back("main_passes must be positive");
    if (train.schedule.crowd_cycles < 0) errors.push_back("crowd_cycles must be >= 0");
    if (!errors.empty()) {
      std::string joined = "invalid configuration:";
      for (const auto& e : errors) joined += "\n  - " + e;
      throw std::invalid_argument(joined);
    }
  }
};

void apply_component_spaces(ComponentSpaceConfig& spaces, const std::vector<std::string>& specs) {
  for (const auto& s : specs) {
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("expected component=space, got '" + s + "'");
    std::string comp = s.substr(0, eq);
    SpaceTag tag = parse_space(s.substr(eq + 1));
    if (comp == "encoder") spaces.encoder = tag;
    else if (comp == "attention") spaces.attention = tag;
    else if (comp == "concat") spaces.concat = tag;
    else if (comp == "mlr") spaces.mlr = tag;
    else throw std::invalid_argument("unknown component '" + comp + "'");
  }
}

GranularityScores mean_scores(const std::vector<GranularityScores>& runs) {
  GranularityScores mean;
  double n = static_cast<double>(runs.size());
  for (const auto& s : runs) {
    for (int b = 0; b < 4; ++b) {
      mean.macro[b].precision += s.macro[b].precision / n;
      mean.macro[b].recall += s.macro[b].recall / n;
      mean.macro[b].f1 += s.macro[b].f1 / n;
      mean.micro[b].precision += s.micro[b].precision / n;
      mean.micro[b].recall += s.micro[b].recall / n;
      mean.micro[b].f1 += s.micro[b].f1 / n;
    }
    mean.strict_accuracy += s.strict_accuracy / n;
  }
  return mean;
}

struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::string space;
  std::vector<std::string> component_spaces;
  std::string embeddings;
  std::string embedding_space = "poincare";
  std::vector<std::uint64_t> seeds{0};
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "flat key-value config file");
  cmd->add_option("--preset", o.preset, "dimension preset")
      ->check(CLI::IsMember({"base", "large", "xlarge"}));
  cmd->add_option("--space", o.space, "manifold for every component")
      ->check(CLI::IsMember({"hyperbolic", "euclidean"}));
  cmd->add_option("--component-space", o.component_spaces,
                  "per-component manifold, component=space (repeatable)");
  cmd->add_option("--embeddings", o.embeddings, "token embedding file");
  cmd->add_option("--embedding-space", o.embedding_space, "space of the embedding file")
      ->check(CLI::IsMember({"poincare", "euclidean"}));
  cmd->add_option("--seeds", o.seeds, "random seeds, run sequentially")->delimiter(',');
  cmd->add_option("--out", o.out, "output directory or file");
}

RunConfig resolve_config(const CommonOpts& o) {
  RunConfig cfg;
  if (!o.preset.empty()) cfg.apply_preset(o.preset);
  if (!o.config_path.empty()) cfg.load_file(o.config_path);
  if (!o.space.empty()) {
    SpaceTag tag = parse_space(o.space);
    cfg.model.spaces = ComponentSpaceConfig{tag, tag, tag, tag};
  }
  apply_component_spaces(cfg.model.spaces, o.component_spaces);
  cfg.validate();
  return cfg;
}

int cmd_train(const CommonOpts& opts, const std::string& train_path,
              const std::string& crowd_path, const std::string& dev_path,
              const std::string& labels_path) {
  RunConfig cfg = resolve_config(opts);
  if (opts.embeddings.empty()) throw std::invalid_argument("train requires --embeddings");
  if (opts.out.empty()) throw std::invalid_argument("train requires --out");

  LabelInventory inventory = LabelInventory::load(labels_path);
  EmbeddingTable table = EmbeddingTable::load(opts.embeddings,
                                              parse_embedding_space(opts.embedding_space),
                                              cfg.tangent_rescale);
  auto train_set = load_examples(train_path, inventory);
  std::vector<TypedExample> crowd, dev;
  if (!crowd_path.empty()) crowd = load_examples(crowd_path, inventory);
  if (!dev_path.empty()) dev = load_examples(dev_path, inventory);
  if (train_set.empty()) throw std::runtime_error("training set is empty: " + train_path);

  cfg.model.embed_dim = table.dim;
  cfg.model.K = inventory.size();
  fs::create_directories(opts.out);

  std::vector<GranularityScores> finals;
  for (std::uint64_t seed : opts.seeds) {
    fs::path run_dir = fs::path(opts.out) / ("seed_" + std::to_string(seed));
    fs::create_directories(run_dir);

    Model model(cfg.model, seed);
    TrainConfig tcfg = cfg.train;
    tcfg.seed = seed;
    std::ostringstream log;
    TrainResult result = train_model(model, table, train_set, crowd, dev, inventory, tcfg, &log);
    write_atomic((run_dir / "metrics.log").string(), log.str());

    Checkpoint ckpt;
    ckpt.config = cfg.model;
    ckpt.inventory = inventory;
    ckpt.params = result.best_params;
    ckpt.opt_config = result.optimizer.config();
    ckpt.opt_state = result.optimizer.state();
    ckpt.opt_step = result.optimizer.step_count();
    save_checkpoint((run_dir / "checkpoint.bin").string(), ckpt);

    model.params() = result.best_params;
    GranularityScores scores =
        evaluate_model(model, table, dev.empty() ? train_set : dev, inventory);
    finals.push_back(scores);
    std::cout << "seed " << seed << (dev.empty() ? " train scores\n" : " dev scores\n")
              << format_report(scores);
  }
  GranularityScores mean = mean_scores(finals);
  if (opts.seeds.size() > 1)
    std::cout << "mean over " << opts.seeds.size() << " seeds\n" << format_report(mean);
  write_atomic((fs::path(opts.out) / "report.json").string(), to_json_report(mean));
  return 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& ckpt_path, const std::string& data_path) {
  if (opts.embeddings.empty()) throw std::invalid_argument("eval requires --embeddings");
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  EmbeddingTable table = EmbeddingTable::load(opts.embeddings,
                                              parse_embedding_space(opts.embedding_space), 1.0);
  if (table.dim != ckpt.config.embed_dim)
    throw std::runtime_error("embedding dim " + std::to_string(table.dim) +
                             " does not match checkpoint embed_dim " +
                             std::to_string(ckpt.config.embed_dim));
  auto examples = load_examples(data_path, ckpt.inventory);
  if (examples.empty()) throw std::runtime_error("no examples in " + data_path);

  Model model(ckpt.config, 0);
  model.params() = ckpt.params;
  GranularityScores scores = evaluate_model(model, table, examples, ckpt.inventory);
  std::cout << format_report(scores);
  if (!opts.out.empty()) write_atomic(opts.out, to_json_report(scores));
  return 0;
}

int cmd_inspect(const std::string& ckpt_path, const std::string& label, int k) {
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  int id = ckpt.inventory.id_of(label);
  if (id < 0) throw std::runtime_error("unknown label '" + label + "'");
  Model model(ckpt.config, 0);
  model.params() = ckpt.params;

  std::vector<std::pair<double, int>> by_distance;
  for (int j = 0; j < ckpt.inventory.size(); ++j) {
    if (j == id) continue;
    by_distance.emplace_back(model.class_point_distance(id, j), j);
  }
  std::stable_sort(by_distance.begin(), by_distance.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  if (k < static_cast<int>(by_distance.size())) by_distance.resize(std::max(k, 0));
  for (const auto& [dist, j] : by_distance)
    std::cout << ckpt.inventory.labels[j] << ' ' << std::fixed << std::setprecision(2) << dist
              << '\n';
  return 0;
}

int cmd_gradcheck(const CommonOpts& opts) {
  RunConfig cfg = resolve_config(opts);
  bool all_pass = true;
  for (std::uint64_t seed : opts.seeds) {
    auto report = gradcheck_components(cfg.model.d_M, cfg.model.d_C, cfg.model.d_S, seed);
    for (const auto& row : report) {
      std::cout << "seed " << seed << ' ' << row.component << ' ' << std::scientific
                << std::setprecision(3) << row.max_rel_err << ' '
                << (row.pass ? "PASS" : "FAIL") << '\n';
      all_pass = all_pass && row.pass;
    }
  }
  std::cout.flush();
  return all_pass ? 0 : 3;
}

int cmd_bench(const CommonOpts& opts, int depth, int branching, int dim, int n_train, int n_test,
              int epochs, double lr) {
  BenchSpec spec;
  spec.tree.depth = depth;
  spec.tree.branching = branching;
  spec.tree.dim = dim;
  spec.tree.n_train = n_train;
  spec.tree.n_test = n_test;
  spec.seeds = opts.seeds;
  spec.epochs = epochs;
  spec.learning_rate = lr;
  BenchResult result = run_synthetic_bench(spec, &std::cerr);
  std::cout << result.csv;
  if (!opts.out.empty()) write_atomic(opts.out, result.csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyperbolic entity-typing toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string train_path, crowd_path, dev_path, labels_path;
  std::string ckpt_path, data_path, label;
  int k = 10;
  int depth = 4, branching = 3, dim = 4, n_train = 2000, n_test = 500, bench_epochs = 12;
  double bench_lr = 0.01;

  auto* train = app.add_subcommand("train", "train a model and write checkpoints");
  add_common(train, opts);
  train->add_option("--train", train_path, "training JSONL")->required();
  train->add_option("--crowd", crowd_path, "crowd JSONL for extra cycles");
  train->add_option("--dev", dev_path, "dev JSONL for best-checkpoint selection");
  train->add_option("--labels", labels_path, "label inventory file")->required();

  auto* eval = app.add_subcommand("eval", "score a checkpoint on a dataset");
  add_common(eval, opts);
  eval->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();
  eval->add_option("--data", data_path, "JSONL dataset")->required();

  auto* inspect = app.add_subcommand("inspect", "nearest labels by class-point distance");
  inspect->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();
  inspect->add_option("--label", label, "query label")->required();
  inspect->add_option("-k,--k", k, "number of neighbours");

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check every layer");
  add_common(gradcheck, opts);

  auto* bench = app.add_subcommand("bench", "synthetic hyperbolic-vs-euclidean benchmark");
  add_common(bench, opts);
  bench->add_option("--depth", depth, "tree depth")->check(CLI::Range(2, 16));
  bench->add_option("--branching", branching, "tree branching")->check(CLI::Range(2, 16));
  bench->add_option("--dim", dim, "embedding / model dimension");
  bench->add_option("--train-size", n_train, "training examples");
  bench->add_option("--test-size", n_test, "test examples");
  bench->add_option("--epochs", bench_epochs, "training epochs per run");
  bench->add_option("--lr", bench_lr, "learning rate");

  try {
    app.parse(argc, argv);
    if (train->parsed()) return cmd_train(opts, train_path, crowd_path, dev_path, labels_path);
    if (eval->parsed()) return cmd_eval(opts, ckpt_path, data_path);
    if (inspect->parsed()) return cmd_inspect(ckpt_path, label, k);
    if (gradcheck->parsed()) return cmd_gradcheck(opts);
    if (bench->parsed())
      return cmd_bench(opts, depth, branching, dim, n_train, n_test, bench_epochs, bench_lr);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const hynn::numeric_error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
