// zsslr: command-line front end for the zero-shot toolkit.
//
//   zsslr synth    --out DIR [shape flags]
//   zsslr train    --config run.json [overrides]
//   zsslr predict  --config run.json --model model.json
//   zsslr eval     --config run.json --model model.json [--random-baseline]
//   zsslr analyze  --config run.json --model model.json (--correct | --confusions N)
//   zsslr baseline (--config run.json | --n-classes N) [--trials T]
//   zsslr sweep    --config run.json --param d_t --values 8,16,32,64
//
// Every run-config field can be overridden by the matching flag. Exit codes:
// 0 success, 2 input error, 3 dimension/schema error, 4 mode error, 1 internal.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zsslr/commands.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> dataset, aggregator, embedding, method, output_dir;
  std::optional<std::vector<double>> tsm_weights;
  std::optional<bool> use_hand;
  std::optional<long long> d_t, epochs, repeats;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda, gamma, lambda_sae, learning_rate, init_scale, gzsl_holdout;
  std::optional<std::vector<int>> ks;
  std::optional<std::size_t> trials;
};

void add_run_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "run-config JSON file");
  cmd->add_option("--dataset", o.dataset, "dataset manifest");
  cmd->add_option("--aggregator", o.aggregator, "avgpool | tsm");
  cmd->add_option("--tsm-weights", o.tsm_weights, "w1,w2,w3")->delimiter(',')->expected(3);
  cmd->add_option("--use-hand", o.use_hand, "concatenate the hand stream (true/false)");
  cmd->add_option("--embedding", o.embedding, "attr | text | combined");
  cmd->add_option("--d-t", o.d_t, "reduced text width");
  cmd->add_option("--method", o.method, "lle | eszsl | sae");
  cmd->add_option("--lambda", o.lambda, "LLE weight decay / ESZSL class ridge");
  cmd->add_option("--gamma", o.gamma, "ESZSL video ridge");
  cmd->add_option("--lambda-sae", o.lambda_sae, "SAE reconstruction weight");
  cmd->add_option("--lr", o.learning_rate, "LLE step size");
  cmd->add_option("--epochs", o.epochs, "LLE epochs");
  cmd->add_option("--seed", o.seed, "seed");
  cmd->add_option("--init-scale", o.init_scale, "LLE init range");
  cmd->add_option("--ks", o.ks, "top-k list, e.g. 1,2,5")->delimiter(',');
  cmd->add_option("-o,--out", o.output_dir, "output directory");
  cmd->add_option("--repeats", o.repeats, "number of seeded repeats");
  cmd->add_option("--gzsl-holdout", o.gzsl_holdout, "fraction of each seen class held out in GZSL");
  cmd->add_option("--trials", o.trials, "random-baseline trials");
}

zsslr::RunConfig resolve(const Overrides& o) {
  nlohmann::json doc = o.config.empty() ? zsslr::default_config_json() : zsslr::read_config_json(o.config);
  const auto set = [&](const char* key, const auto& value) {
    if (value) doc[key] = *value;
  };
  set("dataset", o.dataset);
  set("aggregator", o.aggregator);
  set("tsm_weights", o.tsm_weights);
  set("use_hand", o.use_hand);
  set("embedding", o.embedding);
  set("d_t", o.d_t);
  set("method", o.method);
  set("lambda", o.lambda);
  set("gamma", o.gamma);
  set("lambda_sae", o.lambda_sae);
  set("learning_rate", o.learning_rate);
  set("epochs", o.epochs);
  set("seed", o.seed);
  set("init_scale", o.init_scale);
  set("ks", o.ks);
  set("output_dir", o.output_dir);
  set("repeats", o.repeats);
  set("gzsl_holdout", o.gzsl_holdout);
  set("baseline_trials", o.trials);
  return zsslr::config_from_json(doc);
}

void require_dataset(const zsslr::RunConfig& cfg) {
  if (cfg.dataset.empty()) throw zsslr::Error(zsslr::ErrorKind::InvalidConfig, "no dataset (use --config or --dataset)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-shot sign recognition toolkit over precomputed feature sequences"};
  app.require_subcommand(1);
  Overrides o;

  auto* synth = app.add_subcommand("synth", "write a synthetic dataset with planted structure");
  zsslr::SynthSpec spec;
  std::string synth_out, synth_mode = "zsl";
  synth->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  synth->add_option("-o,--out", synth_out, "target directory")->required();
  synth->add_option("--n-classes", spec.n_classes);
  synth->add_option("--n-seen", spec.n_seen);
  synth->add_option("--n-unseen", spec.n_unseen);
  synth->add_option("--attributes", spec.attribute_count);
  synth->add_option("--text-dim", spec.text_dim);
  synth->add_option("--samples-per-class", spec.samples_per_class);
  synth->add_option("--snippets", spec.snippets);
  synth->add_option("--feature-dim", spec.feature_dim);
  synth->add_option("--noise", spec.noise_sigma);
  synth->add_option("--map-scale", spec.planted_map_scale);
  synth->add_flag("--with-hand", spec.with_hand);
  synth->add_option("--mode", synth_mode, "zsl | gzsl");
  synth->add_option("--seed", spec.seed);

  auto* train = app.add_subcommand("train", "train compatibility models");
  add_run_options(train, o);

  std::string model_path;
  auto* predict = app.add_subcommand("predict", "write test-set predictions");
  add_run_options(predict, o);
  predict->add_option("-m,--model", model_path)->required();

  bool random_flag = false;
  auto* eval = app.add_subcommand("eval", "evaluate a model on the test protocol");
  add_run_options(eval, o);
  eval->add_option("-m,--model", model_path)->required();
  eval->add_flag("--random-baseline", random_flag, "add a Monte-Carlo random-ranking row");

  zsslr::AnalyzeOptions aopt;
  auto* analyze = app.add_subcommand("analyze", "flip-difference attribute influence");
  add_run_options(analyze, o);
  analyze->add_option("-m,--model", model_path)->required();
  auto* correct_flag = analyze->add_flag("--correct", aopt.correct, "influence on correct predictions");
  auto* confusions_opt = analyze->add_option("--confusions", aopt.confusions, "top-N confusion analysis");
  correct_flag->excludes(confusions_opt);
  analyze->add_option("--min-affiliation", aopt.min_affiliation, "classes needed for the affiliation summary");

  std::optional<std::size_t> n_classes;
  auto* baseline = app.add_subcommand("baseline", "random-ranking baseline");
  add_run_options(baseline, o);
  baseline->add_option("--n-classes", n_classes, "candidate count (one sample per class)");

  std::string param = "d_t";
  std::vector<double> values;
  auto* sweep = app.add_subcommand("sweep", "validation accuracy over one hyperparameter");
  add_run_options(sweep, o);
  sweep->add_option("--param", param, "d_t | lambda | gamma | lambda_sae | learning_rate");
  sweep->add_option("--values", values, "comma-separated values")->delimiter(',')->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) {
      if (synth_mode != "zsl" && synth_mode != "gzsl")
        throw zsslr::Error(zsslr::ErrorKind::InvalidConfig, "--mode must be zsl or gzsl");
      spec.mode = synth_mode == "zsl" ? zsslr::SplitMode::ZSL : zsslr::SplitMode::GZSL;
      zsslr::cmd_synth(spec, synth_out, std::cout);
      return 0;
    }
    const zsslr::RunConfig cfg = resolve(o);
    if (train->parsed()) {
      require_dataset(cfg);
      zsslr::cmd_train(cfg, std::cout, std::cerr);
    } else if (predict->parsed()) {
      require_dataset(cfg);
      zsslr::cmd_predict(cfg, model_path, std::cout, std::cerr);
    } else if (eval->parsed()) {
      require_dataset(cfg);
      zsslr::cmd_eval(cfg, model_path, random_flag, std::cout, std::cerr);
    } else if (analyze->parsed()) {
      require_dataset(cfg);
      zsslr::cmd_analyze(cfg, model_path, aopt, std::cout, std::cerr);
    } else if (baseline->parsed()) {
      if (!n_classes) require_dataset(cfg);
      zsslr::cmd_baseline(cfg, n_classes, std::cout);
    } else if (sweep->parsed()) {
      require_dataset(cfg);
      zsslr::cmd_sweep(cfg, param, values, std::cout, std::cerr);
    }
  } catch (const zsslr::Error& e) {
    std::cerr << e.what() << '\n';
    return zsslr::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
