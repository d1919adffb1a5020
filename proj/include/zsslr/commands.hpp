#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsslr/attr_influence.hpp"
#include "zsslr/data_model.hpp"
#include "zsslr/eval.hpp"
#include "zsslr/run_config.hpp"
#include "zsslr/synth.hpp"
#include "zsslr/zsl_core.hpp"

namespace zsslr {

/// 0 success, 2 input error, 3 dimension/schema error, 4 mode error, 1 internal.
inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingFile:
    case ErrorKind::ParseError:
    case ErrorKind::InvariantViolation:
    case ErrorKind::InvalidConfig:
    case ErrorKind::IoError:
    case ErrorKind::DegenerateData:
    case ErrorKind::EmptyEvaluationSet:
    case ErrorKind::UnrankedClass:
    case ErrorKind::NoMisclassifications:
    case ErrorKind::MissingHandStream:
      return 2;
    case ErrorKind::DimensionMismatch:
    case ErrorKind::SchemaMismatch:
    case ErrorKind::MissingReduction:
      return 3;
    case ErrorKind::ModeWithoutAttributes:
      return 4;
    default:
      return 1;
  }
}

// ---------------------------------------------------------------------------
// Evaluation protocol

/// Which samples train, which test, and which classes compete at test time.
///  ZSL : train on seen-class samples; test unseen samples against unseen classes.
///  GZSL: a fixed tail of each seen class is held out; test the held-out seen
///        samples plus unseen samples against seen and unseen classes.
struct Protocol {
  std::vector<const Sample*> train;
  std::vector<const Sample*> test;
  std::set<std::string> candidates;
  std::vector<const Sample*> validation;
};

inline Protocol make_protocol(const Dataset& data, double gzsl_holdout) {
  Protocol p;
  const bool gzsl = data.split.mode == SplitMode::GZSL;
  std::map<std::string, std::vector<const Sample*>> by_seen_class;
  for (const auto& s : data.samples) {
    if (data.split.seen.count(s.class_id))
      by_seen_class[s.class_id].push_back(&s);
    else if (data.split.unseen.count(s.class_id))
      p.test.push_back(&s);
    else if (data.split.validation.count(s.class_id))
      p.validation.push_back(&s);
  }
  std::set<const Sample*> held_out;
  for (const auto& [cls, members] : by_seen_class) {
    std::size_t n_hold = 0;
    if (gzsl && members.size() >= 2)
      n_hold = std::min(members.size() - 1,
                        static_cast<std::size_t>(std::ceil(gzsl_holdout * static_cast<double>(members.size()))));
    for (std::size_t i = 0; i < members.size(); ++i)
      if (i >= members.size() - n_hold) held_out.insert(members[i]);
  }
  std::vector<const Sample*> test_seen;
  for (const auto& s : data.samples) {
    if (!data.split.seen.count(s.class_id)) continue;
    (held_out.count(&s) ? test_seen : p.train).push_back(&s);
  }
  if (gzsl) {
    p.test.insert(p.test.begin(), test_seen.begin(), test_seen.end());
    p.candidates = data.split.seen;
  }
  p.candidates.insert(data.split.unseen.begin(), data.split.unseen.end());
  return p;
}

inline bool effective_use_hand(const RunConfig& cfg, const Dataset& data, std::ostream* log = nullptr) {
  if (!cfg.use_hand) return false;
  if (data.hand_available()) return true;
  if (log) *log << "note: some samples lack a hand stream; using the body stream only\n";
  return false;
}

inline std::vector<EvalSample> embed_eval_samples(std::span<const Sample* const> samples, const RunConfig& cfg,
                                                  bool use_hand) {
  std::vector<EvalSample> out;
  out.reserve(samples.size());
  for (const Sample* s : samples)
    out.push_back({s->sample_id, s->class_id, embed_video(*s, cfg.aggregator, use_hand).vector});
  return out;
}

inline TrainResult train_model(const Dataset& data, std::span<const Sample* const> train, const RunConfig& cfg,
                               bool use_hand) {
  const TrainingSet ts = make_training_set(data, train, cfg.aggregator, use_hand);
  switch (cfg.method) {
    case Method::LLE: return train_lle(ts, cfg.embedding, cfg.train);
    case Method::ESZSL: return train_eszsl(ts, cfg.embedding, cfg.gamma, cfg.train.lambda);
    case Method::SAE: return train_sae(ts, cfg.embedding, cfg.lambda_sae);
  }
  throw Error(ErrorKind::InvalidConfig, "unknown method");
}

struct Evaluation {
  std::vector<EvalSample> samples;
  std::vector<Prediction> predictions;
  EvalReport report;
};

inline Evaluation evaluate(const CompatModel& model, const Dataset& data, std::span<const Sample* const> samples,
                           const std::set<std::string>& candidates, const RunConfig& cfg, bool use_hand, bool gzsl) {
  Evaluation ev;
  ev.samples = embed_eval_samples(samples, cfg, use_hand);
  const auto descriptors = data.descriptors(candidates);
  const auto embeddings = model.embed(descriptors);
  std::vector<Ranking> rankings;
  std::vector<std::string> truths;
  for (const auto& s : ev.samples) {
    ev.predictions.push_back(predict(s.phi, model, embeddings));
    rankings.push_back(ranking_ids(ev.predictions.back()));
    truths.push_back(s.truth);
  }
  ev.report = gzsl ? gzsl_report(rankings, truths, data.split, cfg.ks) : topk_accuracy(rankings, truths, cfg.ks);
  return ev;
}

// ---------------------------------------------------------------------------
// Output helpers

namespace detail {

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

inline nlohmann::json accuracy_json(const AccuracyByK& acc) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [k, v] : acc) out["top" + std::to_string(k)] = v;
  return out;
}

inline std::pair<double, double> mean_stddev(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

}  // namespace detail

inline nlohmann::json report_to_json(const EvalReport& r) {
  using detail::accuracy_json;
  nlohmann::json doc;
  doc["per_k"] = accuracy_json(r.per_k);
  if (r.harmonic_per_k) {
    doc["seen_per_k"] = r.seen_per_k ? accuracy_json(*r.seen_per_k) : nlohmann::json(nullptr);
    doc["unseen_per_k"] = r.unseen_per_k ? accuracy_json(*r.unseen_per_k) : nlohmann::json(nullptr);
    doc["harmonic_per_k"] = accuracy_json(*r.harmonic_per_k);
  }
  nlohmann::json per_class = nlohmann::json::object();
  for (const auto& [cls, acc] : r.per_class) per_class[cls] = accuracy_json(acc);
  doc["per_class"] = per_class;
  doc["n_samples"] = r.n_samples;
  doc["n_classes"] = r.n_classes;
  return doc;
}

inline nlohmann::json influence_to_json(const InfluenceReport& r) {
  nlohmann::json doc;
  doc["kind"] = r.kind == InfluenceKind::CorrectConfidence ? "correct_confidence" : "confusion_log_ratio";
  doc["attribute_names"] = r.attribute_names;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json j;
    if (r.kind == InfluenceKind::CorrectConfidence) {
      j["class"] = row.truth;
    } else {
      j["ground_truth"] = row.truth;
      j["predicted"] = row.predicted;
    }
    j["support"] = row.support;
    j["scores"] = std::vector<double>(row.scores.data(), row.scores.data() + row.scores.size());
    rows.push_back(j);
  }
  doc["rows"] = rows;
  doc["omitted"] = r.omitted;
  return doc;
}

/// Heatmap matrix: one row per subject, attribute names as columns.
inline std::string influence_to_csv(const InfluenceReport& r) {
  std::string out = "subject,support";
  for (const auto& n : r.attribute_names) out += "," + n;
  out += '\n';
  for (const auto& row : r.rows) {
    out += row.predicted.empty() ? row.truth : row.truth + "->" + row.predicted;
    out += "," + std::to_string(row.support);
    for (Eigen::Index k = 0; k < row.scores.size(); ++k) out += "," + format_real(row.scores[k]);
    out += '\n';
  }
  return out;
}

/// Companion 0/1 matrix of positive class-attribute affiliations for each
/// report row, taken from `class_id_of(row)`.
template <typename ClassOf>
std::string affiliation_csv(const InfluenceReport& r, const Dataset& data, ClassOf class_id_of) {
  std::string out = "subject";
  for (const auto& n : r.attribute_names) out += "," + n;
  out += '\n';
  for (const auto& row : r.rows) {
    out += row.predicted.empty() ? row.truth : row.truth + "->" + row.predicted;
    const Vector& attrs = data.class_at(class_id_of(row)).attributes;
    for (Eigen::Index k = 0; k < attrs.size(); ++k) out += attrs[k] == 1.0 ? ",1" : ",0";
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands

inline void cmd_synth(const SynthSpec& spec, const std::filesystem::path& out_dir, std::ostream& out) {
  const SynthResult r = generate(spec);
  const auto manifest = save_dataset(r.dataset, out_dir);
  out << "wrote " << r.dataset.classes.size() << " classes, " << r.dataset.samples.size() << " samples to "
      << manifest.string() << '\n';
}

inline std::string loss_log_csv(const std::vector<double>& history) {
  std::string s = "epoch,loss\n";
  for (std::size_t e = 0; e < history.size(); ++e) s += std::to_string(e) + "," + format_real(history[e]) + "\n";
  return s;
}

/// Trains `repeats` models with seeds seed, seed+1, ...; each is evaluated on
/// the test protocol and the mean/stddev is written to train_summary.json.
inline void cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const Dataset data = load_dataset(cfg.dataset);
  const bool use_hand = effective_use_hand(cfg, data, &log);
  const Protocol p = make_protocol(data, cfg.gzsl_holdout);
  const std::filesystem::path dir = resolve_output_dir(cfg.output_dir, "train");
  detail::ensure_dir(dir);
  detail::write_json(dir / "effective_config.json", config_to_json(cfg));

  const bool gzsl = data.split.mode == SplitMode::GZSL;
  nlohmann::json runs = nlohmann::json::array();
  std::vector<double> losses;
  std::map<std::string, std::map<int, std::vector<double>>> acc;  // series -> k -> values
  for (int r = 0; r < cfg.repeats; ++r) {
    RunConfig rc = cfg;
    rc.train.seed = cfg.train.seed + static_cast<std::uint64_t>(r);
    TrainResult tr = train_model(data, p.train, rc, use_hand);
    tr.model.seed = rc.train.seed;
    const std::string suffix = cfg.repeats > 1 ? "_r" + std::to_string(r) : "";
    save_model(tr.model, dir / ("model" + suffix + ".json"));
    if (r == 0 && cfg.repeats > 1) save_model(tr.model, dir / "model.json");
    if (!tr.loss_history.empty()) detail::write_text(dir / ("train_log" + suffix + ".csv"), loss_log_csv(tr.loss_history));

    nlohmann::json run = {{"seed", rc.train.seed}, {"epochs", tr.model.epochs}};
    run["final_loss"] = std::isfinite(tr.model.final_loss) ? nlohmann::json(tr.model.final_loss) : nlohmann::json(nullptr);
    if (std::isfinite(tr.model.final_loss)) losses.push_back(tr.model.final_loss);
    if (!p.test.empty()) {
      const Evaluation ev = evaluate(tr.model, data, p.test, p.candidates, rc, use_hand, gzsl);
      run["test"] = report_to_json(ev.report);
      for (const auto& [k, v] : ev.report.per_k) acc["overall"][k].push_back(v);
      if (ev.report.seen_per_k)
        for (const auto& [k, v] : *ev.report.seen_per_k) acc["seen"][k].push_back(v);
      if (ev.report.unseen_per_k)
        for (const auto& [k, v] : *ev.report.unseen_per_k) acc["unseen"][k].push_back(v);
      if (ev.report.harmonic_per_k)
        for (const auto& [k, v] : *ev.report.harmonic_per_k) acc["harmonic"][k].push_back(v);
    }
    runs.push_back(run);
    out << "repeat " << r << " seed " << rc.train.seed << " epochs " << tr.model.epochs;
    if (std::isfinite(tr.model.final_loss)) out << " final_loss " << format_real(tr.model.final_loss);
    out << '\n';
  }

  nlohmann::json summary;
  summary["method"] = to_string(cfg.method);
  summary["repeats"] = cfg.repeats;
  summary["runs"] = runs;
  if (!losses.empty()) {
    const auto [m, s] = detail::mean_stddev(losses);
    summary["final_loss"] = {{"mean", m}, {"stddev", s}};
  }
  for (const auto& [series, by_k] : acc)
    for (const auto& [k, values] : by_k) {
      const auto [m, s] = detail::mean_stddev(values);
      summary["test_" + series]["top" + std::to_string(k)] = {{"mean", m}, {"stddev", s}};
    }
  detail::write_json(dir / "train_summary.json", summary);
}

struct ModelContext {
  Dataset data;
  CompatModel model;
  Protocol protocol;
  bool use_hand = false;
};

inline ModelContext load_for_model(const RunConfig& cfg, const std::filesystem::path& model_path, std::ostream& log) {
  ModelContext ctx{load_dataset(cfg.dataset), load_model(model_path), {}, false};
  ctx.use_hand = effective_use_hand(cfg, ctx.data, &log);
  ctx.protocol = make_protocol(ctx.data, cfg.gzsl_holdout);
  return ctx;
}

inline void cmd_predict(const RunConfig& cfg, const std::filesystem::path& model_path, std::ostream& out,
                        std::ostream& log) {
  const ModelContext ctx = load_for_model(cfg, model_path, log);
  const std::filesystem::path dir = resolve_output_dir(cfg.output_dir, "predict");
  detail::ensure_dir(dir);
  const bool gzsl = ctx.data.split.mode == SplitMode::GZSL;
  const Evaluation ev =
      evaluate(ctx.model, ctx.data, ctx.protocol.test, ctx.protocol.candidates, cfg, ctx.use_hand, gzsl);
  const int max_k = *std::max_element(cfg.ks.begin(), cfg.ks.end());
  std::string csv = "sample_id,truth,predicted,score,top_" + std::to_string(max_k) + "\n";
  for (std::size_t i = 0; i < ev.samples.size(); ++i) {
    const Prediction& p = ev.predictions[i];
    csv += ev.samples[i].sample_id + "," + ev.samples[i].truth + "," + p.class_id + "," +
           format_real(p.ranking.front().score) + ",";
    for (std::size_t r = 0; r < p.ranking.size() && r < static_cast<std::size_t>(max_k); ++r)
      csv += (r ? ";" : "") + p.ranking[r].class_id;
    csv += '\n';
  }
  detail::write_text(dir / "predictions.csv", csv);
  out << "wrote " << ev.samples.size() << " predictions to " << (dir / "predictions.csv").string() << '\n';
}

inline void cmd_eval(const RunConfig& cfg, const std::filesystem::path& model_path, bool with_random_baseline,
                     std::ostream& out, std::ostream& log) {
  const ModelContext ctx = load_for_model(cfg, model_path, log);
  const std::filesystem::path dir = resolve_output_dir(cfg.output_dir, "eval");
  detail::ensure_dir(dir);
  const bool gzsl = ctx.data.split.mode == SplitMode::GZSL;
  const Evaluation ev =
      evaluate(ctx.model, ctx.data, ctx.protocol.test, ctx.protocol.candidates, cfg, ctx.use_hand, gzsl);

  nlohmann::json doc = report_to_json(ev.report);
  doc["mode"] = gzsl ? "gzsl" : "zsl";
  doc["candidates"] = ctx.protocol.candidates;
  std::optional<AccuracyByK> baseline;
  if (with_random_baseline) {
    std::map<std::string, std::size_t> sizes;
    for (const auto& s : ev.samples) ++sizes[s.truth];
    std::vector<std::size_t> class_sizes;
    for (const auto& [cls, n] : sizes) class_sizes.push_back(n);
    baseline = random_baseline(ctx.protocol.candidates.size(), class_sizes, cfg.ks, cfg.baseline_trials,
                               cfg.train.seed);
    doc["random_baseline"] = detail::accuracy_json(*baseline);
  }
  detail::write_json(dir / "eval_report.json", doc);
  out << format_report_table(ev.report, cfg.ks, baseline);
}

struct AnalyzeOptions {
  bool correct = false;
  std::size_t confusions = 0;  // > 0 selects the confusion analysis
  std::size_t min_affiliation = 10;
};

inline void cmd_analyze(const RunConfig& cfg, const std::filesystem::path& model_path, const AnalyzeOptions& opt,
                        std::ostream& out, std::ostream& log) {
  if (opt.correct == (opt.confusions > 0))
    throw Error(ErrorKind::InvalidConfig, "choose exactly one of --correct and --confusions N");
  const ModelContext ctx = load_for_model(cfg, model_path, log);
  if (!ctx.model.mode.uses_attributes())
    throw Error(ErrorKind::ModeWithoutAttributes, "attribute influence needs an attr or combined model");
  const std::filesystem::path dir = resolve_output_dir(cfg.output_dir, "analyze");
  detail::ensure_dir(dir);

  const CandidateSet candidates(ctx.model, ctx.data.descriptors(ctx.protocol.candidates));
  std::vector<const Sample*> unseen_samples;
  for (const Sample* s : ctx.protocol.test)
    if (ctx.data.split.unseen.count(s->class_id) && !ctx.data.split.seen.count(s->class_id))
      unseen_samples.push_back(s);
  const auto samples = embed_eval_samples(unseen_samples, cfg, ctx.use_hand);
  std::set<std::string> unseen;
  for (const auto& id : ctx.data.split.unseen)
    if (!ctx.data.split.seen.count(id)) unseen.insert(id);

  if (opt.correct) {
    const InfluenceReport r = class_influence_matrix(candidates, samples, unseen, ctx.data.attribute_names);
    nlohmann::json doc = influence_to_json(r);
    const auto descriptors = ctx.data.descriptors(unseen);
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& s : positive_affiliation_summary(r, descriptors, opt.min_affiliation))
      summary.push_back({{"attribute", s.name}, {"mean_influence", s.mean_influence}, {"classes", s.affiliated_classes}});
    doc["positive_affiliation_summary"] = summary;
    doc["min_affiliation"] = opt.min_affiliation;
    detail::write_json(dir / "influence_correct.json", doc);
    detail::write_text(dir / "influence_correct.csv", influence_to_csv(r));
    detail::write_text(dir / "affiliation_correct.csv",
                       affiliation_csv(r, ctx.data, [](const InfluenceRow& row) { return row.truth; }));
    out << "correct-confidence influence: " << r.rows.size() << " classes, " << r.omitted.size() << " omitted\n";
  } else {
    const InfluenceReport r = confusion_influence_matrix(candidates, samples, opt.confusions, ctx.data.attribute_names);
    detail::write_json(dir / "influence_confusions.json", influence_to_json(r));
    detail::write_text(dir / "influence_confusions.csv", influence_to_csv(r));
    detail::write_text(dir / "affiliation_predicted.csv",
                       affiliation_csv(r, ctx.data, [](const InfluenceRow& row) { return row.predicted; }));
    detail::write_text(dir / "affiliation_truth.csv",
                       affiliation_csv(r, ctx.data, [](const InfluenceRow& row) { return row.truth; }));
    out << "confusion influence: " << r.rows.size() << " confusions\n";
  }
}

/// Random baseline for either an explicit class count (one sample per class)
/// or the test protocol of a dataset.
inline AccuracyByK cmd_baseline(const RunConfig& cfg, std::optional<std::size_t> n_classes, std::ostream& out) {
  std::size_t candidates = 0;
  std::vector<std::size_t> sizes;
  if (n_classes) {
    candidates = *n_classes;
    sizes.assign(*n_classes, 1);
  } else {
    const Dataset data = load_dataset(cfg.dataset);
    const Protocol p = make_protocol(data, cfg.gzsl_holdout);
    std::map<std::string, std::size_t> count;
    for (const Sample* s : p.test) ++count[s->class_id];
    for (const auto& [cls, n] : count) sizes.push_back(n);
    candidates = p.candidates.size();
  }
  const AccuracyByK acc = random_baseline(candidates, sizes, cfg.ks, cfg.baseline_trials, cfg.train.seed);
  const std::filesystem::path dir = resolve_output_dir(cfg.output_dir, "baseline");
  detail::ensure_dir(dir);
  detail::write_json(dir / "baseline.json", {{"n_classes", candidates},
                                             {"trials", cfg.baseline_trials},
                                             {"seed", cfg.train.seed},
                                             {"accuracy", detail::accuracy_json(acc)}});
  EvalReport shell;
  shell.per_k = acc;
  std::string table = format_report_table(shell, cfg.ks);
  table.replace(table.find("Overall"), 7, "Random ");
  out << table;
  return acc;
}

inline RunConfig with_parameter(RunConfig cfg, const std::string& param, double value) {
  if (param == "d_t") {
    if (value < 1 || value != std::floor(value)) throw Error(ErrorKind::InvalidConfig, "d_t values must be positive integers");
    cfg.embedding.text_dim = static_cast<Eigen::Index>(value);
  } else if (param == "lambda") {
    cfg.train.lambda = value;
  } else if (param == "gamma") {
    cfg.gamma = value;
  } else if (param == "lambda_sae") {
    cfg.lambda_sae = value;
  } else if (param == "learning_rate") {
    cfg.train.learning_rate = value;
  } else {
    throw Error(ErrorKind::InvalidConfig, "cannot sweep \"" + param + "\" (d_t, lambda, gamma, lambda_sae, learning_rate)");
  }
  return cfg;
}

struct SweepRow {
  double value = 0.0;
  double mean_top1 = 0.0;
  double stddev_top1 = 0.0;
};

/// Validation top-1 (ZSL over validation classes) for each value of one
/// hyperparameter, averaged over `repeats` seeds.
inline std::vector<SweepRow> cmd_sweep(const RunConfig& cfg, const std::string& param,
                                       const std::vector<double>& values, std::ostream& out, std::ostream& log) {
  if (param == "d_t" && !cfg.embedding.uses_text())
    throw Error(ErrorKind::ModeWithoutAttributes, "sweeping d_t needs a text or combined embedding");
  const Dataset data = load_dataset(cfg.dataset);
  if (data.split.validation.empty()) throw Error(ErrorKind::InvalidConfig, "sweep needs validation classes");
  const bool use_hand = effective_use_hand(cfg, data, &log);
  const Protocol p = make_protocol(data, cfg.gzsl_holdout);
  const std::filesystem::path dir = resolve_output_dir(cfg.output_dir, "sweep");
  detail::ensure_dir(dir);
  detail::write_json(dir / "effective_config.json", config_to_json(cfg));

  std::vector<SweepRow> rows;
  std::string csv = "value,mean_val_top1,stddev\n";
  for (double v : values) {
    RunConfig vc = with_parameter(cfg, param, v);
    std::vector<double> top1;
    for (int r = 0; r < cfg.repeats; ++r) {
      RunConfig rc = vc;
      rc.train.seed = cfg.train.seed + static_cast<std::uint64_t>(r);
      rc.ks = {1};
      const TrainResult tr = train_model(data, p.train, rc, use_hand);
      const Evaluation ev = evaluate(tr.model, data, p.validation, data.split.validation, rc, use_hand, false);
      top1.push_back(ev.report.per_k.at(1));
    }
    const auto [m, s] = detail::mean_stddev(top1);
    rows.push_back({v, m, s});
    csv += format_real(v) + "," + format_real(m) + "," + format_real(s) + "\n";
    out << param << "=" << format_real(v) << "  val top-1 " << format_one_decimal(m) << " +- "
        << format_one_decimal(s) << '\n';
  }
  detail::write_text(dir / "sweep.csv", csv);
  return rows;
}

}  // namespace zsslr
