// s3a: command-line driver for the synthetic data, training, feature
// extraction, classification and evaluation stages.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "s3a/autoencoder.hpp"
#include "s3a/classifier.hpp"
#include "s3a/datakit.hpp"
#include "s3a/error.hpp"
#include "s3a/partition.hpp"
#include "s3a/protocol.hpp"
#include "s3a/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using s3a::Errc;
using s3a::Error;

// Training defaults differ from TrainConfig's: lr 0.01 diverges on a few
// hundred centered samples because bias-free codes sit near 0.5.
json default_config() {
  return json{
      {"synth",
       {{"input_dim", 64},
        {"classes", 2},
        {"subclasses_per_class", 2},
        {"samples_per_group", 200},
        {"class_shift", 1.0},
        {"subclass_shift", 3.0},
        {"noise_sigma", s3a::SynthConfig{}.noise_sigma},
        {"seed", 7}}},
      {"train",
       {{"lambda", 1.0},
        {"learning_rate", 1e-4},
        {"pretrain_epochs", 300},
        {"finetune_epochs", 300},
        {"irls_refresh_every", 10},
        {"epsilon", 1e-4},
        {"seed", 0},
        {"grad_clip", nullptr},
        {"tolerance", 1e-7},
        {"patience", 5},
        {"finetune_penalty", "subclass"},
        {"hidden_dims", nullptr}}},
      {"svm", {{"cost_pos", 1.0}, {"cost_neg", 1.0}, {"epochs", 200}, {"standardize", true}}},
      {"evaluate",
       {{"protocol", "cross_ethnicity"},
        {"folds", 5},
        {"seed", 1},
        {"algorithms", {s3a::kAlgorithmS3A, s3a::kAlgorithmPretrained}},
        {"breakdown_rule", "originals_plus_tool"}}},
      {"ingest", {{"image_side", 256}, {"pool", 1}, {"subclass_scheme", "ethnicity"}}},
  };
}

bool nullable(const std::string& path) {
  return path == "train.grad_clip" || path == "train.hidden_dims";
}

bool compatible(const json& slot, const json& v, const std::string& path) {
  if (v.is_null()) return nullable(path) || slot.is_null();
  if (slot.is_null()) return nullable(path);
  if (slot.is_number()) return v.is_number();
  return slot.type() == v.type();
}

// Unknown keys and type changes are rejected.
void merge(json& base, const json& overlay, const std::string& prefix) {
  if (!overlay.is_object()) throw Error(Errc::InvalidConfig, "config must be a JSON object");
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!base.contains(it.key())) throw Error(Errc::InvalidConfig, "unknown config key '" + path + "'");
    json& slot = base[it.key()];
    if (slot.is_object()) {
      merge(slot, it.value(), path);
    } else if (!compatible(slot, it.value(), path)) {
      throw Error(Errc::InvalidConfig, "config key '" + path + "' has the wrong type");
    } else {
      slot = it.value();
    }
  }
}

json parse_override(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(Errc::InvalidConfig, "override '" + kv + "' is not key=value");
  }
  const std::string key = kv.substr(0, eq);
  const std::string text = kv.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json overlay = value;
  std::string rest = key;
  std::vector<std::string> parts;
  for (std::size_t pos; (pos = rest.find('.')) != std::string::npos;) {
    parts.push_back(rest.substr(0, pos));
    rest = rest.substr(pos + 1);
  }
  parts.push_back(rest);
  for (auto p = parts.rbegin(); p != parts.rend(); ++p) overlay = json{{*p, overlay}};
  return overlay;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::MissingInput, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(Errc::IoError, "failed writing '" + path + "'");
}

void ensure_parent(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw Error(Errc::MissingInput, "missing input '" + path + "'");
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("config key '") + key + "': " + e.what());
  }
}

s3a::SynthConfig synth_config(const json& c) {
  const json& j = c.at("synth");
  s3a::SynthConfig s;
  s.input_dim = get<std::size_t>(j, "input_dim");
  s.classes = get<std::size_t>(j, "classes");
  s.subclasses_per_class = get<std::size_t>(j, "subclasses_per_class");
  s.samples_per_group = get<std::size_t>(j, "samples_per_group");
  s.class_shift = get<double>(j, "class_shift");
  s.subclass_shift = get<double>(j, "subclass_shift");
  s.noise_sigma = get<double>(j, "noise_sigma");
  s.seed = get<std::uint64_t>(j, "seed");
  s.validate();
  return s;
}

s3a::TrainConfig train_config(const json& c) {
  const json& j = c.at("train");
  s3a::TrainConfig t;
  t.lambda = get<double>(j, "lambda");
  t.learning_rate = get<double>(j, "learning_rate");
  t.pretrain_epochs = get<std::size_t>(j, "pretrain_epochs");
  t.finetune_epochs = get<std::size_t>(j, "finetune_epochs");
  t.irls_refresh_every = get<std::size_t>(j, "irls_refresh_every");
  t.epsilon = get<double>(j, "epsilon");
  t.seed = get<std::uint64_t>(j, "seed");
  if (!j.at("grad_clip").is_null()) t.grad_clip = get<double>(j, "grad_clip");
  t.tolerance = get<double>(j, "tolerance");
  t.patience = get<std::size_t>(j, "patience");
  const auto kind = get<std::string>(j, "finetune_penalty");
  if (kind == "subclass") {
    t.finetune_penalty = s3a::PenaltyKind::SubclassL21;
  } else if (kind == "class") {
    t.finetune_penalty = s3a::PenaltyKind::ClassL21;
  } else {
    throw Error(Errc::InvalidConfig, "train.finetune_penalty must be 'subclass' or 'class'");
  }
  t.validate();
  return t;
}

std::vector<std::size_t> hidden_dims(const json& c, std::size_t input_dim) {
  const json& h = c.at("train").at("hidden_dims");
  if (h.is_null()) return s3a::default_hidden_dims(input_dim);
  auto dims = get<std::vector<std::size_t>>(c.at("train"), "hidden_dims");
  if (dims.empty()) throw Error(Errc::InvalidConfig, "train.hidden_dims must not be empty");
  return dims;
}

s3a::SvmOptions svm_options(const json& c) {
  const json& j = c.at("svm");
  s3a::SvmOptions o;
  o.cost_pos = get<double>(j, "cost_pos");
  o.cost_neg = get<double>(j, "cost_neg");
  o.epochs = get<std::size_t>(j, "epochs");
  o.standardize = get<bool>(j, "standardize");
  return o;
}

s3a::PipelineConfig pipeline_config(const json& c) {
  const json& j = c.at("evaluate");
  s3a::PipelineConfig p;
  p.train = train_config(c);
  p.svm = svm_options(c);
  p.folds = get<std::size_t>(j, "folds");
  p.seed = get<std::uint64_t>(j, "seed");
  p.algorithms = get<std::vector<std::string>>(j, "algorithms");
  const auto rule = get<std::string>(j, "breakdown_rule");
  if (rule == "originals_plus_tool") {
    p.breakdown_rule = s3a::BreakdownRule::OriginalsPlusTool;
  } else if (rule == "retouched_only") {
    p.breakdown_rule = s3a::BreakdownRule::RetouchedOnly;
  } else {
    throw Error(Errc::InvalidConfig,
                "evaluate.breakdown_rule must be 'originals_plus_tool' or 'retouched_only'");
  }
  p.validate();
  return p;
}

struct Inputs {
  s3a::DatasetManifest manifest;
  s3a::Matrix raw;
};

Inputs load_inputs(const json& c, const std::string& manifest_path) {
  require_file(manifest_path);
  Inputs in;
  in.manifest = s3a::load_manifest(manifest_path);
  in.manifest.subclass_scheme = s3a::parse_scheme(get<std::string>(c.at("ingest"), "subclass_scheme"));
  s3a::IngestOptions opts;
  opts.image_side = get<std::size_t>(c.at("ingest"), "image_side");
  opts.pool = get<std::size_t>(c.at("ingest"), "pool");
  const fs::path base = fs::path(manifest_path).parent_path();
  in.raw = s3a::assemble_inputs(in.manifest, base.empty() ? "." : base.string(), opts);
  return in;
}

s3a::ModelFile load_model_for(const std::string& path, std::size_t input_dim) {
  require_file(path);
  s3a::ModelFile mf = s3a::load_model(path);
  if (mf.params.input_dim != input_dim) {
    throw Error(Errc::StageMismatch, "model '" + path + "' expects input_dim " +
                                         std::to_string(mf.params.input_dim) + " but data has " +
                                         std::to_string(input_dim));
  }
  return mf;
}

s3a::GroupPartition manifest_partition(const s3a::DatasetManifest& m) {
  const auto vocab = s3a::subclass_vocabulary(m);
  const auto cls = s3a::class_ids(m);
  const auto sub = s3a::subclass_ids(m, vocab);
  return s3a::build_partition(cls, sub);
}

void log_training(const char* stage, const s3a::TrainReport& r) {
  std::cerr << stage << ": " << r.epochs_run() << " epochs, final objective " << r.final_objective;
  for (std::size_t i = 0; i < r.stop_reasons.size(); ++i) {
    std::cerr << (i == 0 ? ", stop " : " ") << "L" << i + 1 << "=" << r.stop_reasons[i];
  }
  std::cerr << "\n";
}

struct Paths {
  std::string out_dir = "s3a_out";
  std::string manifest;
  std::string model;
  std::string out;
  std::string features;
  std::string report;
  std::string train_report;

  std::string in_dir(const std::string& explicit_path, const char* name) const {
    return explicit_path.empty() ? (fs::path(out_dir) / name).string() : explicit_path;
  }
};

void cmd_synth(const json& c, const Paths& p) {
  const auto cfg = synth_config(c);
  const auto data = s3a::generate_synthetic(cfg, "features.s3af");
  fs::create_directories(p.out_dir);
  const std::string feat = (fs::path(p.out_dir) / "features.s3af").string();
  const std::string man = (fs::path(p.out_dir) / "manifest.csv").string();
  s3a::save_features(feat, data.X);
  s3a::save_manifest(man, data.manifest);
  std::cerr << "synth: " << data.X.rows() << " x " << data.X.cols() << " -> " << feat << ", "
            << man << "\n";
}

void cmd_pretrain(const json& c, const Paths& p) {
  const auto cfg = train_config(c);
  const Inputs in = load_inputs(c, p.in_dir(p.manifest, "manifest.csv"));
  const s3a::Vector mean = s3a::column_mean(in.raw);
  const s3a::Matrix X = s3a::center_columns(in.raw, mean);
  auto [params, report] = s3a::pretrain(X, hidden_dims(c, X.rows()), cfg);
  params.input_mean = mean;
  const std::string out = p.in_dir(p.out, "pretrained.s3am");
  ensure_parent(out);
  s3a::save_model(out, params, {cfg.lambda, cfg.seed, "pretrained"});
  write_text(p.in_dir(p.train_report, "pretrain_report.jsonl"), report.to_jsonl());
  log_training("pretrain", report);
}

void cmd_finetune(const json& c, const Paths& p) {
  const auto cfg = train_config(c);
  const Inputs in = load_inputs(c, p.in_dir(p.manifest, "manifest.csv"));
  s3a::ModelFile mf = load_model_for(p.in_dir(p.model, "pretrained.s3am"), in.raw.rows());
  const s3a::Vector mean =
      mf.params.input_mean.empty() ? s3a::column_mean(in.raw) : mf.params.input_mean;
  const s3a::Matrix X = s3a::center_columns(in.raw, mean);
  auto [params, report] = s3a::finetune(mf.params, X, manifest_partition(in.manifest), cfg);
  params.input_mean = mean;
  const std::string out = p.in_dir(p.out, "finetuned.s3am");
  ensure_parent(out);
  s3a::save_model(out, params, {cfg.lambda, cfg.seed, "finetuned"});
  write_text(p.in_dir(p.train_report, "finetune_report.jsonl"), report.to_jsonl());
  log_training("finetune", report);
}

void cmd_extract(const json& c, const Paths& p) {
  const Inputs in = load_inputs(c, p.in_dir(p.manifest, "manifest.csv"));
  const s3a::ModelFile mf = load_model_for(p.in_dir(p.model, "finetuned.s3am"), in.raw.rows());
  const s3a::Matrix F = s3a::extract_features(mf.params, in.raw);
  const std::string out = p.in_dir(p.out, "extracted.s3af");
  ensure_parent(out);
  s3a::save_features(out, F);
  std::cerr << "extract: " << F.rows() << " x " << F.cols() << " -> " << out << "\n";
}

void cmd_train_svm(const json& c, const Paths& p) {
  const std::string man = p.in_dir(p.manifest, "manifest.csv");
  const std::string feat = p.in_dir(p.features, "extracted.s3af");
  require_file(man);
  require_file(feat);
  const auto m = s3a::load_manifest(man);
  const s3a::Matrix F = s3a::load_features(feat);
  if (F.cols() != m.size()) {
    throw Error(Errc::StageMismatch, "feature file has " + std::to_string(F.cols()) +
                                         " columns but manifest has " + std::to_string(m.size()) +
                                         " records");
  }
  const auto labels = s3a::svm_labels(m);
  const s3a::SvmModel svm = s3a::train_svm(F, labels, svm_options(c));
  std::size_t correct = 0;
  const s3a::Vector scores = s3a::decision_values(svm, F);
  for (std::size_t i = 0; i < scores.size(); ++i) correct += (scores[i] >= 0.0 ? 1 : -1) == labels[i];
  const std::string out = p.in_dir(p.out, "svm.json");
  write_text(out, s3a::svm_to_json(svm));
  std::cerr << "train-svm: training accuracy "
            << static_cast<double>(correct) / static_cast<double>(scores.size()) << " -> " << out
            << "\n";
}

void cmd_evaluate(const json& c, const Paths& p) {
  const auto cfg = pipeline_config(c);
  const Inputs in = load_inputs(c, p.in_dir(p.manifest, "manifest.csv"));
  const s3a::ModelFile mf = load_model_for(p.in_dir(p.model, "pretrained.s3am"), in.raw.rows());
  const auto protocol = get<std::string>(c.at("evaluate"), "protocol");
  s3a::EvalReport report;
  if (protocol == "combined") {
    report = s3a::run_combined(in.manifest, in.raw, mf.params, cfg);
  } else if (protocol == "cross_ethnicity") {
    report = s3a::run_cross_ethnicity(in.manifest, in.raw, mf.params, cfg);
  } else {
    throw Error(Errc::InvalidConfig, "evaluate.protocol must be 'combined' or 'cross_ethnicity'");
  }
  const std::string out = p.in_dir(p.out, "report.json");
  write_text(out, s3a::report_to_json(report));
  std::cerr << "evaluate: " << report.cells.size() << " cells -> " << out << "\n";
}

void cmd_report(const json&, const Paths& p) {
  const std::string path = p.in_dir(p.report, "report.json");
  const auto report = s3a::report_from_json(read_text(path));
  const std::string cross = s3a::render_cross_table(report);
  write_text((fs::path(p.out_dir) / "cross_table.txt").string(), cross);
  std::cout << cross;
  // Cross-ethnicity reports carry no per-gender/tool breakdowns.
  if (!report.breakdowns.empty()) {
    const std::string breakdown = s3a::render_breakdown_table(report);
    write_text((fs::path(p.out_dir) / "breakdown_table.txt").string(), breakdown);
    std::cout << "\n" << breakdown;
  }
  for (const auto& [alg, points] : report.roc) {
    write_text((fs::path(p.out_dir) / ("roc_" + alg + ".csv")).string(), s3a::render_roc_csv(points));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subclass supervised sparse autoencoder pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  bool dump_config = false;
  Paths paths;

  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--set", overrides, "Override one config key, e.g. train.lambda=0.5");
  app.add_flag("--dump-config", dump_config, "Print the resolved config and exit");
  app.add_option("--out-dir", paths.out_dir, "Artifact directory")->capture_default_str();

  std::size_t pool = 0;
  auto add = [&](const char* name, const char* help, void (*fn)(const json&, const Paths&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->callback([] {});
    return std::make_pair(sub, fn);
  };

  std::vector<std::pair<CLI::App*, void (*)(const json&, const Paths&)>> commands{
      add("synth", "Generate a synthetic dataset", cmd_synth),
      add("pretrain", "L1-regularized layer-wise pretraining", cmd_pretrain),
      add("finetune", "Subclass-supervised fine-tuning", cmd_finetune),
      add("extract", "Extract hidden features", cmd_extract),
      add("train-svm", "Train the cost-sensitive linear SVM", cmd_train_svm),
      add("evaluate", "Run the combined or cross-ethnicity protocol", cmd_evaluate),
      add("report", "Render tables and ROC CSV from a report", cmd_report),
  };
  for (auto& [sub, fn] : commands) {
    sub->add_option("--manifest", paths.manifest, "Manifest CSV");
    sub->add_option("--model", paths.model, "Model file");
    sub->add_option("--features", paths.features, "S3AF feature file");
    sub->add_option("--report", paths.report, "EvalReport JSON");
    sub->add_option("--train-report", paths.train_report, "Per-epoch JSONL output");
    sub->add_option("--out,-o", paths.out, "Output file");
    sub->add_option("--pool", pool, "Average-pool factor for image inputs");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: InvalidArgument: " << e.what() << "\n";
    return 2;
  }

  try {
    json config = default_config();
    if (!config_path.empty()) {
      const json file = json::parse(read_text(config_path), nullptr, false);
      if (file.is_discarded()) {
        throw Error(Errc::InvalidConfig, "config '" + config_path + "' is not valid JSON");
      }
      merge(config, file, "");
    }
    for (const auto& kv : overrides) merge(config, parse_override(kv), "");
    if (pool != 0) config["ingest"]["pool"] = pool;

    if (dump_config) {
      std::cout << config.dump(2) << "\n";
      return 0;
    }
    for (auto& [sub, fn] : commands) {
      if (!sub->parsed()) continue;
      std::cerr << sub->get_name() << " config: " << config.dump() << "\n";
      fn(config, paths);
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << s3a::errc_name(e.code()) << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: IoError: " << e.what() << "\n";
  }
  return 1;
}
