#include "s3a/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "s3a/error.hpp"
#include "s3a/rng.hpp"

namespace s3a {

namespace {

struct SubjectTags {
  std::string ethnicity;
  std::string gender;
};

std::map<std::string, SubjectTags> subject_tags(const DatasetManifest& m) {
  std::map<std::string, SubjectTags> tags;
  for (const auto& r : m.records) {
    auto [it, inserted] = tags.try_emplace(r.subject_id, SubjectTags{r.ethnicity, r.gender});
    if (!inserted && (it->second.ethnicity != r.ethnicity || it->second.gender != r.gender)) {
      throw Error(Errc::InconsistentSubjectTags,
                  "subject '" + r.subject_id + "' has conflicting ethnicity/gender tags");
    }
  }
  return tags;
}

DatasetManifest select_records(const DatasetManifest& m, std::span<const std::size_t> idx) {
  DatasetManifest out;
  out.subclass_scheme = m.subclass_scheme;
  out.records.reserve(idx.size());
  for (std::size_t i : idx) out.records.push_back(m.records[i]);
  return out;
}

std::vector<int> predictions_from(const Vector& scores) {
  std::vector<int> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= 0.0 ? 1 : -1;
  return out;
}

}  // namespace

std::string_view tool_group_name(ToolGroup t) {
  switch (t) {
    case ToolGroup::Tool1: return "TOOL1";
    case ToolGroup::Tool2: return "TOOL2";
    case ToolGroup::None: break;
  }
  return "NONE";
}

ToolGroup parse_tool_group(std::string_view s) {
  if (s == "TOOL1") return ToolGroup::Tool1;
  if (s == "TOOL2") return ToolGroup::Tool2;
  if (s == "NONE") return ToolGroup::None;
  throw Error(Errc::UnknownTag, "unknown tool group '" + std::string(s) + "'");
}

SplitPlan combined_split(const DatasetManifest& m, std::uint64_t seed) {
  const auto tags = subject_tags(m);
  std::map<std::string, std::vector<std::string>> strata;
  for (const auto& [subject, t] : tags) strata[t.ethnicity + "/" + t.gender].push_back(subject);

  Rng rng(seed);
  SplitPlan plan;
  std::unordered_set<std::string> train;
  for (auto& [key, subjects] : strata) {
    rng.shuffle(subjects.begin(), subjects.end());
    const std::size_t n_train = (subjects.size() + 1) / 2;
    for (std::size_t i = 0; i < subjects.size(); ++i) {
      (i < n_train ? plan.train_subjects : plan.test_subjects).push_back(subjects[i]);
      if (i < n_train) train.insert(subjects[i]);
    }
    plan.strata[key] = {n_train, subjects.size() - n_train};
  }
  std::sort(plan.train_subjects.begin(), plan.train_subjects.end());
  std::sort(plan.test_subjects.begin(), plan.test_subjects.end());
  for (const auto& r : m.records) {
    (train.count(r.subject_id) ? plan.train_ids : plan.test_ids).push_back(r.id);
  }
  return plan;
}

FoldPlan ethnicity_folds(const DatasetManifest& m, const std::string& ethnicity, std::size_t k,
                         std::uint64_t seed) {
  if (k < 2) throw Error(Errc::InvalidArgument, "need at least 2 folds");
  const auto tags = subject_tags(m);
  std::vector<std::string> subjects;
  for (const auto& [subject, t] : tags) {
    if (t.ethnicity == ethnicity) subjects.push_back(subject);
  }
  if (subjects.size() < k) {
    throw Error(Errc::TooFewSubjects, "ethnicity '" + ethnicity + "' has " +
                                          std::to_string(subjects.size()) + " subjects, need " +
                                          std::to_string(k));
  }
  Rng rng(seed);
  rng.shuffle(subjects.begin(), subjects.end());
  FoldPlan plan;
  plan.ethnicity = ethnicity;
  plan.k = k;
  plan.folds.resize(k);
  for (std::size_t i = 0; i < subjects.size(); ++i) plan.folds[i % k].push_back(subjects[i]);
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

std::vector<std::size_t> fold_training_records(const DatasetManifest& m, const FoldPlan& plan,
                                               std::size_t held_out) {
  if (held_out >= plan.folds.size()) throw Error(Errc::IndexError, "fold index out of range");
  std::unordered_set<std::string> subjects;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    if (f != held_out) subjects.insert(plan.folds[f].begin(), plan.folds[f].end());
  }
  struct Taken {
    int originals = 0;
    int tool1 = 0;
    int tool2 = 0;
  };
  std::unordered_map<std::string, Taken> taken;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    const auto& r = m.records[i];
    if (!subjects.count(r.subject_id)) continue;
    auto& t = taken[r.subject_id];
    int* slot = nullptr;
    int limit = 1;
    if (r.class_label == ClassLabel::Original) {
      slot = &t.originals;
      limit = 2;
    } else if (r.tool_group() == ToolGroup::Tool1) {
      slot = &t.tool1;
    } else if (r.tool_group() == ToolGroup::Tool2) {
      slot = &t.tool2;
    }
    if (slot && *slot < limit) {
      ++*slot;
      out.push_back(i);
    }
  }
  return out;
}

std::vector<std::size_t> fold_records(const DatasetManifest& m, const FoldPlan& plan,
                                      std::size_t fold) {
  if (fold >= plan.folds.size()) throw Error(Errc::IndexError, "fold index out of range");
  const std::unordered_set<std::string> subjects(plan.folds[fold].begin(), plan.folds[fold].end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    if (subjects.count(m.records[i].subject_id)) out.push_back(i);
  }
  return out;
}

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size() || predictions.empty()) {
    throw Error(Errc::LengthMismatch, "accuracy needs equal-length, non-empty inputs");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += predictions[i] == labels[i];
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

std::map<BreakdownKey, double> breakdown_by_gender_tool(std::span<const int> predictions,
                                                        const DatasetManifest& m,
                                                        BreakdownRule rule) {
  if (predictions.size() != m.size()) {
    throw Error(Errc::LengthMismatch, "one prediction per record required");
  }
  std::map<BreakdownKey, std::pair<std::size_t, std::size_t>> counts;  // correct, total
  const std::vector<int> labels = svm_labels(m);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& r = m.records[i];
    if (r.gender.empty()) throw Error(Errc::MissingTag, r.id + ": missing gender");
    const bool hit = predictions[i] == labels[i];
    if (r.class_label == ClassLabel::Retouched) {
      const ToolGroup t = r.tool_group();
      if (t == ToolGroup::None) throw Error(Errc::MissingTag, r.id + ": retouched without tool");
      auto& c = counts[{r.gender, t}];
      c.first += hit;
      c.second += 1;
    } else if (rule == BreakdownRule::OriginalsPlusTool) {
      for (ToolGroup t : {ToolGroup::Tool1, ToolGroup::Tool2}) {
        auto& c = counts[{r.gender, t}];
        c.first += hit;
        c.second += 1;
      }
    }
  }
  std::map<BreakdownKey, double> out;
  for (const auto& [key, c] : counts) {
    if (c.second > 0) out[key] = static_cast<double>(c.first) / static_cast<double>(c.second);
  }
  return out;
}

void PipelineConfig::validate() const {
  train.validate();
  if (folds < 2) throw Error(Errc::InvalidConfig, "folds must be >= 2");
  if (algorithms.empty()) throw Error(Errc::InvalidConfig, "no algorithms selected");
  for (const auto& a : algorithms) {
    if (a != kAlgorithmS3A && a != kAlgorithmPretrained) {
      throw Error(Errc::InvalidConfig, "unknown algorithm '" + a + "'");
    }
  }
}

TrainedPipeline train_pipeline(const AutoencoderParams& pretrained, const Matrix& raw,
                               const DatasetManifest& train_records,
                               const std::vector<std::string>& subclass_vocab,
                               const std::string& algorithm, const PipelineConfig& cfg) {
  if (raw.cols() != train_records.size()) {
    throw Error(Errc::StageMismatch, "inputs and manifest disagree on sample count");
  }
  if (raw.rows() != pretrained.input_dim) {
    throw Error(Errc::StageMismatch, "model expects " + std::to_string(pretrained.input_dim) +
                                         " input dims, data has " + std::to_string(raw.rows()));
  }
  TrainedPipeline out;
  const Vector mean = column_mean(raw);
  const Matrix centered = center_columns(raw, mean);
  if (algorithm == kAlgorithmS3A) {
    const GroupPartition partition =
        build_partition(class_ids(train_records), subclass_ids(train_records, subclass_vocab));
    out.model = finetune(pretrained, centered, partition, cfg.train).first;
  } else if (algorithm == kAlgorithmPretrained) {
    out.model = pretrained;
  } else {
    throw Error(Errc::InvalidConfig, "unknown algorithm '" + algorithm + "'");
  }
  out.model.input_mean = mean;
  const Matrix features = encode_stack(out.model, centered);
  out.svm = train_svm(features, svm_labels(train_records), cfg.svm);
  return out;
}

Vector score_pipeline(const TrainedPipeline& p, const Matrix& raw) {
  return decision_values(p.svm, extract_features(p.model, raw));
}

CellStats summarize(std::vector<double> trial_accuracies) {
  CellStats s;
  s.n_trials = trial_accuracies.size();
  if (s.n_trials > 0) {
    double sum = 0.0;
    for (double a : trial_accuracies) sum += a;
    s.mean_accuracy = sum / static_cast<double>(s.n_trials);
    double var = 0.0;
    for (double a : trial_accuracies) var += (a - s.mean_accuracy) * (a - s.mean_accuracy);
    s.std_accuracy = std::sqrt(var / static_cast<double>(s.n_trials));
  }
  s.trial_accuracies = std::move(trial_accuracies);
  return s;
}

EvalReport run_combined(const DatasetManifest& m, const Matrix& raw,
                        const AutoencoderParams& pretrained, const PipelineConfig& cfg) {
  cfg.validate();
  if (raw.cols() != m.size()) {
    throw Error(Errc::StageMismatch, "inputs and manifest disagree on sample count");
  }
  const SplitPlan split = combined_split(m, cfg.seed);
  const std::unordered_set<std::string> train_ids(split.train_ids.begin(), split.train_ids.end());
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (std::size_t i = 0; i < m.size(); ++i) {
    (train_ids.count(m.records[i].id) ? train_idx : test_idx).push_back(i);
  }
  if (train_idx.empty() || test_idx.empty()) {
    throw Error(Errc::TooFewSubjects, "combined split left one side empty");
  }
  const auto vocab = subclass_vocabulary(m);
  const DatasetManifest train = select_records(m, train_idx);
  const DatasetManifest test = select_records(m, test_idx);
  const Matrix train_raw = slice_columns(raw, train_idx);
  const Matrix test_raw = slice_columns(raw, test_idx);
  const std::vector<int> test_labels = svm_labels(test);

  EvalReport report;
  report.protocol = "combined";
  report.seed = cfg.seed;
  report.groups = {"combined"};
  report.algorithms = cfg.algorithms;
  for (const auto& alg : cfg.algorithms) {
    const TrainedPipeline pipeline = train_pipeline(pretrained, train_raw, train, vocab, alg, cfg);
    const Vector scores = score_pipeline(pipeline, test_raw);
    const std::vector<int> predictions = predictions_from(scores);
    report.cells[{"combined", "combined", alg}] = summarize({accuracy(predictions, test_labels)});
    report.breakdowns[alg] = breakdown_by_gender_tool(predictions, test, cfg.breakdown_rule);
    report.roc[alg] = roc_points(scores, test_labels);
  }
  return report;
}

EvalReport run_cross_ethnicity(const DatasetManifest& m, const Matrix& raw,
                               const AutoencoderParams& pretrained, const PipelineConfig& cfg) {
  cfg.validate();
  if (raw.cols() != m.size()) {
    throw Error(Errc::StageMismatch, "inputs and manifest disagree on sample count");
  }
  std::set<std::string> ethnicities;
  for (const auto& r : m.records) ethnicities.insert(r.ethnicity);
  if (ethnicities.size() < 2) {
    throw Error(Errc::InvalidArgument, "cross-ethnicity evaluation needs >= 2 ethnicities");
  }
  const std::vector<std::string> groups(ethnicities.begin(), ethnicities.end());
  const auto vocab = subclass_vocabulary(m);

  std::map<std::string, FoldPlan> plans;
  std::map<std::string, std::vector<std::vector<std::size_t>>> test_folds;
  for (const auto& g : groups) {
    plans[g] = ethnicity_folds(m, g, cfg.folds, cfg.seed);
    for (std::size_t f = 0; f < cfg.folds; ++f) test_folds[g].push_back(fold_records(m, plans[g], f));
  }

  std::map<CellKey, std::vector<double>> trials;
  for (const auto& train_group : groups) {
    for (std::size_t t = 0; t < cfg.folds; ++t) {
      const auto train_idx = fold_training_records(m, plans[train_group], t);
      const DatasetManifest train = select_records(m, train_idx);
      const Matrix train_raw = slice_columns(raw, train_idx);
      for (const auto& alg : cfg.algorithms) {
        const TrainedPipeline pipeline =
            train_pipeline(pretrained, train_raw, train, vocab, alg, cfg);
        for (const auto& test_group : groups) {
          for (std::size_t f = 0; f < cfg.folds; ++f) {
            if (test_group == train_group && f != t) continue;
            const auto& idx = test_folds[test_group][f];
            const Vector scores = score_pipeline(pipeline, slice_columns(raw, idx));
            const std::vector<int> labels = svm_labels(select_records(m, idx));
            trials[{train_group, test_group, alg}].push_back(
                accuracy(predictions_from(scores), labels));
          }
        }
      }
    }
  }

  EvalReport report;
  report.protocol = "cross_ethnicity";
  report.seed = cfg.seed;
  report.groups = groups;
  report.algorithms = cfg.algorithms;
  for (auto& [key, acc] : trials) report.cells[key] = summarize(std::move(acc));
  return report;
}

}  // namespace s3a
