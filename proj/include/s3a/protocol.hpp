#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "s3a/autoencoder.hpp"
#include "s3a/classifier.hpp"
#include "s3a/datakit.hpp"
#include "s3a/trainer.hpp"

namespace s3a {

/// Subject-disjoint train/test split. Ids are record ids in manifest order.
struct SplitPlan {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::vector<std::string> train_subjects;
  std::vector<std::string> test_subjects;
  /// "ethnicity/gender" -> {train subjects, test subjects}
  std::map<std::string, std::pair<std::size_t, std::size_t>> strata;
};

/// Subject folds for one ethnicity; fold sizes differ by at most one.
struct FoldPlan {
  std::string ethnicity;
  std::size_t k = 0;
  std::vector<std::vector<std::string>> folds;
};

/// Stratifies subjects by (ethnicity, gender) and sends ceil(n/2) of each
/// stratum to training. Throws InconsistentSubjectTags.
SplitPlan combined_split(const DatasetManifest& m, std::uint64_t seed);

/// Throws TooFewSubjects when the ethnicity has fewer than k subjects.
FoldPlan ethnicity_folds(const DatasetManifest& m, const std::string& ethnicity, std::size_t k,
                         std::uint64_t seed);

/// Record indices used to train when `held_out` is the test fold: from every
/// other fold's subjects, the first two originals and the first image of each tool.
std::vector<std::size_t> fold_training_records(const DatasetManifest& m, const FoldPlan& plan,
                                               std::size_t held_out);
/// Every record index of the subjects in one fold.
std::vector<std::size_t> fold_records(const DatasetManifest& m, const FoldPlan& plan,
                                      std::size_t fold);

double accuracy(std::span<const int> predictions, std::span<const int> labels);

/// Which test records a (gender, tool) breakdown cell scores.
enum class BreakdownRule {
  OriginalsPlusTool,  ///< originals of the gender plus retouched of the gender and tool
  RetouchedOnly,      ///< retouched of the gender and tool only
};

using BreakdownKey = std::pair<std::string, ToolGroup>;  // gender, tool

/// predictions[k] is the +1/-1 prediction for records[k]. Empty cells are omitted.
std::map<BreakdownKey, double> breakdown_by_gender_tool(
    std::span<const int> predictions, const DatasetManifest& m,
    BreakdownRule rule = BreakdownRule::OriginalsPlusTool);

inline constexpr const char* kAlgorithmS3A = "S3A";
inline constexpr const char* kAlgorithmPretrained = "L1-AE";

struct PipelineConfig {
  TrainConfig train;
  SvmOptions svm;
  std::size_t folds = 5;
  std::uint64_t seed = 1;
  /// Any of kAlgorithmS3A (fine-tuned features) and kAlgorithmPretrained.
  std::vector<std::string> algorithms{kAlgorithmS3A, kAlgorithmPretrained};
  BreakdownRule breakdown_rule = BreakdownRule::OriginalsPlusTool;

  void validate() const;
};

/// Feature extractor plus classifier trained on one training subset.
struct TrainedPipeline {
  AutoencoderParams model;
  SvmModel svm;
};

/// Centers on the training mean, fine-tunes (S3A) or keeps the pretrained
/// weights (L1-AE), then fits the SVM on the extracted features.
TrainedPipeline train_pipeline(const AutoencoderParams& pretrained, const Matrix& raw,
                               const DatasetManifest& train_records,
                               const std::vector<std::string>& subclass_vocab,
                               const std::string& algorithm, const PipelineConfig& cfg);

Vector score_pipeline(const TrainedPipeline& p, const Matrix& raw);

struct CellStats {
  std::vector<double> trial_accuracies;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  ///< population standard deviation
  std::size_t n_trials = 0;

  bool operator==(const CellStats&) const = default;
};

CellStats summarize(std::vector<double> trial_accuracies);

using CellKey = std::tuple<std::string, std::string, std::string>;  // train, test, algorithm

struct EvalReport {
  std::string protocol;  ///< "combined" or "cross_ethnicity"
  std::uint64_t seed = 0;
  std::vector<std::string> groups;
  std::vector<std::string> algorithms;
  std::map<CellKey, CellStats> cells;
  std::map<std::string, std::map<BreakdownKey, double>> breakdowns;  // per algorithm
  std::map<std::string, std::vector<RocPoint>> roc;                  // per algorithm

  bool operator==(const EvalReport&) const = default;
};

/// raw holds one input column per manifest record.
EvalReport run_combined(const DatasetManifest& m, const Matrix& raw,
                        const AutoencoderParams& pretrained, const PipelineConfig& cfg);

/// Per ethnicity, k models (one per held-out fold). Same-ethnicity cells hold k
/// trials (model t on fold t); cross cells hold k*k (every model on every fold).
EvalReport run_cross_ethnicity(const DatasetManifest& m, const Matrix& raw,
                               const AutoencoderParams& pretrained, const PipelineConfig& cfg);

std::string report_to_json(const EvalReport& r);
EvalReport report_from_json(const std::string& text);

/// Mean +- std table, one row per (train group, algorithm), one column per test group.
std::string render_cross_table(const EvalReport& r);
/// One row per algorithm; columns Female/Male x Tool 1/Tool 2.
std::string render_breakdown_table(const EvalReport& r);
/// "fpr,tpr" CSV.
std::string render_roc_csv(const std::vector<RocPoint>& points);

std::string_view tool_group_name(ToolGroup t);
ToolGroup parse_tool_group(std::string_view s);

}  // namespace s3a
