#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "s3a/matrix.hpp"

namespace s3a {

/// Linear decision function w.x + b over raw (unstandardized) features.
///
/// Training happens on standardized features; the learned weights are folded
/// back through the stored transform, so decision_value needs no preprocessing.
struct SvmModel {
  Vector w;
  double b = 0.0;
  double cost_pos = 1.0;
  double cost_neg = 1.0;
  Vector feature_means;
  Vector feature_stds;

  std::size_t feature_dim() const noexcept { return w.size(); }

  bool operator==(const SvmModel&) const = default;
};

struct SvmOptions {
  double cost_pos = 1.0;
  double cost_neg = 1.0;
  std::size_t epochs = 200;
  /// Kept for interface parity; full-batch training draws no random numbers.
  std::uint64_t seed = 0;
  bool standardize = true;
};

/// 1/2 |w|^2 + sum_k cost(y_k) * max(0, 1 - y_k (w.x_k + b)). Features are column-per-sample.
double svm_objective(const Matrix& features, std::span<const int> labels, double cost_pos,
                     double cost_neg, std::span<const double> w, double b);

/// Full-batch subgradient descent on svm_objective with step 1/(t * min(cost)),
/// starting from zero and returning the iterate with the lowest objective.
/// Throws SingleClassData unless both labels are present.
SvmModel train_svm(const Matrix& features, std::span<const int> labels, const SvmOptions& opts);

double decision_value(const SvmModel& m, std::span<const double> x);
/// +1 when decision_value >= 0 (ties go to the positive class).
int predict(const SvmModel& m, std::span<const double> x);
/// Decision values for every column.
Vector decision_values(const SvmModel& m, const Matrix& features);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;

  bool operator==(const RocPoint&) const = default;
};

/// Threshold sweep over the distinct scores in descending order, starting at
/// (0,0) and ending at (1,1). Label +1 is the positive class.
std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const int> labels);
/// Trapezoidal area under a curve from roc_points.
double roc_auc(std::span<const RocPoint> points);

std::string svm_to_json(const SvmModel& m);
SvmModel svm_from_json(const std::string& text);

}  // namespace s3a
