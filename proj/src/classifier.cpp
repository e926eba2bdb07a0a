#include "s3a/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "s3a/error.hpp"

namespace s3a {

namespace {

void require_labels(std::span<const int> labels, std::size_t n) {
  if (labels.size() != n) {
    throw Error(Errc::ShapeError, std::to_string(labels.size()) + " labels for " +
                                      std::to_string(n) + " samples");
  }
  bool pos = false;
  bool neg = false;
  for (int y : labels) {
    if (y == 1) {
      pos = true;
    } else if (y == -1) {
      neg = true;
    } else {
      throw Error(Errc::InvalidLabels, "labels must be +1 or -1");
    }
  }
  if (!pos || !neg) throw Error(Errc::SingleClassData, "both classes must be present");
}

double column_dot(const Matrix& X, std::size_t col, std::span<const double> w) {
  double acc = 0.0;
  for (std::size_t r = 0; r < X.rows(); ++r) acc += w[r] * X(r, col);
  return acc;
}

}  // namespace

double svm_objective(const Matrix& features, std::span<const int> labels, double cost_pos,
                     double cost_neg, std::span<const double> w, double b) {
  if (w.size() != features.rows() || labels.size() != features.cols()) {
    throw Error(Errc::ShapeError, "svm_objective: shape mismatch");
  }
  double value = 0.5 * dot(w, w);
  for (std::size_t k = 0; k < features.cols(); ++k) {
    const double margin = labels[k] * (column_dot(features, k, w) + b);
    const double cost = labels[k] > 0 ? cost_pos : cost_neg;
    value += cost * std::max(0.0, 1.0 - margin);
  }
  return value;
}

SvmModel train_svm(const Matrix& features, std::span<const int> labels, const SvmOptions& opts) {
  if (!(opts.cost_pos > 0.0) || !(opts.cost_neg > 0.0)) {
    throw Error(Errc::InvalidArgument, "SVM costs must be > 0");
  }
  if (features.rows() == 0) throw Error(Errc::ShapeError, "features have no dimensions");
  require_labels(labels, features.cols());
  const std::size_t d = features.rows();
  const std::size_t n = features.cols();

  SvmModel model;
  model.cost_pos = opts.cost_pos;
  model.cost_neg = opts.cost_neg;
  model.feature_means.assign(d, 0.0);
  model.feature_stds.assign(d, 1.0);
  Matrix Z = features;
  if (opts.standardize) {
    for (std::size_t r = 0; r < d; ++r) {
      auto row = Z.row(r);
      double mean = 0.0;
      for (double v : row) mean += v;
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (double v : row) var += (v - mean) * (v - mean);
      var /= static_cast<double>(n);
      const double sd = var > 1e-24 ? std::sqrt(var) : 1.0;
      for (double& v : row) v = (v - mean) / sd;
      model.feature_means[r] = mean;
      model.feature_stds[r] = sd;
    }
  }

  const double min_cost = std::min(opts.cost_pos, opts.cost_neg);
  Vector w(d, 0.0);
  double b = 0.0;
  Vector best_w = w;
  double best_b = b;
  double best = svm_objective(Z, labels, opts.cost_pos, opts.cost_neg, w, b);
  Vector gw(d);
  for (std::size_t t = 1; t <= opts.epochs; ++t) {
    gw = w;
    double gb = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double y = labels[k];
      if (y * (column_dot(Z, k, w) + b) < 1.0) {
        const double cy = (labels[k] > 0 ? opts.cost_pos : opts.cost_neg) * y;
        for (std::size_t r = 0; r < d; ++r) gw[r] -= cy * Z(r, k);
        gb -= cy;
      }
    }
    const double step = 1.0 / (static_cast<double>(t) * min_cost);
    for (std::size_t r = 0; r < d; ++r) w[r] -= step * gw[r];
    b -= step * gb;
    const double value = svm_objective(Z, labels, opts.cost_pos, opts.cost_neg, w, b);
    if (value < best) {
      best = value;
      best_w = w;
      best_b = b;
    }
  }

  model.w.resize(d);
  model.b = best_b;
  for (std::size_t r = 0; r < d; ++r) {
    model.w[r] = best_w[r] / model.feature_stds[r];
    model.b -= model.w[r] * model.feature_means[r];
  }
  return model;
}

double decision_value(const SvmModel& m, std::span<const double> x) {
  if (x.size() != m.feature_dim()) {
    throw Error(Errc::ShapeError, "model expects " + std::to_string(m.feature_dim()) +
                                      " features, got " + std::to_string(x.size()));
  }
  return dot(m.w, x) + m.b;
}

int predict(const SvmModel& m, std::span<const double> x) {
  return decision_value(m, x) >= 0.0 ? 1 : -1;
}

Vector decision_values(const SvmModel& m, const Matrix& features) {
  if (features.rows() != m.feature_dim()) {
    throw Error(Errc::ShapeError, "model expects " + std::to_string(m.feature_dim()) +
                                      " features, got " + std::to_string(features.rows()));
  }
  Vector out(features.cols());
  for (std::size_t k = 0; k < features.cols(); ++k) out[k] = column_dot(features, k, m.w) + m.b;
  return out;
}

std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const int> labels) {
  if (scores.empty() || scores.size() != labels.size()) {
    throw Error(Errc::LengthMismatch, "roc_points needs equal-length, non-empty inputs");
  }
  require_labels(labels, scores.size());
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const double positives = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const double negatives = static_cast<double>(labels.size()) - positives;

  std::vector<RocPoint> points{{0.0, 0.0}};
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      (labels[order[i]] > 0 ? tp : fp) += 1;
      ++i;
    }
    points.push_back({static_cast<double>(fp) / negatives, static_cast<double>(tp) / positives});
  }
  return points;
}

double roc_auc(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) / 2.0;
  }
  return area;
}

std::string svm_to_json(const SvmModel& m) {
  nlohmann::json j = {{"w", m.w},
                      {"b", m.b},
                      {"cost_pos", m.cost_pos},
                      {"cost_neg", m.cost_neg},
                      {"feature_means", m.feature_means},
                      {"feature_stds", m.feature_stds}};
  return j.dump(2) + "\n";
}

SvmModel svm_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SvmModel m;
    m.w = j.at("w").get<Vector>();
    m.b = j.at("b").get<double>();
    m.cost_pos = j.at("cost_pos").get<double>();
    m.cost_neg = j.at("cost_neg").get<double>();
    m.feature_means = j.at("feature_means").get<Vector>();
    m.feature_stds = j.at("feature_stds").get<Vector>();
    if (m.feature_means.size() != m.w.size() || m.feature_stds.size() != m.w.size()) {
      throw Error(Errc::ShapeError, "SVM model vectors disagree in length");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("SVM model: ") + e.what());
  }
}

}  // namespace s3a
