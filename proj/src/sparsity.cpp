#include "s3a/sparsity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "s3a/error.hpp"

namespace s3a {

namespace {

Matrix codes(const Matrix& W, const Matrix& X) {
  if (W.cols() != X.rows()) {
    throw Error(Errc::ShapeError, "W has " + std::to_string(W.cols()) + " cols, X has " +
                                      std::to_string(X.rows()) + " rows");
  }
  return matmul(W, X);
}

void require_coverage(const GroupPartition& g, std::size_t cols) {
  if (g.sample_count() != cols) {
    throw Error(Errc::ShapeError, "partition covers " + std::to_string(g.sample_count()) +
                                      " samples, batch has " + std::to_string(cols));
  }
}

double group_row_norm(const Matrix& H, std::size_t r, const Group& g) {
  auto row = H.row(r);
  double acc = 0.0;
  for (std::size_t j : g.indices) acc += row[j] * row[j];
  return std::sqrt(acc);
}

IrlsState weights_from_codes(const Matrix& H, const GroupPartition& grouping, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(Errc::InvalidArgument, "epsilon must be > 0");
  require_coverage(grouping, H.cols());
  IrlsState state;
  state.epsilon = epsilon;
  for (const auto& g : grouping.groups()) {
    state.group_keys.emplace_back(g.class_label, g.subclass_label);
    state.group_sizes.push_back(g.indices.size());
    Vector betas(H.rows());
    Vector norms(H.rows());
    for (std::size_t r = 0; r < H.rows(); ++r) {
      norms[r] = group_row_norm(H, r, g);
      betas[r] = 1.0 / std::sqrt(2.0 * std::max(norms[r], epsilon));
    }
    state.betas.push_back(std::move(betas));
    state.anchor_norms.push_back(std::move(norms));
  }
  return state;
}

void require_fresh(const IrlsState& state, const GroupPartition& grouping, std::size_t rows) {
  const auto& groups = grouping.groups();
  bool ok = state.betas.size() == groups.size();
  for (std::size_t g = 0; ok && g < groups.size(); ++g) {
    ok = state.group_keys[g] == std::pair{groups[g].class_label, groups[g].subclass_label} &&
         state.group_sizes[g] == groups[g].indices.size() && state.betas[g].size() == rows;
  }
  if (!ok) throw Error(Errc::StaleState, "IRLS state was built for a different grouping");
}

}  // namespace

GroupPartition penalty_grouping(const PenaltySpec& spec) {
  if (!spec.partition) {
    throw Error(Errc::MissingPartition, "grouped penalty requires a partition");
  }
  return spec.kind == PenaltyKind::ClassL21 ? spec.partition->class_level() : *spec.partition;
}

double penalty_value(const PenaltySpec& spec, const Matrix& W, const Matrix& X) {
  return penalty_on_codes(spec, codes(W, X));
}

double penalty_on_codes(const PenaltySpec& spec, const Matrix& H) {
  if (spec.kind == PenaltyKind::L1) {
    double acc = 0.0;
    for (double v : H.data()) acc += std::abs(v);
    return spec.lambda * acc;
  }
  const GroupPartition grouping = penalty_grouping(spec);
  require_coverage(grouping, H.cols());
  double acc = 0.0;
  for (const auto& g : grouping.groups()) {
    for (std::size_t r = 0; r < H.rows(); ++r) acc += group_row_norm(H, r, g);
  }
  return spec.lambda * acc;
}

IrlsState update_irls_weights(const Matrix& W, const Matrix& X, const GroupPartition& partition,
                              double epsilon) {
  return weights_from_codes(codes(W, X), partition, epsilon);
}

IrlsState update_irls_weights(const PenaltySpec& spec, const Matrix& W, const Matrix& X,
                              double epsilon) {
  return weights_from_codes(codes(W, X), penalty_grouping(spec), epsilon);
}

IrlsState irls_weights_on_codes(const PenaltySpec& spec, const Matrix& H, double epsilon) {
  return weights_from_codes(H, penalty_grouping(spec), epsilon);
}

double surrogate_penalty(const IrlsState& state, const PenaltySpec& spec, const Matrix& W,
                         const Matrix& X) {
  if (spec.kind == PenaltyKind::L1) return penalty_value(spec, W, X);
  const Matrix H = codes(W, X);
  const GroupPartition grouping = penalty_grouping(spec);
  require_coverage(grouping, X.cols());
  require_fresh(state, grouping, H.rows());
  double acc = 0.0;
  const auto& groups = grouping.groups();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t r = 0; r < H.rows(); ++r) {
      const double b = state.betas[g][r];
      const double n = group_row_norm(H, r, groups[g]);
      acc += b * b * n * n;
    }
  }
  return spec.lambda * acc;
}

double surrogate_constant(const IrlsState& state, const PenaltySpec& spec) {
  if (spec.kind == PenaltyKind::L1) return 0.0;
  double acc = 0.0;
  for (const auto& norms : state.anchor_norms) {
    for (double n : norms) acc += n;
  }
  return spec.lambda * acc / 2.0;
}

Matrix penalty_code_gradient(const IrlsState& state, const PenaltySpec& spec, const Matrix& H) {
  Matrix G(H.rows(), H.cols());
  if (spec.kind == PenaltyKind::L1) {
    auto src = H.data();
    auto dst = G.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[i] = src[i] > 0.0 ? spec.lambda : (src[i] < 0.0 ? -spec.lambda : 0.0);
    }
    return G;
  }
  const GroupPartition grouping = penalty_grouping(spec);
  require_coverage(grouping, H.cols());
  require_fresh(state, grouping, H.rows());
  const auto& groups = grouping.groups();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t r = 0; r < H.rows(); ++r) {
      const double b = state.betas[g][r];
      const double scale = 2.0 * spec.lambda * b * b;
      for (std::size_t j : groups[g].indices) G(r, j) = scale * H(r, j);
    }
  }
  return G;
}

Matrix penalty_gradient(const IrlsState& state, const PenaltySpec& spec, const Matrix& W,
                        const Matrix& X) {
  return matmul_bt(penalty_code_gradient(state, spec, codes(W, X)), X);
}

}  // namespace s3a
