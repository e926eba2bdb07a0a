#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "s3a/matrix.hpp"
#include "s3a/partition.hpp"

namespace s3a {

enum class PenaltyKind {
  L1,           ///< lambda * sum |W X| entrywise (unsupervised pretraining)
  ClassL21,     ///< lambda * sum_c ||W X_c||_{2,1}
  SubclassL21,  ///< lambda * sum_ij ||W X_ij||_{2,1}
};

struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::L1;
  double lambda = 0.0;
  std::optional<GroupPartition> partition;
};

/// Groups the l2,1 penalty sums over: classes for ClassL21, (class, subclass)
/// blocks for SubclassL21. Throws MissingPartition for grouped kinds without one.
GroupPartition penalty_grouping(const PenaltySpec& spec);

/// Quadratic-majorizer weights from an anchor point W0.
///
/// betas[g][r] = (2 * max(||row r of W0 X_g||, epsilon))^(-1/2). The anchor
/// row norms are kept so the majorizer's additive constant can be recovered.
struct IrlsState {
  std::vector<std::pair<int, int>> group_keys;
  std::vector<std::size_t> group_sizes;
  std::vector<Vector> betas;
  std::vector<Vector> anchor_norms;
  double epsilon = 1e-4;
};

double penalty_value(const PenaltySpec& spec, const Matrix& W, const Matrix& X);

IrlsState update_irls_weights(const Matrix& W, const Matrix& X, const GroupPartition& partition,
                              double epsilon);
/// Same, over the spec's own grouping (class-level for ClassL21).
IrlsState update_irls_weights(const PenaltySpec& spec, const Matrix& W, const Matrix& X,
                              double epsilon);

/// lambda * sum_g sum_r beta_gr^2 * ||row r of W X_g||^2. For L1 specs this is
/// penalty_value; the state is ignored.
double surrogate_penalty(const IrlsState& state, const PenaltySpec& spec, const Matrix& W,
                         const Matrix& X);

/// lambda * sum_g sum_r ||row r of W0 X_g|| / 2 at the state's anchor W0.
/// surrogate + this constant equals the true penalty at the anchor.
double surrogate_constant(const IrlsState& state, const PenaltySpec& spec);

/// d(surrogate)/dW. L1 specs return the subgradient lambda * sign(W X) X^T with sign(0) = 0.
Matrix penalty_gradient(const IrlsState& state, const PenaltySpec& spec, const Matrix& W,
                        const Matrix& X);

// Variants that take precomputed codes H = W X.
double penalty_on_codes(const PenaltySpec& spec, const Matrix& H);
IrlsState irls_weights_on_codes(const PenaltySpec& spec, const Matrix& H, double epsilon);

/// d(surrogate)/d(W X) given the codes H = W X; penalty_gradient = this * X^T.
Matrix penalty_code_gradient(const IrlsState& state, const PenaltySpec& spec, const Matrix& H);

}  // namespace s3a
