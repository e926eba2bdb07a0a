#include "s3a/trainer.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <json.hpp>

#include "s3a/error.hpp"

namespace s3a {

namespace {

struct Forward {
  Matrix A;  // W X
  Matrix H;  // sigmoid(A)
  Matrix R;  // W' H - X
  double recon = 0.0;
};

Forward forward(const LayerParams& layer, const Matrix& X) {
  Forward f;
  f.A = matmul(layer.W, X);
  f.H = sigmoid(f.A);
  f.R = matmul(layer.W_prime, f.H) - X;
  f.recon = frobenius_sq(f.R);
  return f;
}

/// Surrogate-objective gradients. With include_penalty = false only the
/// reconstruction term is differentiated.
void backward(const LayerParams& layer, const Matrix& X, const Forward& f,
              const PenaltySpec& penalty, const IrlsState& state, bool include_penalty,
              Matrix& dW, Matrix& dW_prime) {
  dW_prime = 2.0 * matmul_bt(f.R, f.H);
  Matrix dA = 2.0 * matmul_at(layer.W_prime, f.R);
  auto da = dA.data();
  auto h = f.H.data();
  for (std::size_t i = 0; i < da.size(); ++i) da[i] *= h[i] * (1.0 - h[i]);
  if (include_penalty && penalty.lambda != 0.0) {
    const Matrix P = penalty_code_gradient(state, penalty, f.A);
    axpy(1.0, P, dA);
  }
  dW = matmul_bt(dA, X);
}

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Implicit step on the frozen IRLS quadratic. For hidden unit r the encoder
/// row solves (I + 2 lr lambda sum_g beta_gr^2 X_g X_g^T) w = target_r, which
/// exactly minimizes |w - target_r|^2 / (2 lr) + the row's surrogate penalty.
class ImplicitPenaltyStep {
 public:
  ImplicitPenaltyStep(const Matrix& X, const GroupPartition& grouping) {
    const std::size_t d = X.rows();
    for (const auto& g : grouping.groups()) {
      const Matrix Xg = slice_columns(X, g.indices);
      grams_.push_back(matmul_bt(Xg, Xg));
    }
    dim_ = d;
  }

  void refresh(const IrlsState& state, double lr, double lambda) {
    factors_.clear();
    const std::size_t rows = state.betas.empty() ? 0 : state.betas.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
      RowMajor m = RowMajor::Identity(dim_, dim_);
      for (std::size_t g = 0; g < grams_.size(); ++g) {
        const double b = state.betas[g][r];
        const double c = 2.0 * lr * lambda * b * b;
        m += c * Eigen::Map<const RowMajor>(grams_[g].data().data(), dim_, dim_);
      }
      factors_.emplace_back(m);
    }
  }

  /// Replaces each row of W by the solve against its target row.
  void apply(const Matrix& target, Matrix& W) const {
    for (std::size_t r = 0; r < factors_.size(); ++r) {
      Eigen::Map<const Eigen::VectorXd> rhs(target.row(r).data(), dim_);
      Eigen::Map<Eigen::VectorXd>(W.row(r).data(), dim_) = factors_[r].solve(rhs);
    }
  }

 private:
  std::size_t dim_ = 0;
  std::vector<Matrix> grams_;
  std::vector<Eigen::LLT<RowMajor>> factors_;
};

void clip(Matrix& dW, Matrix& dW_prime, const std::optional<double>& limit) {
  if (!limit) return;
  const double norm = std::sqrt(frobenius_sq(dW) + frobenius_sq(dW_prime));
  if (norm > *limit) {
    const double s = *limit / norm;
    for (double& v : dW.data()) v *= s;
    for (double& v : dW_prime.data()) v *= s;
  }
}

/// Runs `epochs` gradient steps on one layer; returns the final total objective.
double train_layer(LayerParams& layer, const Matrix& X, const PenaltySpec& penalty,
                   std::size_t epochs, const TrainConfig& cfg, std::size_t layer_index,
                   TrainReport& report) {
  const bool reweight = penalty.kind != PenaltyKind::L1 && penalty.lambda != 0.0;
  Forward f = forward(layer, X);
  double previous = f.recon + penalty_on_codes(penalty, f.A);
  IrlsState state;
  std::optional<ImplicitPenaltyStep> implicit;
  if (reweight) implicit.emplace(X, penalty_grouping(penalty));
  std::size_t stalled = 0;
  std::string reason = "max_epochs";
  Matrix dW;
  Matrix dW_prime;

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    if (reweight && epoch % cfg.irls_refresh_every == 0) {
      state = irls_weights_on_codes(penalty, f.A, cfg.epsilon);
      implicit->refresh(state, cfg.learning_rate, penalty.lambda);
    }
    // Grouped penalties enter through the implicit step, everything else explicitly.
    backward(layer, X, f, penalty, state, !reweight, dW, dW_prime);
    clip(dW, dW_prime, cfg.grad_clip);
    axpy(-cfg.learning_rate, dW_prime, layer.W_prime);
    if (reweight) {
      Matrix target = layer.W;
      axpy(-cfg.learning_rate, dW, target);
      implicit->apply(target, layer.W);
    } else {
      axpy(-cfg.learning_rate, dW, layer.W);
    }

    f = forward(layer, X);
    const double pen = penalty_on_codes(penalty, f.A);
    const double total = f.recon + pen;
    if (!std::isfinite(total)) {
      std::ostringstream msg;
      msg << "objective diverged at layer " << layer_index << " epoch " << epoch
          << "; try a smaller learning_rate (currently " << cfg.learning_rate << ")";
      throw Error(Errc::NonFiniteObjective, msg.str());
    }
    report.epochs.push_back({layer_index, epoch, f.recon, pen, total});

    const double change = std::abs(previous - total) / std::max(std::abs(previous), DBL_MIN);
    stalled = change < cfg.tolerance ? stalled + 1 : 0;
    previous = total;
    if (stalled >= cfg.patience) {
      reason = "converged";
      break;
    }
  }
  report.stop_reasons.push_back(reason);
  return previous;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw Error(Errc::InvalidConfig, "learning_rate must be > 0");
  if (!(epsilon > 0.0)) throw Error(Errc::InvalidConfig, "epsilon must be > 0");
  if (!(lambda >= 0.0)) throw Error(Errc::InvalidConfig, "lambda must be >= 0");
  if (irls_refresh_every == 0) throw Error(Errc::InvalidConfig, "irls_refresh_every must be >= 1");
  if (grad_clip && !(*grad_clip > 0.0)) throw Error(Errc::InvalidConfig, "grad_clip must be > 0");
  if (!(tolerance >= 0.0)) throw Error(Errc::InvalidConfig, "tolerance must be >= 0");
  if (patience == 0) throw Error(Errc::InvalidConfig, "patience must be >= 1");
  if (finetune_penalty == PenaltyKind::L1) {
    throw Error(Errc::InvalidConfig, "finetune penalty must be a grouped l2,1 kind");
  }
}

std::string TrainReport::to_jsonl() const {
  std::string out;
  for (const auto& e : epochs) {
    nlohmann::json line = {{"epoch", e.epoch},
                           {"layer", e.layer},
                           {"recon", e.recon},
                           {"penalty", e.penalty},
                           {"total", e.total}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::pair<AutoencoderParams, TrainReport> train_stack(AutoencoderParams p, const Matrix& X,
                                                      const PenaltySpec& penalty,
                                                      std::size_t epochs, const TrainConfig& cfg) {
  cfg.validate();
  validate(p);
  if (X.cols() == 0) throw Error(Errc::EmptyBatch, "training batch is empty");
  if (X.rows() != p.input_dim) {
    throw Error(Errc::ShapeError, "model expects " + std::to_string(p.input_dim) +
                                      " input rows, got " + std::to_string(X.rows()));
  }
  TrainReport report;
  Matrix input = X;
  for (std::size_t k = 0; k < p.layers.size(); ++k) {
    report.final_objective += train_layer(p.layers[k], input, penalty, epochs, cfg, k, report);
    if (k + 1 < p.layers.size()) input = encode_layer(p.layers[k], input);
  }
  return {std::move(p), std::move(report)};
}

std::pair<AutoencoderParams, TrainReport> pretrain(const Matrix& X,
                                                   const std::vector<std::size_t>& dims,
                                                   const TrainConfig& cfg) {
  if (X.cols() == 0 || X.rows() == 0) throw Error(Errc::EmptyBatch, "pretraining batch is empty");
  AutoencoderParams init = init_params(X.rows(), dims, cfg.seed);
  const PenaltySpec l1{PenaltyKind::L1, cfg.lambda, std::nullopt};
  return train_stack(std::move(init), X, l1, cfg.pretrain_epochs, cfg);
}

PenaltySpec finetune_penalty(const GroupPartition& partition, const TrainConfig& cfg) {
  return PenaltySpec{cfg.finetune_penalty, cfg.lambda, partition};
}

std::pair<AutoencoderParams, TrainReport> finetune(AutoencoderParams p, const Matrix& X,
                                                   const GroupPartition& partition,
                                                   const TrainConfig& cfg) {
  if (partition.sample_count() != X.cols()) {
    throw Error(Errc::MissingPartition, "partition covers " +
                                            std::to_string(partition.sample_count()) +
                                            " samples, batch has " + std::to_string(X.cols()));
  }
  return train_stack(std::move(p), X, finetune_penalty(partition, cfg), cfg.finetune_epochs, cfg);
}

ObjectiveTerms objective(const AutoencoderParams& p, const Matrix& X,
                         const std::optional<GroupPartition>& partition, const TrainConfig& cfg) {
  validate(p);
  const PenaltySpec penalty = partition ? finetune_penalty(*partition, cfg)
                                        : PenaltySpec{PenaltyKind::L1, cfg.lambda, std::nullopt};
  ObjectiveTerms terms;
  if (X.rows() != p.input_dim) {
    throw Error(Errc::ShapeError, "model expects " + std::to_string(p.input_dim) +
                                      " input rows, got " + std::to_string(X.rows()));
  }
  Matrix input = X;
  for (std::size_t k = 0; k < p.layers.size(); ++k) {
    const Forward f = forward(p.layers[k], input);
    terms.recon += f.recon;
    terms.penalty += penalty_on_codes(penalty, f.A);
    if (k + 1 < p.layers.size()) input = f.H;
  }
  return terms;
}

LayerGradient layer_gradient(const LayerParams& layer, const Matrix& X, const PenaltySpec& penalty,
                             const IrlsState* state) {
  if (X.rows() != layer.input_dim()) {
    throw Error(Errc::ShapeError, "layer expects " + std::to_string(layer.input_dim()) +
                                      " input rows, got " + std::to_string(X.rows()));
  }
  static const IrlsState kNoState;
  const IrlsState& s = state ? *state : kNoState;
  LayerGradient g;
  const Forward f = forward(layer, X);
  g.recon = f.recon;
  g.surrogate = penalty.kind == PenaltyKind::L1 ? penalty_on_codes(penalty, f.A)
                                                : surrogate_penalty(s, penalty, layer.W, X);
  backward(layer, X, f, penalty, s, true, g.dW, g.dW_prime);
  return g;
}

double grad_check(const AutoencoderParams& p, const Matrix& X, const GroupPartition& partition,
                  const TrainConfig& cfg) {
  constexpr double h = 1e-6;
  const PenaltySpec penalty = finetune_penalty(partition, cfg);
  double worst = 0.0;
  Matrix input = X;
  for (const auto& original : p.layers) {
    const IrlsState state =
        irls_weights_on_codes(penalty, matmul(original.W, input), cfg.epsilon);
    const LayerGradient analytic = layer_gradient(original, input, penalty, &state);

    auto value = [&](const LayerParams& l) {
      return reconstruction_loss(l, input) + surrogate_penalty(state, penalty, l.W, input);
    };
    auto probe = [&](bool decoder, const Matrix& grad) {
      LayerParams l = original;
      Matrix& target = decoder ? l.W_prime : l.W;
      for (std::size_t i = 0; i < target.size(); ++i) {
        const double saved = target.data()[i];
        target.data()[i] = saved + h;
        const double up = value(l);
        target.data()[i] = saved - h;
        const double down = value(l);
        target.data()[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double exact = grad.data()[i];
        const double scale = std::max({std::abs(exact), std::abs(numeric), 1e-8});
        worst = std::max(worst, std::abs(exact - numeric) / scale);
      }
    };
    probe(false, analytic.dW);
    probe(true, analytic.dW_prime);
    input = encode_layer(original, input);
  }
  return worst;
}

}  // namespace s3a
