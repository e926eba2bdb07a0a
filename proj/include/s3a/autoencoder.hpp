#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "s3a/matrix.hpp"

namespace s3a {

/// Encoder W (hidden x input) and untied decoder W' (input x hidden).
struct LayerParams {
  Matrix W;
  Matrix W_prime;

  std::size_t input_dim() const noexcept { return W.cols(); }
  std::size_t hidden_dim() const noexcept { return W.rows(); }

  bool operator==(const LayerParams&) const = default;
};

/// Greedy stack of single-layer autoencoders. input_mean, when non-empty, is
/// the training-set mean subtracted from raw inputs before encoding.
struct AutoencoderParams {
  std::size_t input_dim = 0;
  std::vector<LayerParams> layers;
  Vector input_mean;

  std::vector<std::size_t> hidden_dims() const;

  bool operator==(const AutoencoderParams&) const = default;
};

/// [floor(2/3 * input_dim), floor(1/2 * input_dim)].
std::vector<std::size_t> default_hidden_dims(std::size_t input_dim);

/// Uniform Glorot initialization in [-r, r], r = sqrt(6 / (fan_in + fan_out)).
/// Each layer draws W then W' row-major from one stream seeded by `seed`.
AutoencoderParams init_params(std::size_t input_dim, const std::vector<std::size_t>& hidden_dims,
                              std::uint64_t seed);

/// Checks dimension chaining and finiteness; throws ShapeError.
void validate(const AutoencoderParams& p);

Matrix encode_layer(const LayerParams& p, const Matrix& X);
Matrix decode_layer(const LayerParams& p, const Matrix& H);
double reconstruction_loss(const LayerParams& p, const Matrix& X);
Matrix encode_stack(const AutoencoderParams& p, const Matrix& X);

/// Subtracts input_mean from every column when one is stored, then encodes.
Matrix extract_features(const AutoencoderParams& p, const Matrix& raw);

// Model container: "S3AM", u32 header length, JSON header, then each layer's
// W and W' as (u32 rows, u32 cols, f64 payload), then the optional input mean.

struct ModelInfo {
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::string training_stage = "init";

  bool operator==(const ModelInfo&) const = default;
};

struct ModelFile {
  AutoencoderParams params;
  ModelInfo info;
};

inline constexpr std::uint32_t kModelFormatVersion = 1;

std::string encode_model(const AutoencoderParams& p, const ModelInfo& info);
ModelFile decode_model(std::string_view bytes);
void save_model(const std::string& path, const AutoencoderParams& p, const ModelInfo& info);
ModelFile load_model(const std::string& path);

}  // namespace s3a
