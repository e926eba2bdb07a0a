#include "s3a/autoencoder.hpp"

#include <cmath>
#include <string>

#include "s3a/error.hpp"
#include "s3a/rng.hpp"

namespace s3a {

namespace {

void require_layer_input(const LayerParams& p, const Matrix& X) {
  if (X.rows() != p.W.cols()) {
    throw Error(Errc::ShapeError, "layer expects " + std::to_string(p.W.cols()) +
                                      " input rows, got " + std::to_string(X.rows()));
  }
}

Matrix glorot(std::size_t rows, std::size_t cols, double bound, Rng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.uniform(-bound, bound);
  return m;
}

}  // namespace

std::vector<std::size_t> AutoencoderParams::hidden_dims() const {
  std::vector<std::size_t> dims;
  dims.reserve(layers.size());
  for (const auto& l : layers) dims.push_back(l.hidden_dim());
  return dims;
}

std::vector<std::size_t> default_hidden_dims(std::size_t input_dim) {
  std::vector<std::size_t> dims{(2 * input_dim) / 3, input_dim / 2};
  if (dims[0] == 0 || dims[1] == 0) {
    throw Error(Errc::InvalidDimension,
                "input_dim " + std::to_string(input_dim) + " yields an empty hidden layer");
  }
  return dims;
}

AutoencoderParams init_params(std::size_t input_dim, const std::vector<std::size_t>& hidden_dims,
                              std::uint64_t seed) {
  if (input_dim == 0) throw Error(Errc::InvalidDimension, "input_dim must be >= 1");
  if (hidden_dims.empty()) throw Error(Errc::InvalidDimension, "at least one hidden layer required");
  AutoencoderParams p;
  p.input_dim = input_dim;
  Rng rng(seed);
  std::size_t fan_in = input_dim;
  for (std::size_t h : hidden_dims) {
    if (h == 0) throw Error(Errc::InvalidDimension, "hidden dims must be >= 1");
    const double r = std::sqrt(6.0 / static_cast<double>(fan_in + h));
    LayerParams layer;
    layer.W = glorot(h, fan_in, r, rng);
    layer.W_prime = glorot(fan_in, h, r, rng);
    p.layers.push_back(std::move(layer));
    fan_in = h;
  }
  return p;
}

void validate(const AutoencoderParams& p) {
  std::size_t d = p.input_dim;
  for (std::size_t k = 0; k < p.layers.size(); ++k) {
    const auto& l = p.layers[k];
    if (l.W.cols() != d || l.W_prime.rows() != d || l.W_prime.cols() != l.W.rows()) {
      throw Error(Errc::ShapeError, "layer " + std::to_string(k) + " does not chain");
    }
    if (!all_finite(l.W) || !all_finite(l.W_prime)) {
      throw Error(Errc::ShapeError, "layer " + std::to_string(k) + " has non-finite weights");
    }
    d = l.W.rows();
  }
  if (!p.input_mean.empty() && p.input_mean.size() != p.input_dim) {
    throw Error(Errc::ShapeError, "input mean length does not match input_dim");
  }
}

Matrix encode_layer(const LayerParams& p, const Matrix& X) {
  require_layer_input(p, X);
  return sigmoid(matmul(p.W, X));
}

Matrix decode_layer(const LayerParams& p, const Matrix& H) {
  if (H.rows() != p.W_prime.cols()) {
    throw Error(Errc::ShapeError, "decoder expects " + std::to_string(p.W_prime.cols()) +
                                      " code rows, got " + std::to_string(H.rows()));
  }
  return matmul(p.W_prime, H);
}

double reconstruction_loss(const LayerParams& p, const Matrix& X) {
  return frobenius_sq(X - decode_layer(p, encode_layer(p, X)));
}

Matrix encode_stack(const AutoencoderParams& p, const Matrix& X) {
  if (X.rows() != p.input_dim) {
    throw Error(Errc::ShapeError, "model expects " + std::to_string(p.input_dim) +
                                      " input rows, got " + std::to_string(X.rows()));
  }
  Matrix h = X;
  for (const auto& layer : p.layers) h = encode_layer(layer, h);
  return h;
}

Matrix extract_features(const AutoencoderParams& p, const Matrix& raw) {
  if (p.input_mean.empty()) return encode_stack(p, raw);
  if (raw.rows() != p.input_mean.size()) {
    throw Error(Errc::ShapeError, "model expects " + std::to_string(p.input_dim) +
                                      " input rows, got " + std::to_string(raw.rows()));
  }
  Matrix centered = raw;
  for (std::size_t r = 0; r < centered.rows(); ++r) {
    for (double& v : centered.row(r)) v -= p.input_mean[r];
  }
  return encode_stack(p, centered);
}

}  // namespace s3a
