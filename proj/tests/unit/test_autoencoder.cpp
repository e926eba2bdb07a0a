#include "helpers.hpp"
#include "s3a/autoencoder.hpp"
#include "s3a/partition.hpp"
#include "s3a/datakit.hpp"

using namespace s3a;
using s3a::test::random_matrix;

TEST_SUITE("autoencoder") {
TEST_CASE("init_params") {
  CHECK(default_hidden_dims(6) == std::vector<std::size_t>{4, 3});
  CHECK(default_hidden_dims(64) == std::vector<std::size_t>{42, 32});
  CHECK_ERRC(default_hidden_dims(1), Errc::InvalidDimension);
  CHECK(init_params(6, {4, 3}, 9) == init_params(6, {4, 3}, 9));
  CHECK_FALSE(init_params(6, {4, 3}, 9) == init_params(6, {4, 3}, 10));
  CHECK_ERRC(init_params(0, {4}, 1), Errc::InvalidDimension);
  CHECK_ERRC(init_params(6, {4, 0}, 1), Errc::InvalidDimension);

  // 100 x 100 encoder plus decoder: 2e4 draws against r = sqrt(6 / 200).
  const AutoencoderParams p = init_params(100, {100}, 3);
  const double r = std::sqrt(6.0 / 200.0);
  double max_abs = 0.0;
  for (double v : p.layers[0].W.data()) max_abs = std::max(max_abs, std::abs(v));
  for (double v : p.layers[0].W_prime.data()) max_abs = std::max(max_abs, std::abs(v));
  CHECK(max_abs <= r);
  CHECK(max_abs > 0.95 * r);
  CHECK(p.hidden_dims() == std::vector<std::size_t>{100});
}

TEST_CASE("encode_layer") {
  LayerParams z{Matrix(2, 3), Matrix(3, 2)};
  const Matrix values = encode_layer(z, random_matrix(3, 4, 1));
  for (double v : values.data()) CHECK(v == 0.5);

  LayerParams one{Matrix::from_rows({{0.5, -1.0, 2.0}}), Matrix(3, 1)};
  const Matrix x = Matrix::from_rows({{1.0}, {2.0}, {0.25}});
  // w.x = 0.5 - 2 + 0.5 = -1
  CHECK(std::abs(encode_layer(one, x)(0, 0) - 1.0 / (1.0 + std::exp(1.0))) < 1e-15);

  const Matrix col = random_matrix(3, 1, 2);
  Matrix twice(3, 2);
  for (std::size_t r = 0; r < 3; ++r) twice(r, 0) = twice(r, 1) = col(r, 0);
  LayerParams p = init_params(3, {2}, 4).layers[0];
  const Matrix h = encode_layer(p, twice);
  CHECK(h.col(0) == h.col(1));
  CHECK_ERRC(encode_layer(p, Matrix(4, 2)), Errc::ShapeError);
}

TEST_CASE("decode_layer") {
  LayerParams p{Matrix(2, 2), Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}})};
  const Matrix H = Matrix::from_rows({{0.5, 1.0}, {-1.0, 2.0}});
  CHECK(decode_layer(p, H) == Matrix::from_rows({{-1.5, 5.0}, {-2.5, 11.0}}));
  CHECK(decode_layer(p, Matrix(2, 3)) == Matrix(2, 3));
  p.W_prime = Matrix(2, 2);
  CHECK(decode_layer(p, H) == Matrix(2, 2));
  CHECK_ERRC(decode_layer(p, Matrix(3, 1)), Errc::ShapeError);
}

TEST_CASE("reconstruction_loss") {
  LayerParams p = init_params(4, {3}, 1).layers[0];
  const Matrix X = random_matrix(4, 3, 7);
  p.W_prime = Matrix(4, 3);
  CHECK(reconstruction_loss(p, Matrix(4, 3)) == 0.0);
  CHECK(reconstruction_loss(p, X) == frobenius_sq(X));

  const LayerParams q = init_params(4, {3}, 2).layers[0];
  const double oracle = frobenius_sq(X - decode_layer(q, encode_layer(q, X)));
  CHECK(std::abs(reconstruction_loss(q, X) - oracle) < 1e-12);

  // permutation invariance
  const std::vector<std::size_t> order{2, 0, 1};
  CHECK(std::abs(reconstruction_loss(q, slice_columns(X, order)) - reconstruction_loss(q, X)) <
        1e-12);
}

TEST_CASE("encode_stack") {
  const AutoencoderParams one = init_params(5, {3}, 1);
  const Matrix X = random_matrix(5, 4, 2);
  CHECK(encode_stack(one, X) == encode_layer(one.layers[0], X));

  AutoencoderParams zero = init_params(6, {4, 3}, 1);
  for (auto& l : zero.layers) {
    l.W = Matrix(l.W.rows(), l.W.cols());
  }
  const Matrix values = encode_stack(zero, random_matrix(6, 3, 1));
  for (double v : values.data()) CHECK(v == 0.5);

  const AutoencoderParams two = init_params(6, {4, 3}, 5);
  const Matrix X6 = random_matrix(6, 8, 3);
  const Matrix manual = encode_layer(two.layers[1], encode_layer(two.layers[0], X6));
  CHECK(encode_stack(two, X6) == manual);
  for (double v : manual.data()) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  CHECK_ERRC(encode_stack(two, Matrix(5, 2)), Errc::ShapeError);
}

TEST_CASE("extract_features applies the stored mean") {
  AutoencoderParams p = init_params(3, {2}, 1);
  const Matrix X = random_matrix(3, 5, 2);
  CHECK(extract_features(p, X) == encode_stack(p, X));
  p.input_mean = column_mean(X);
  CHECK(extract_features(p, X) == encode_stack(p, center_columns(X, p.input_mean)));
  p.input_mean = {1.0};
  CHECK_ERRC(extract_features(p, X), Errc::ShapeError);
}

TEST_CASE("model container round-trip") {
  AutoencoderParams p = init_params(6, {4, 3}, 8);
  const ModelInfo info{0.25, 8, "finetuned"};
  const std::string bytes = encode_model(p, info);
  CHECK(bytes.substr(0, 4) == "S3AM");
  const ModelFile back = decode_model(bytes);
  CHECK(back.params == p);
  CHECK(back.info == info);
  CHECK(encode_model(back.params, back.info) == bytes);

  p.input_mean = {1, 2, 3, 4, 5, 6};
  const std::string with_mean = encode_model(p, info);
  CHECK(decode_model(with_mean).params == p);
  CHECK(encode_model(decode_model(with_mean).params, info) == with_mean);

  s3a::test::TempDir dir("model");
  save_model(dir.file("m.s3am"), p, info);
  CHECK(load_model(dir.file("m.s3am")).params == p);
  CHECK_ERRC(load_model(dir.file("missing.s3am")), Errc::MissingInput);
}

TEST_CASE("model container corruption") {
  const std::string bytes = encode_model(init_params(6, {4, 3}, 8), {});
  CHECK_ERRC(decode_model("S3AF" + bytes.substr(4)), Errc::BadMagic);
  CHECK_ERRC(decode_model("S3"), Errc::BadMagic);
  for (std::size_t cut : {std::size_t{6}, std::size_t{20}, bytes.size() - 1}) {
    try {
      decode_model(bytes.substr(0, cut));
      FAIL("expected truncation");
    } catch (const TruncatedFileError& e) {
      CHECK(e.offset() == cut);
    }
  }
  std::string bad_header = bytes;
  bad_header[8] = '#';
  CHECK_ERRC(decode_model(bad_header), Errc::ParseError);
}
}
