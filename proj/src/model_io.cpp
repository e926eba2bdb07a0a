#include <json.hpp>

#include "binary_io.hpp"
#include "s3a/autoencoder.hpp"
#include "s3a/error.hpp"

namespace s3a {

namespace {
constexpr std::string_view kMagic = "S3AM";
}

std::string encode_model(const AutoencoderParams& p, const ModelInfo& info) {
  validate(p);
  nlohmann::json header = {
      {"format_version", kModelFormatVersion},
      {"input_dim", p.input_dim},
      {"hidden_dims", p.hidden_dims()},
      {"lambda", info.lambda},
      {"seed", info.seed},
      {"training_stage", info.training_stage},
      {"input_mean", !p.input_mean.empty()},
  };
  const std::string text = header.dump();

  detail::ByteWriter w;
  w.bytes(kMagic);
  w.u32(detail::ByteWriter::checked_dim(text.size()));
  w.bytes(text);
  for (const auto& layer : p.layers) {
    w.matrix(layer.W);
    w.matrix(layer.W_prime);
  }
  if (!p.input_mean.empty()) w.matrix(Matrix::column(p.input_mean));
  return w.take();
}

ModelFile decode_model(std::string_view bytes) {
  detail::ByteReader r(bytes);
  if (r.remaining() < kMagic.size() || r.bytes(kMagic.size()) != kMagic) {
    throw Error(Errc::BadMagic, "not an S3AM model file");
  }
  const auto header_len = r.u32();
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(r.bytes(header_len));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("model header: ") + e.what());
  }

  ModelFile out;
  try {
    if (header.at("format_version").get<std::uint32_t>() != kModelFormatVersion) {
      throw Error(Errc::ParseError, "unsupported model format_version");
    }
    out.params.input_dim = header.at("input_dim").get<std::size_t>();
    out.info.lambda = header.at("lambda").get<double>();
    out.info.seed = header.at("seed").get<std::uint64_t>();
    out.info.training_stage = header.at("training_stage").get<std::string>();
    const auto dims = header.at("hidden_dims").get<std::vector<std::size_t>>();
    for (std::size_t k = 0; k < dims.size(); ++k) {
      LayerParams layer;
      layer.W = r.matrix();
      layer.W_prime = r.matrix();
      if (layer.W.rows() != dims[k]) {
        throw Error(Errc::ShapeError, "layer dims disagree with header");
      }
      out.params.layers.push_back(std::move(layer));
    }
    if (header.value("input_mean", false)) {
      const Matrix mean = r.matrix();
      out.params.input_mean.assign(mean.data().begin(), mean.data().end());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("model header: ") + e.what());
  }
  validate(out.params);
  return out;
}

void save_model(const std::string& path, const AutoencoderParams& p, const ModelInfo& info) {
  detail::write_file(path, encode_model(p, info));
}

ModelFile load_model(const std::string& path) { return decode_model(detail::read_file(path)); }

}  // namespace s3a
