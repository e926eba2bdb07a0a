#include "binary_io.hpp"
#include "s3a/datakit.hpp"

namespace s3a {

namespace {
constexpr std::string_view kMagic = "S3AF";
}

std::string encode_features(const Matrix& m) {
  detail::ByteWriter w;
  w.bytes(kMagic);
  w.u32(kFeatureFormatVersion);
  w.matrix(m);
  return w.take();
}

Matrix decode_features(std::string_view bytes) {
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    throw Error(Errc::BadMagic, "not an S3AF feature file");
  }
  detail::ByteReader r(bytes);
  r.bytes(kMagic.size());
  const auto version = r.u32();
  if (version != kFeatureFormatVersion) {
    throw Error(Errc::ParseError, "unsupported S3AF version " + std::to_string(version));
  }
  return r.matrix();
}

void save_features(const std::string& path, const Matrix& m) {
  detail::write_file(path, encode_features(m));
}

Matrix load_features(const std::string& path) { return decode_features(detail::read_file(path)); }

}  // namespace s3a
