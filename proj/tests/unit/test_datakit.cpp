#include <fstream>
#include <map>
#include <set>

#include "helpers.hpp"
#include "s3a/classifier.hpp"
#include "s3a/datakit.hpp"
#include "s3a/partition.hpp"

using namespace s3a;
using s3a::test::random_matrix;
using s3a::test::TempDir;

namespace {

const char* kSixRows =
    "id,subject_id,class,ethnicity,gender,tool,source_kind,source_path\n"
    "a1,s1,ORIGINAL,Indian,F,,image,img/a1.png\n"
    "a2,s1,RETOUCHED,Indian,F,BeautyPlus,image,img/a2.png\n"
    "b1,s2,ORIGINAL,Chinese,M,,features,f.s3af#0\n"
    "b2,s2,RETOUCHED,Chinese,M,PortraitPro,features,f.s3af#1\n"
    "c1,s3,ORIGINAL,Caucasian,F,,image,img/c1.bmp\n"
    "c2,s3,RETOUCHED,Caucasian,F,TOOL2,image,img/c2.bmp\n";

void put_le(std::string& s, std::uint32_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

// 24-bit bottom-up BMP; pixels row-major top-down, gray levels 0..255.
std::string gray_bmp(std::size_t w, std::size_t h, const std::vector<int>& pixels) {
  const std::size_t stride = ((w * 24 + 31) / 32) * 4;
  std::string s = "BM";
  put_le(s, static_cast<std::uint32_t>(54 + stride * h), 4);
  put_le(s, 0, 4);
  put_le(s, 54, 4);
  put_le(s, 40, 4);
  put_le(s, static_cast<std::uint32_t>(w), 4);
  put_le(s, static_cast<std::uint32_t>(h), 4);
  put_le(s, 1, 2);
  put_le(s, 24, 2);
  for (int i = 0; i < 6; ++i) put_le(s, 0, 4);
  for (std::size_t y = h; y-- > 0;) {
    std::string row;
    for (std::size_t x = 0; x < w; ++x) row.append(3, static_cast<char>(pixels[y * w + x]));
    row.resize(stride, '\0');
    s += row;
  }
  return s;
}

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream(path, std::ios::binary) << bytes;
}

}  // namespace

TEST_SUITE("datakit") {
TEST_CASE("manifest round-trip") {
  const DatasetManifest m = parse_manifest(kSixRows);
  REQUIRE(m.size() == 6);
  CHECK(m.records[1].tool_group() == ToolGroup::Tool1);
  CHECK(m.records[3].tool_group() == ToolGroup::Tool2);
  CHECK(m.records[0].tool_group() == ToolGroup::None);
  CHECK(m.records[2].source_kind == SourceKind::Features);
  CHECK(format_manifest(m) == kSixRows);
  CHECK(parse_manifest(format_manifest(m)) == m);

  TempDir dir("manifest");
  save_manifest(dir.file("m.csv"), m);
  CHECK(load_manifest(dir.file("m.csv")) == m);
}

TEST_CASE("manifest errors") {
  const std::string header = std::string(kManifestHeader) + "\n";
  CHECK_ERRC(parse_manifest(header), Errc::EmptyManifest);
  CHECK_ERRC(parse_manifest(header + "x,s,ORIGINAL,Indian,F,BeautyPlus,image,p.png\n"),
             Errc::InvalidLabels);
  CHECK_ERRC(parse_manifest(header + "x,s,RETOUCHED,Indian,F,,image,p.png\n"), Errc::InvalidLabels);
  CHECK_ERRC(parse_manifest(header + "x,s,ORIGINAL,Indian,F,,image,a.png\nx,t,ORIGINAL,Indian,F,,"
                                     "image,b.png\n"),
             Errc::DuplicateId);
  CHECK_ERRC(parse_manifest(header + "x,s,FAKE,Indian,F,,image,p.png\n"), Errc::UnknownTag);
  CHECK_ERRC(parse_manifest(header + "x,s,RETOUCHED,Indian,F,Photoshop,image,p.png\n"),
             Errc::UnknownTag);
  CHECK_ERRC(parse_manifest(header + "x,s,ORIGINAL,Indian,X,,image,p.png\n"), Errc::UnknownTag);
  CHECK_ERRC(parse_manifest("id,subject\n"), Errc::ParseError);

  try {
    parse_manifest(header + "x,s,ORIGINAL,Indian,F,,image,p.png\n\ny,s,ORIGINAL,Indian\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
}

TEST_CASE("filter keeps manifest order") {
  const DatasetManifest m = parse_manifest(kSixRows);
  const auto f = filter_manifest(m, [](const SampleRecord& r) { return r.gender == "F"; });
  REQUIRE(f.size() == 4);
  CHECK(f.records[0].id == "a1");
  CHECK(f.records[1].id == "a2");
  CHECK(f.records[2].id == "c1");
  CHECK(f.records[3].id == "c2");
}

TEST_CASE("label vectors") {
  DatasetManifest m = parse_manifest(kSixRows);
  CHECK(class_ids(m) == std::vector<int>{0, 1, 0, 1, 0, 1});
  CHECK(svm_labels(m) == std::vector<int>{1, -1, 1, -1, 1, -1});
  const auto vocab = subclass_vocabulary(m);
  CHECK(vocab == std::vector<std::string>{"Caucasian", "Chinese", "Indian"});
  CHECK(subclass_ids(m, vocab) == std::vector<int>{2, 2, 1, 1, 0, 0});
  m.subclass_scheme = SubclassScheme::Gender;
  CHECK(subclass_ids(m, subclass_vocabulary(m)) == std::vector<int>{0, 0, 1, 1, 0, 0});
  CHECK_ERRC(subclass_ids(m, {"F"}), Errc::UnknownTag);
}

TEST_CASE("S3AF round-trip and corruption") {
  const Matrix M = random_matrix(10, 7, 3);
  const std::string bytes = encode_features(M);
  CHECK(bytes.size() == 16 + 8 * 70);
  CHECK(decode_features(bytes) == M);
  CHECK(encode_features(decode_features(bytes)) == bytes);

  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_ERRC(decode_features(bad), Errc::BadMagic);
  for (std::size_t cut : {6, 15, 16, 100, 575}) {
    try {
      decode_features(std::string_view(bytes).substr(0, cut));
      FAIL("expected TruncatedFile");
    } catch (const TruncatedFileError& e) {
      CHECK(e.offset() == cut);
    }
  }

  TempDir dir("s3af");
  save_features(dir.file("f.s3af"), M);
  CHECK(load_features(dir.file("f.s3af")) == M);
}

TEST_CASE("image loading and resizing") {
  TempDir dir("img");
  write_bytes(dir.file("gray.bmp"), gray_bmp(3, 2, std::vector<int>(6, 128)));
  const GrayImage g = load_image(dir.file("gray.bmp"));
  REQUIRE(g.width == 3);
  REQUIRE(g.height == 2);
  for (double v : g.pixels) CHECK(std::abs(v - 128.0 / 255.0) < 1e-12);

  write_bytes(dir.file("ramp.bmp"), gray_bmp(5, 3, {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100,
                                                     110, 120, 130, 140}));
  const GrayImage ramp = load_image(dir.file("ramp.bmp"));
  CHECK(ramp.pixels[7] == 70.0 / 255.0);
  CHECK(resize_bilinear(ramp, 5, 3).pixels == ramp.pixels);

  // Pixel-center alignment: [a, b] -> [a, (3a+b)/4, (a+3b)/4, b] on each axis.
  GrayImage tiny{2, 2, {0.0, 1.0, 0.5, 0.25}};
  const GrayImage big = resize_bilinear(tiny, 4, 4);
  auto lerp1 = [](double a, double b) {
    return std::vector<double>{a, 0.75 * a + 0.25 * b, 0.25 * a + 0.75 * b, b};
  };
  const auto top = lerp1(0.0, 1.0);
  const auto bottom = lerp1(0.5, 0.25);
  for (std::size_t x = 0; x < 4; ++x) {
    const auto col = lerp1(top[x], bottom[x]);
    for (std::size_t y = 0; y < 4; ++y) CHECK(std::abs(big.pixels[y * 4 + x] - col[y]) < 1e-15);
  }

  write_bytes(dir.file("junk.png"), "not an image");
  CHECK_ERRC(load_image(dir.file("junk.png")), Errc::UnreadableImage);
  CHECK_ERRC(load_image(dir.file("missing.png")), Errc::UnreadableImage);
  write_bytes(dir.file("empty.bmp"), gray_bmp(0, 0, {}));
  CHECK_ERRC(load_image(dir.file("empty.bmp")), Errc::ZeroAreaImage);
  CHECK(vectorize_image(dir.file("gray.bmp"), 4, 4).size() == 16);
}

TEST_CASE("average pooling") {
  Matrix X(16, 1);
  for (std::size_t i = 0; i < 16; ++i) X(i, 0) = static_cast<double>(i);
  const Matrix P = average_pool(X, 4, 2);
  REQUIRE(P.rows() == 4);
  CHECK(P(0, 0) == (0 + 1 + 4 + 5) / 4.0);
  CHECK(P(3, 0) == (10 + 11 + 14 + 15) / 4.0);
  CHECK(average_pool(X, 4, 1) == X);
  CHECK_ERRC(average_pool(X, 4, 3), Errc::InvalidArgument);
}

TEST_CASE("assemble inputs from feature references and images") {
  TempDir dir("assemble");
  const Matrix F = random_matrix(4, 3, 8);
  save_features(dir.file("f.s3af"), F);
  std::string csv = std::string(kManifestHeader) + "\n";
  csv += "a,s1,ORIGINAL,E0,F,,features,f.s3af#2\n";
  csv += "b,s1,RETOUCHED,E0,F,TOOL1,features,f.s3af#0\n";
  const Matrix X = assemble_inputs(parse_manifest(csv), dir.path.string());
  REQUIRE(X.cols() == 2);
  for (std::size_t r = 0; r < 4; ++r) {
    CHECK(X(r, 0) == F(r, 2));
    CHECK(X(r, 1) == F(r, 0));
  }
  CHECK_ERRC(assemble_inputs(parse_manifest(std::string(kManifestHeader) +
                                            "\na,s1,ORIGINAL,E0,F,,features,f.s3af#9\n"),
                             dir.path.string()),
             Errc::IndexError);

  write_bytes(dir.file("i.bmp"), gray_bmp(2, 2, {0, 255, 255, 0}));
  const std::string img_csv =
      std::string(kManifestHeader) + "\na,s1,ORIGINAL,E0,F,,image,i.bmp\n";
  IngestOptions opts;
  opts.image_side = 4;
  opts.pool = 2;
  const Matrix I = assemble_inputs(parse_manifest(img_csv), dir.path.string(), opts);
  REQUIRE(I.rows() == 4);
  CHECK(std::abs(I(0, 0) - (0.0 + 0.25 + 0.25 + 0.375) / 4.0) < 1e-12);
}

TEST_CASE("centering is translation invariant") {
  const Matrix X = random_matrix(5, 20, 4);
  Matrix Y = X;
  for (std::size_t r = 0; r < 5; ++r) {
    for (double& v : Y.row(r)) v += 3.0 * static_cast<double>(r) - 7.0;
  }
  const Matrix a = center_columns(X, column_mean(X));
  const Matrix b = center_columns(Y, column_mean(Y));
  for (std::size_t i = 0; i < a.data().size(); ++i) CHECK(std::abs(a.data()[i] - b.data()[i]) < 1e-9);
  for (double m : column_mean(a)) CHECK(std::abs(m) < 1e-12);
  CHECK_ERRC(center_columns(X, Vector(3)), Errc::ShapeError);
}

TEST_CASE("synthetic data") {
  SynthConfig cfg;
  const SynthData a = generate_synthetic(cfg);
  const SynthData b = generate_synthetic(cfg);
  CHECK(a.X == b.X);
  CHECK(a.manifest == b.manifest);
  CHECK(a.X.rows() == 64);
  CHECK(a.X.cols() == 800);
  validate_manifest(a.manifest);

  // Each subject holds exactly one original and one retouched sample.
  std::map<std::string, std::pair<int, int>> per_subject;
  for (const auto& r : a.manifest.records) {
    auto& c = per_subject[r.subject_id];
    (r.class_label == ClassLabel::Original ? c.first : c.second)++;
  }
  for (const auto& [s, c] : per_subject) CHECK(c == std::pair{1, 1});

  // Directions are orthonormal.
  const Matrix G = matmul_at(a.directions, a.directions);
  for (std::size_t i = 0; i < G.rows(); ++i) {
    for (std::size_t j = 0; j < G.cols(); ++j) CHECK(std::abs(G(i, j) - (i == j)) < 1e-12);
  }

  // Group means match the construction within 4 standard errors per coordinate.
  cfg.samples_per_group = 500;
  cfg.noise_sigma = 0.5;
  const SynthData big = generate_synthetic(cfg);
  const auto cls = class_ids(big.manifest);
  const auto sub = subclass_ids(big.manifest, subclass_vocabulary(big.manifest));
  const double tol = 4.0 * cfg.noise_sigma / std::sqrt(500.0);
  for (int c = 0; c < 2; ++c) {
    for (int s = 0; s < 2; ++s) {
      std::vector<std::size_t> cols;
      for (std::size_t k = 0; k < cls.size(); ++k) {
        if (cls[k] == c && sub[k] == s) cols.push_back(k);
      }
      REQUIRE(cols.size() == 500);
      const Vector mean = column_mean(slice_columns(big.X, cols));
      for (std::size_t r = 0; r < 64; ++r) {
        const double want = (c == 0 ? -0.5 : 0.5) * cfg.class_shift * big.directions(r, 0) +
                            cfg.subclass_shift * big.directions(r, 1 + s);
        CHECK(std::abs(mean[r] - want) < tol);
      }
    }
  }

  cfg.samples_per_group = 50;
  cfg.noise_sigma = 1e-3;
  cfg.class_shift = 5.0;
  const SynthData sep = generate_synthetic(cfg);
  const auto y = svm_labels(sep.manifest);
  const SvmModel m = train_svm(sep.X, y, {});
  std::size_t correct = 0;
  for (std::size_t k = 0; k < y.size(); ++k) correct += predict(m, sep.X.col(k)) == y[k];
  CHECK(correct == y.size());

  cfg.noise_sigma = 0.0;
  CHECK_ERRC(generate_synthetic(cfg), Errc::InvalidConfig);
}
}
