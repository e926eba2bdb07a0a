#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "s3a/matrix.hpp"

namespace s3a {

enum class ClassLabel { Original, Retouched };
enum class SourceKind { Features, Image };
enum class SubclassScheme { Ethnicity, Gender };
/// Retouching tools grouped as in the reporting tables: BeautyPlus and
/// MakeupPlus are Tool1, PortraitPro is Tool2.
enum class ToolGroup { None, Tool1, Tool2 };

struct SampleRecord {
  std::string id;
  std::string subject_id;
  ClassLabel class_label = ClassLabel::Original;
  std::string ethnicity;
  std::string gender;  ///< "M" or "F"
  std::string tool;    ///< empty for originals
  SourceKind source_kind = SourceKind::Features;
  /// Image path, or "<feature file>#<column>" for feature references.
  std::string source_path;

  ToolGroup tool_group() const;
  bool operator==(const SampleRecord&) const = default;
};

struct DatasetManifest {
  std::vector<SampleRecord> records;
  SubclassScheme subclass_scheme = SubclassScheme::Ethnicity;

  std::size_t size() const noexcept { return records.size(); }
  bool operator==(const DatasetManifest&) const = default;
};

inline constexpr std::string_view kManifestHeader =
    "id,subject_id,class,ethnicity,gender,tool,source_kind,source_path";

ToolGroup normalize_tool(std::string_view tool);
std::string_view class_name(ClassLabel c);
std::string_view scheme_name(SubclassScheme s);
SubclassScheme parse_scheme(std::string_view s);

/// Checks tag vocabularies, id uniqueness and the original/tool contract.
void validate_manifest(const DatasetManifest& m);
DatasetManifest parse_manifest(std::string_view text);
std::string format_manifest(const DatasetManifest& m);
DatasetManifest load_manifest(const std::string& path);
void save_manifest(const std::string& path, const DatasetManifest& m);

/// Records satisfying pred, in manifest order.
DatasetManifest filter_manifest(const DatasetManifest& m,
                                const std::function<bool(const SampleRecord&)>& pred);

/// Subclass tag of a record under the manifest's scheme.
const std::string& subclass_tag(const SampleRecord& r, SubclassScheme scheme);
/// Sorted distinct subclass tags; defines the integer subclass ids.
std::vector<std::string> subclass_vocabulary(const DatasetManifest& m);
/// 0 = original, 1 = retouched.
std::vector<int> class_ids(const DatasetManifest& m);
std::vector<int> subclass_ids(const DatasetManifest& m, const std::vector<std::string>& vocabulary);
/// +1 = original (positive), -1 = retouched.
std::vector<int> svm_labels(const DatasetManifest& m);

// S3AF feature files: "S3AF", u32 version, u32 rows, u32 cols, then
// rows x cols little-endian f64 row-major.
inline constexpr std::uint32_t kFeatureFormatVersion = 1;

std::string encode_features(const Matrix& m);
Matrix decode_features(std::string_view bytes);
void save_features(const std::string& path, const Matrix& m);
Matrix load_features(const std::string& path);

/// Grayscale image with intensities in [0, 1], row-major.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;
};

/// Reads an 8-bit PNG or uncompressed BMP; color is reduced by
/// 0.299 R + 0.587 G + 0.114 B. Throws UnreadableImage or ZeroAreaImage.
GrayImage load_image(const std::string& path);
/// Bilinear resampling with pixel-center alignment; same-size resizes are exact copies.
GrayImage resize_bilinear(const GrayImage& img, std::size_t width, std::size_t height);
/// load_image, resize to width x height, flatten row-major.
Vector vectorize_image(const std::string& path, std::size_t width = 256, std::size_t height = 256);

/// Averages factor x factor blocks of each column, read as a side x side image.
Matrix average_pool(const Matrix& X, std::size_t side, std::size_t factor);

Vector column_mean(const Matrix& X);
Matrix center_columns(const Matrix& X, std::span<const double> mean);

/// Builds the raw input matrix (one column per record) from feature
/// references and images. Relative paths resolve against base_dir.
struct IngestOptions {
  std::size_t image_side = 256;
  std::size_t pool = 1;
};
Matrix assemble_inputs(const DatasetManifest& m, const std::string& base_dir,
                       const IngestOptions& opts = {});

struct SynthConfig {
  std::size_t input_dim = 64;
  std::size_t classes = 2;
  std::size_t subclasses_per_class = 2;
  std::size_t samples_per_group = 200;
  double class_shift = 1.0;
  double subclass_shift = 3.0;
  double noise_sigma = 0.002;  // row supports only separate subclasses when noise is far below the shifts
  std::uint64_t seed = 7;

  void validate() const;
};

struct SynthData {
  Matrix X;  ///< input_dim x (classes * subclasses * samples_per_group)
  DatasetManifest manifest;
  /// Orthonormal columns: class direction, then one per subclass.
  Matrix directions;
};

/// Group (c, s) is drawn from N(mu_c + mu_s, sigma^2 I) with
/// mu_c = (c == 0 ? -1/2 : +1/2) * class_shift * u and mu_s = subclass_shift * v_s.
/// Each synthetic subject contributes one original and one retouched sample;
/// genders alternate by subject and tools alternate within each gender.
SynthData generate_synthetic(const SynthConfig& cfg, const std::string& feature_ref = "features.s3af");

}  // namespace s3a
