#include <cmath>
#include <cstdio>

#include "s3a/datakit.hpp"
#include "s3a/error.hpp"
#include "s3a/rng.hpp"

namespace s3a {

void SynthConfig::validate() const {
  if (classes != 2) throw Error(Errc::InvalidConfig, "synthetic data has exactly 2 classes");
  if (input_dim == 0 || subclasses_per_class == 0 || samples_per_group == 0) {
    throw Error(Errc::InvalidConfig, "synthetic counts must be >= 1");
  }
  if (input_dim < subclasses_per_class + 1) {
    throw Error(Errc::InvalidConfig, "input_dim must exceed subclasses_per_class");
  }
  if (!(noise_sigma > 0.0)) throw Error(Errc::InvalidConfig, "noise_sigma must be > 0");
  if (!std::isfinite(class_shift) || !std::isfinite(subclass_shift)) {
    throw Error(Errc::InvalidConfig, "shifts must be finite");
  }
}

SynthData generate_synthetic(const SynthConfig& cfg, const std::string& feature_ref) {
  cfg.validate();
  Rng rng(cfg.seed);
  const std::size_t d = cfg.input_dim;
  const std::size_t S = cfg.subclasses_per_class;

  // Gram-Schmidt on Gaussian draws: column 0 is the class axis, 1..S the subclass axes.
  Matrix dirs(d, S + 1);
  for (std::size_t k = 0; k <= S; ++k) {
    Vector v(d);
    double norm = 0.0;
    while (norm < 1e-6) {
      for (double& x : v) x = rng.normal();
      for (std::size_t j = 0; j < k; ++j) {
        double proj = 0.0;
        for (std::size_t r = 0; r < d; ++r) proj += v[r] * dirs(r, j);
        for (std::size_t r = 0; r < d; ++r) v[r] -= proj * dirs(r, j);
      }
      norm = 0.0;
      for (double x : v) norm += x * x;
      norm = std::sqrt(norm);
    }
    for (std::size_t r = 0; r < d; ++r) dirs(r, k) = v[r] / norm;
  }

  const std::size_t n = 2 * S * cfg.samples_per_group;
  SynthData out;
  out.X = Matrix(d, n);
  out.directions = dirs;
  out.manifest.subclass_scheme = SubclassScheme::Ethnicity;
  out.manifest.records.reserve(n);

  std::size_t col = 0;
  char buf[64];
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t k = 0; k < cfg.samples_per_group; ++k) {
      std::snprintf(buf, sizeof buf, "syn%zu_%04zu", s, k);
      const std::string subject = buf;
      const std::string gender = k % 2 == 0 ? "F" : "M";
      const std::string tool = (k / 2) % 2 == 0 ? "TOOL1" : "TOOL2";
      for (int c = 0; c < 2; ++c) {
        const double class_coef = (c == 0 ? -0.5 : 0.5) * cfg.class_shift;
        for (std::size_t r = 0; r < d; ++r) {
          out.X(r, col) = class_coef * dirs(r, 0) + cfg.subclass_shift * dirs(r, s + 1) +
                          cfg.noise_sigma * rng.normal();
        }
        SampleRecord rec;
        rec.id = subject + (c == 0 ? "_o" : "_r");
        rec.subject_id = subject;
        rec.class_label = c == 0 ? ClassLabel::Original : ClassLabel::Retouched;
        rec.ethnicity = "E" + std::to_string(s);
        rec.gender = gender;
        rec.tool = c == 0 ? "" : tool;
        rec.source_kind = SourceKind::Features;
        rec.source_path = feature_ref + "#" + std::to_string(col);
        out.manifest.records.push_back(std::move(rec));
        ++col;
      }
    }
  }
  return out;
}

}  // namespace s3a
