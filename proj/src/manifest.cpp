#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "binary_io.hpp"
#include "s3a/datakit.hpp"
#include "s3a/error.hpp"

namespace s3a {

namespace {

bool is_token(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

SampleRecord parse_record(std::string_view line, std::size_t line_no) {
  const auto f = split_fields(line);
  if (f.size() != 8) {
    throw ParseError(line_no, "expected 8 fields, found " + std::to_string(f.size()));
  }
  SampleRecord r;
  r.id = f[0];
  r.subject_id = f[1];
  if (f[2] == "ORIGINAL") {
    r.class_label = ClassLabel::Original;
  } else if (f[2] == "RETOUCHED") {
    r.class_label = ClassLabel::Retouched;
  } else {
    throw Error(Errc::UnknownTag, "line " + std::to_string(line_no) + ": unknown class '" +
                                      std::string(f[2]) + "'");
  }
  r.ethnicity = f[3];
  r.gender = f[4];
  r.tool = f[5];
  if (f[6] == "features") {
    r.source_kind = SourceKind::Features;
  } else if (f[6] == "image") {
    r.source_kind = SourceKind::Image;
  } else {
    throw Error(Errc::UnknownTag, "line " + std::to_string(line_no) + ": unknown source_kind '" +
                                      std::string(f[6]) + "'");
  }
  r.source_path = f[7];
  return r;
}

void validate_record(const SampleRecord& r, const std::string& where) {
  if (r.id.empty() || r.subject_id.empty()) {
    throw Error(Errc::ParseError, where + ": id and subject_id are required");
  }
  if (!is_token(r.ethnicity)) {
    throw Error(Errc::UnknownTag, where + ": ethnicity '" + r.ethnicity + "' is not a tag");
  }
  if (r.gender != "M" && r.gender != "F") {
    throw Error(Errc::UnknownTag, where + ": gender '" + r.gender + "' (expected M or F)");
  }
  if (!r.tool.empty() && normalize_tool(r.tool) == ToolGroup::None) {
    throw Error(Errc::UnknownTag, where + ": unknown tool '" + r.tool + "'");
  }
  if (r.class_label == ClassLabel::Original && !r.tool.empty()) {
    throw Error(Errc::InvalidLabels, where + ": ORIGINAL record carries tool '" + r.tool + "'");
  }
  if (r.class_label == ClassLabel::Retouched && r.tool.empty()) {
    throw Error(Errc::InvalidLabels, where + ": RETOUCHED record has no tool");
  }
  if (r.source_path.empty()) throw Error(Errc::ParseError, where + ": source_path is required");
}

}  // namespace

ToolGroup normalize_tool(std::string_view tool) {
  if (tool == "TOOL1" || tool == "BeautyPlus" || tool == "MakeupPlus") return ToolGroup::Tool1;
  if (tool == "TOOL2" || tool == "PortraitPro") return ToolGroup::Tool2;
  return ToolGroup::None;
}

ToolGroup SampleRecord::tool_group() const { return normalize_tool(tool); }

std::string_view class_name(ClassLabel c) {
  return c == ClassLabel::Original ? "ORIGINAL" : "RETOUCHED";
}

std::string_view scheme_name(SubclassScheme s) {
  return s == SubclassScheme::Ethnicity ? "ethnicity" : "gender";
}

SubclassScheme parse_scheme(std::string_view s) {
  if (s == "ethnicity") return SubclassScheme::Ethnicity;
  if (s == "gender") return SubclassScheme::Gender;
  throw Error(Errc::InvalidConfig, "subclass scheme must be 'ethnicity' or 'gender'");
}

void validate_manifest(const DatasetManifest& m) {
  std::set<std::string> ids;
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    const auto& r = m.records[i];
    validate_record(r, "record " + std::to_string(i));
    if (!ids.insert(r.id).second) throw Error(Errc::DuplicateId, "duplicate id '" + r.id + "'");
  }
}

DatasetManifest parse_manifest(std::string_view text) {
  DatasetManifest m;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool saw_header = false;
  std::set<std::string> ids;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!saw_header) {
      if (line != kManifestHeader) throw ParseError(line_no, "bad header");
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    SampleRecord r = parse_record(line, line_no);
    validate_record(r, "line " + std::to_string(line_no));
    if (!ids.insert(r.id).second) {
      throw Error(Errc::DuplicateId,
                  "line " + std::to_string(line_no) + ": duplicate id '" + r.id + "'");
    }
    m.records.push_back(std::move(r));
  }
  if (!saw_header) throw ParseError(1, "missing header");
  if (m.records.empty()) throw Error(Errc::EmptyManifest, "manifest has no records");
  return m;
}

std::string format_manifest(const DatasetManifest& m) {
  std::string out(kManifestHeader);
  out += '\n';
  for (const auto& r : m.records) {
    out += r.id + ',' + r.subject_id + ',' + std::string(class_name(r.class_label)) + ',' +
           r.ethnicity + ',' + r.gender + ',' + r.tool + ',' +
           (r.source_kind == SourceKind::Features ? "features" : "image") + ',' + r.source_path +
           '\n';
  }
  return out;
}

DatasetManifest load_manifest(const std::string& path) {
  return parse_manifest(detail::read_file(path));
}

void save_manifest(const std::string& path, const DatasetManifest& m) {
  validate_manifest(m);
  detail::write_file(path, format_manifest(m));
}

DatasetManifest filter_manifest(const DatasetManifest& m,
                                const std::function<bool(const SampleRecord&)>& pred) {
  DatasetManifest out;
  out.subclass_scheme = m.subclass_scheme;
  std::copy_if(m.records.begin(), m.records.end(), std::back_inserter(out.records), pred);
  return out;
}

const std::string& subclass_tag(const SampleRecord& r, SubclassScheme scheme) {
  return scheme == SubclassScheme::Ethnicity ? r.ethnicity : r.gender;
}

std::vector<std::string> subclass_vocabulary(const DatasetManifest& m) {
  std::set<std::string> tags;
  for (const auto& r : m.records) tags.insert(subclass_tag(r, m.subclass_scheme));
  return {tags.begin(), tags.end()};
}

std::vector<int> class_ids(const DatasetManifest& m) {
  std::vector<int> out;
  out.reserve(m.size());
  for (const auto& r : m.records) out.push_back(r.class_label == ClassLabel::Original ? 0 : 1);
  return out;
}

std::vector<int> subclass_ids(const DatasetManifest& m,
                              const std::vector<std::string>& vocabulary) {
  std::vector<int> out;
  out.reserve(m.size());
  for (const auto& r : m.records) {
    const auto& tag = subclass_tag(r, m.subclass_scheme);
    auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), tag);
    if (it == vocabulary.end() || *it != tag) {
      throw Error(Errc::UnknownTag, "subclass tag '" + tag + "' not in vocabulary");
    }
    out.push_back(static_cast<int>(it - vocabulary.begin()));
  }
  return out;
}

std::vector<int> svm_labels(const DatasetManifest& m) {
  std::vector<int> out;
  out.reserve(m.size());
  for (const auto& r : m.records) out.push_back(r.class_label == ClassLabel::Original ? 1 : -1);
  return out;
}

Matrix assemble_inputs(const DatasetManifest& m, const std::string& base_dir,
                       const IngestOptions& opts) {
  namespace fs = std::filesystem;
  auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path.string() : (fs::path(base_dir) / path).string();
  };
  std::map<std::string, Matrix> cache;
  std::vector<Vector> columns;
  columns.reserve(m.size());
  for (const auto& r : m.records) {
    if (r.source_kind == SourceKind::Features) {
      const auto hash = r.source_path.rfind('#');
      if (hash == std::string::npos) {
        throw Error(Errc::ParseError, r.id + ": feature reference needs '#<column>'");
      }
      const std::string file = resolve(r.source_path.substr(0, hash));
      std::size_t col = 0;
      try {
        col = std::stoul(r.source_path.substr(hash + 1));
      } catch (const std::exception&) {
        throw Error(Errc::ParseError, r.id + ": bad column in '" + r.source_path + "'");
      }
      auto it = cache.find(file);
      if (it == cache.end()) it = cache.emplace(file, load_features(file)).first;
      if (col >= it->second.cols()) {
        throw Error(Errc::IndexError, r.id + ": column " + std::to_string(col) + " not in " + file);
      }
      columns.push_back(it->second.col(col));
    } else {
      Vector v = vectorize_image(resolve(r.source_path), opts.image_side, opts.image_side);
      if (opts.pool > 1) {
        const Matrix pooled = average_pool(Matrix::column(v), opts.image_side, opts.pool);
        v.assign(pooled.data().begin(), pooled.data().end());
      }
      columns.push_back(std::move(v));
    }
  }
  if (columns.empty()) throw Error(Errc::EmptyManifest, "no records to assemble");
  const std::size_t d = columns.front().size();
  Matrix X(d, columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k].size() != d) {
      throw Error(Errc::StageMismatch, m.records[k].id + ": input has " +
                                           std::to_string(columns[k].size()) + " dims, expected " +
                                           std::to_string(d));
    }
    for (std::size_t r = 0; r < d; ++r) X(r, k) = columns[k][r];
  }
  return X;
}

}  // namespace s3a
