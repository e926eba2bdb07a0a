#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace s3a {

/// Machine-readable failure categories. The CLI prints these verbatim.
enum class Errc {
  ShapeError,
  IndexError,
  InvalidLabels,
  EmptyBatch,
  InvalidDimension,
  MissingPartition,
  StaleState,
  NonFiniteObjective,
  SingleClassData,
  InvalidArgument,
  ParseError,
  DuplicateId,
  UnknownTag,
  EmptyManifest,
  UnreadableImage,
  ZeroAreaImage,
  InvalidConfig,
  BadMagic,
  TruncatedFile,
  DimOverflow,
  IoError,
  InconsistentSubjectTags,
  TooFewSubjects,
  MissingTag,
  LengthMismatch,
  MissingInput,
  StageMismatch,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Thrown for truncated binary files; carries the byte offset where the read failed.
class TruncatedFileError : public Error {
 public:
  TruncatedFileError(std::size_t offset, const std::string& what)
      : Error(Errc::TruncatedFile, what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Thrown by the manifest parser; line is 1-based and counts the header.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(Errc::ParseError, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace s3a
