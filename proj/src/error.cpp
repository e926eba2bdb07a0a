#include "s3a/error.hpp"

namespace s3a {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::ShapeError: return "ShapeError";
    case Errc::IndexError: return "IndexError";
    case Errc::InvalidLabels: return "InvalidLabels";
    case Errc::EmptyBatch: return "EmptyBatch";
    case Errc::InvalidDimension: return "InvalidDimension";
    case Errc::MissingPartition: return "MissingPartition";
    case Errc::StaleState: return "StaleState";
    case Errc::NonFiniteObjective: return "NonFiniteObjective";
    case Errc::SingleClassData: return "SingleClassData";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ParseError: return "ParseError";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::UnknownTag: return "UnknownTag";
    case Errc::EmptyManifest: return "EmptyManifest";
    case Errc::UnreadableImage: return "UnreadableImage";
    case Errc::ZeroAreaImage: return "ZeroAreaImage";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::BadMagic: return "BadMagic";
    case Errc::TruncatedFile: return "TruncatedFile";
    case Errc::DimOverflow: return "DimOverflow";
    case Errc::IoError: return "IoError";
    case Errc::InconsistentSubjectTags: return "InconsistentSubjectTags";
    case Errc::TooFewSubjects: return "TooFewSubjects";
    case Errc::MissingTag: return "MissingTag";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::MissingInput: return "MissingInput";
    case Errc::StageMismatch: return "StageMismatch";
  }
  return "Unknown";
}

}  // namespace s3a
