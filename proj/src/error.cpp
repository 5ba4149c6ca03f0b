#include "ransomnet/error.hpp"

namespace ransomnet {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedHeader: return "TruncatedHeader";
    case ErrorCode::TruncatedRecord: return "TruncatedRecord";
    case ErrorCode::UnsupportedLinkType: return "UnsupportedLinkType";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::RowError: return "RowError";
    case ErrorCode::Ipv6Unsupported: return "Ipv6Unsupported";
    case ErrorCode::ClockSkew: return "ClockSkew";
    case ErrorCode::UnsupportedProtocol: return "UnsupportedProtocol";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingleClassDataset: return "SingleClassDataset";
    case ErrorCode::InvalidHyperparams: return "InvalidHyperparams";
    case ErrorCode::NonFiniteFeature: return "NonFiniteFeature";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::ChecksumFailure: return "ChecksumFailure";
    case ErrorCode::MalformedModel: return "MalformedModel";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ModelLoadFailure: return "ModelLoadFailure";
    case ErrorCode::SinkFailure: return "SinkFailure";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message, std::optional<std::size_t> where) {
  std::string out(to_string(code));
  if (where) {
    out += " at ";
    out += std::to_string(*where);
  }
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> where)
    : std::runtime_error(decorate(code, message, where)), code_(code), where_(where) {}

}  // namespace ransomnet
