#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ransomnet {

enum class ErrorCode {
  // capture
  BadMagic,
  TruncatedHeader,
  TruncatedRecord,
  UnsupportedLinkType,
  SchemaMismatch,
  RowError,
  Ipv6Unsupported,
  // conversation
  ClockSkew,
  UnsupportedProtocol,
  InvariantViolation,
  // features
  EmptyDataset,
  EmptyInput,
  DimensionMismatch,
  // classifiers
  SingleClassDataset,
  InvalidHyperparams,
  NonFiniteFeature,
  VersionMismatch,
  ChecksumFailure,
  MalformedModel,
  // eval
  LengthMismatch,
  TooFewSamples,
  // detect
  ModelLoadFailure,
  SinkFailure,
  // generic
  Io,
};

std::string_view to_string(ErrorCode code);

// Thrown by every library operation. `where` carries a line number (CSV) or
// an element index (packet streams) when the failure is positional.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message, std::optional<std::size_t> where = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> where() const noexcept { return where_; }

private:
  ErrorCode code_;
  std::optional<std::size_t> where_;
};

}  // namespace ransomnet
