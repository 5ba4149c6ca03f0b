#pragma once

// Fixed-order numeric encoding of conversations, labels, datasets and
// min-max scaling.

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ransomnet/conversation.hpp"

namespace ransomnet {

inline constexpr std::size_t kFeatureCount = 13;

using FeatureVector = std::array<double, kFeatureCount>;

// Column order of FeatureVector.
enum class Feature : std::size_t {
  Protocol = 0,
  AddressA,
  PortA,
  AddressB,
  PortB,
  PacketsTotal,
  BytesTotal,
  PacketsAb,
  BytesAb,
  PacketsBa,
  BytesBa,
  RelStart,
  Duration,
};

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "protocol",   "address_a", "port_a",     "address_b", "port_b",    "packets",  "bytes",
    "packets_ab", "bytes_ab",  "packets_ba", "bytes_ba",  "rel_start", "duration",
};

enum class Label : std::uint8_t { Benign = 0, Ransomware = 1 };

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view text);

struct LabeledSample {
  FeatureVector features{};
  Label label = Label::Benign;
  std::string origin;
};

struct Dataset {
  std::vector<LabeledSample> samples;

  std::size_t size() const { return samples.size(); }
  std::size_t count(Label label) const;
  static constexpr const auto& feature_names() { return kFeatureNames; }
};

struct ScalingParams {
  FeatureVector min{};
  FeatureVector max{};
  std::uint64_t fitted_on = 0;  // dataset fingerprint

  bool operator==(const ScalingParams&) const = default;
};

FeatureVector encode(const Conversation& conversation);

// Inverse of encode for vectors that came from encode (integral counts,
// in-range addresses and ports). Throws RowError otherwise.
Conversation decode(const FeatureVector& features);

// Zeroes AddressA and AddressB.
FeatureVector without_addresses(FeatureVector features);

ScalingParams fit_scaler(const Dataset& dataset);
FeatureVector apply_scaler(const ScalingParams& params, std::span<const double> vector);

Dataset label_and_merge(std::span<const std::pair<std::vector<Conversation>, Label>> sets);

// Covers features (bit patterns) and labels in sample order.
std::uint64_t dataset_fingerprint(std::span<const LabeledSample> samples);
inline std::uint64_t dataset_fingerprint(const Dataset& dataset) { return dataset_fingerprint(dataset.samples); }

// Dataset CSV: conversation columns plus a trailing `label` column.
std::string dataset_csv_header();
std::string dataset_to_csv(const Dataset& dataset);
Dataset csv_to_dataset(std::istream& in, Validation mode = Validation::Strict,
                       std::vector<std::string>* warnings = nullptr);
Dataset csv_to_dataset(std::string_view text, Validation mode = Validation::Strict,
                       std::vector<std::string>* warnings = nullptr);

}  // namespace ransomnet
