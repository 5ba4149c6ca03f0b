#include "ransomnet/features.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ransomnet/fingerprint.hpp"
#include "ransomnet/kernels.hpp"
#include "text_util.hpp"

namespace ransomnet {

std::string_view to_string(Label label) { return label == Label::Ransomware ? "ransomware" : "benign"; }

std::optional<Label> parse_label(std::string_view text) {
  if (text == "ransomware") return Label::Ransomware;
  if (text == "benign") return Label::Benign;
  return std::nullopt;
}

std::size_t Dataset::count(Label label) const {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [&](const LabeledSample& s) { return s.label == label; }));
}

FeatureVector encode(const Conversation& c) {
  return {
      static_cast<double>(c.protocol),      static_cast<double>(c.address_a.value()),
      static_cast<double>(c.port_a),        static_cast<double>(c.address_b.value()),
      static_cast<double>(c.port_b),        static_cast<double>(c.packets_total),
      static_cast<double>(c.bytes_total),   static_cast<double>(c.packets_ab),
      static_cast<double>(c.bytes_ab),      static_cast<double>(c.packets_ba),
      static_cast<double>(c.bytes_ba),      c.rel_start,
      c.duration,
  };
}

namespace {

template <typename T>
T integral(double value, double max, const char* what) {
  if (!(value >= 0.0 && value <= max && std::floor(value) == value)) {
    throw Error(ErrorCode::RowError, std::string(what) + " is not an encodable integer");
  }
  return static_cast<T>(value);
}

}  // namespace

Conversation decode(const FeatureVector& f) {
  auto at = [&](Feature feature) { return f[static_cast<std::size_t>(feature)]; };
  constexpr double kMaxCount = 9007199254740992.0;  // 2^53
  Conversation c;
  c.protocol = integral<std::uint8_t>(at(Feature::Protocol), 255, "protocol");
  c.address_a = Ipv4Address(integral<std::uint32_t>(at(Feature::AddressA), 4294967295.0, "address_a"));
  c.port_a = integral<std::uint16_t>(at(Feature::PortA), 65535, "port_a");
  c.address_b = Ipv4Address(integral<std::uint32_t>(at(Feature::AddressB), 4294967295.0, "address_b"));
  c.port_b = integral<std::uint16_t>(at(Feature::PortB), 65535, "port_b");
  c.packets_total = integral<std::uint64_t>(at(Feature::PacketsTotal), kMaxCount, "packets");
  c.bytes_total = integral<std::uint64_t>(at(Feature::BytesTotal), kMaxCount, "bytes");
  c.packets_ab = integral<std::uint64_t>(at(Feature::PacketsAb), kMaxCount, "packets_ab");
  c.bytes_ab = integral<std::uint64_t>(at(Feature::BytesAb), kMaxCount, "bytes_ab");
  c.packets_ba = integral<std::uint64_t>(at(Feature::PacketsBa), kMaxCount, "packets_ba");
  c.bytes_ba = integral<std::uint64_t>(at(Feature::BytesBa), kMaxCount, "bytes_ba");
  c.rel_start = at(Feature::RelStart);
  c.duration = at(Feature::Duration);
  return c;
}

FeatureVector without_addresses(FeatureVector features) {
  features[static_cast<std::size_t>(Feature::AddressA)] = 0.0;
  features[static_cast<std::size_t>(Feature::AddressB)] = 0.0;
  return features;
}

ScalingParams fit_scaler(const Dataset& dataset) {
  if (dataset.samples.empty()) throw Error(ErrorCode::EmptyDataset, "cannot fit a scaler on zero samples");
  ScalingParams params;
  params.min = dataset.samples.front().features;
  params.max = dataset.samples.front().features;
  for (const LabeledSample& sample : dataset.samples) {
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      params.min[i] = std::min(params.min[i], sample.features[i]);
      params.max[i] = std::max(params.max[i], sample.features[i]);
    }
  }
  params.fitted_on = dataset_fingerprint(dataset);
  return params;
}

FeatureVector apply_scaler(const ScalingParams& params, std::span<const double> vector) {
  if (vector.size() != kFeatureCount) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(kFeatureCount) + " features, got " + std::to_string(vector.size()));
  }
  FeatureVector range{};
  for (std::size_t i = 0; i < kFeatureCount; ++i) range[i] = params.max[i] - params.min[i];
  FeatureVector out{};
  kernels::minmax_scale(vector, params.min, range, out);
  return out;
}

Dataset label_and_merge(std::span<const std::pair<std::vector<Conversation>, Label>> sets) {
  if (sets.empty()) throw Error(ErrorCode::EmptyInput, "no conversation sets to merge");
  Dataset dataset;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    const auto& [conversations, label] = sets[s];
    if (conversations.empty()) throw Error(ErrorCode::EmptyInput, "conversation set is empty", s);
    for (const Conversation& c : conversations) dataset.samples.push_back({encode(c), label, {}});
  }
  return dataset;
}

std::uint64_t dataset_fingerprint(std::span<const LabeledSample> samples) {
  Fnv1a hash;
  hash.update_u64(samples.size());
  for (const LabeledSample& sample : samples) {
    for (double v : sample.features) hash.update_double(v);
    hash.update_u64(static_cast<std::uint64_t>(sample.label));
  }
  return hash.digest();
}

std::string dataset_csv_header() { return std::string(kConversationCsvHeader) + ",label"; }

std::string dataset_to_csv(const Dataset& dataset) {
  std::string out = dataset_csv_header();
  out += '\n';
  for (const LabeledSample& sample : dataset.samples) {
    append_conversation_fields(out, decode(sample.features));
    out += ',';
    out += to_string(sample.label);
    out += '\n';
  }
  return out;
}

Dataset csv_to_dataset(std::istream& in, Validation mode, std::vector<std::string>* warnings) {
  std::string line;
  std::size_t line_no = 1;
  if (!detail::read_line(in, line, line_no) || line != dataset_csv_header()) {
    throw Error(ErrorCode::SchemaMismatch, "expected header '" + dataset_csv_header() + "'", 1);
  }
  std::vector<std::string> local_warnings;
  Dataset dataset;
  while (detail::read_line(in, line, ++line_no)) {
    if (line.empty()) continue;
    const auto fields = detail::split_commas(line);
    if (fields.size() != 14) throw Error(ErrorCode::RowError, "expected 14 fields", line_no);
    const Conversation c = parse_conversation_fields(fields, line_no, mode, local_warnings);
    auto label = parse_label(fields[13]);
    if (!label) throw Error(ErrorCode::RowError, "label must be 'ransomware' or 'benign'", line_no);
    dataset.samples.push_back({encode(c), *label, "line " + std::to_string(line_no)});
  }
  if (warnings) warnings->insert(warnings->end(), local_warnings.begin(), local_warnings.end());
  return dataset;
}

Dataset csv_to_dataset(std::string_view text, Validation mode, std::vector<std::string>* warnings) {
  std::istringstream in{std::string(text)};
  return csv_to_dataset(in, mode, warnings);
}

}  // namespace ransomnet
