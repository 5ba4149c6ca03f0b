#include "ransomnet/detect.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "ransomnet/fingerprint.hpp"
#include "text_util.hpp"

namespace ransomnet {

void WindowSpec::validate() const {
  if (!(interval > 0.0) || !std::isfinite(interval)) {
    throw Error(ErrorCode::InvalidHyperparams, "window interval must be a positive number of seconds");
  }
}

std::uint64_t window_index(double timestamp, double capture_start, double interval) {
  const double offset = timestamp - capture_start;
  if (!(offset > 0.0)) return 0;
  return static_cast<std::uint64_t>(std::floor(offset / interval));
}

std::vector<WindowBatch> window_packets(std::span<const PacketRecord> packets, const WindowSpec& spec) {
  spec.validate();
  if (packets.empty()) return {};
  double start = 0.0;
  if (spec.capture_start) {
    start = *spec.capture_start;
  } else {
    start = std::min_element(packets.begin(), packets.end(), [](const auto& a, const auto& b) {
              return a.timestamp < b.timestamp;
            })->timestamp;
  }
  std::map<std::uint64_t, WindowBatch> windows;
  for (const PacketRecord& p : packets) {
    if (p.timestamp < start) throw Error(ErrorCode::ClockSkew, "packet precedes the capture start");
    const std::uint64_t index = window_index(p.timestamp, start, spec.interval);
    auto [it, inserted] = windows.try_emplace(index);
    if (inserted) {
      it->second.index = index;
      it->second.start = start + static_cast<double>(index) * spec.interval;
    }
    it->second.packets.push_back(p);
  }
  std::vector<WindowBatch> out;
  out.reserve(windows.size());
  for (auto& [index, batch] : windows) out.push_back(std::move(batch));
  return out;
}

std::vector<Conversation> aggregate_window(const WindowBatch& batch) {
  double start = batch.start;
  // start + n*interval can round a hair above the earliest member.
  for (const PacketRecord& p : batch.packets) start = std::min(start, p.timestamp);
  return aggregate(batch.packets, start);
}

std::string alert_to_json(const Alert& alert) {
  nlohmann::ordered_json j;
  const Conversation& c = alert.conversation;
  j["window"] = alert.window_index;
  j["emitted_at"] = alert.emitted_at;
  j["protocol"] = c.protocol;
  j["address_a"] = c.address_a.to_string();
  j["port_a"] = c.port_a;
  j["address_b"] = c.address_b.to_string();
  j["port_b"] = c.port_b;
  j["score"] = alert.prediction.score;
  j["label"] = std::string(to_string(alert.prediction.label));
  j["model_fingerprint"] = to_hex(alert.model_fingerprint);
  nlohmann::ordered_json features;
  for (std::size_t i = 0; i < kFeatureCount; ++i) features[std::string(kFeatureNames[i])] = alert.features[i];
  j["features"] = std::move(features);
  return j.dump();
}

std::string alert_to_warning(const Alert& alert) {
  const Conversation& c = alert.conversation;
  std::string out = "WARNING: ransomware traffic detected in window " + std::to_string(alert.window_index) + ": ";
  out += c.protocol == kProtocolTcp ? "tcp " : "udp ";
  out += c.address_a.to_string() + ":" + std::to_string(c.port_a) + " <-> " + c.address_b.to_string() + ":" +
         std::to_string(c.port_b);
  out += " packets=" + std::to_string(c.packets_total) + " bytes=" + std::to_string(c.bytes_total);
  out += " score=" + detail::format_fixed(alert.prediction.score, 4);
  return out;
}

std::optional<PacketRecord> VectorPacketSource::next() {
  while (at_ < packets_.size()) {
    const PacketRecord& p = packets_[at_++];
    if (!is_transport_protocol(p.protocol)) {
      ++skipped_;
      continue;
    }
    return p;
  }
  return std::nullopt;
}

PcapPacketSource::PcapPacketSource(std::istream& in) : reader_(in) {}

std::optional<PacketRecord> PcapPacketSource::next() { return reader_.next(); }

std::size_t PcapPacketSource::skipped() const {
  const CaptureSummary& s = reader_.summary();
  return s.packets_skipped_non_ip + s.packets_skipped_unsupported_protocol + (reader_.truncation() ? 1 : 0);
}

CsvPacketSource::CsvPacketSource(std::istream& in) : in_(in) {
  std::string header;
  if (!detail::read_line(in_, header, 1) || header != kPacketCsvHeader) {
    throw Error(ErrorCode::SchemaMismatch, "expected header '" + std::string(kPacketCsvHeader) + "'", 1);
  }
}

std::optional<PacketRecord> CsvPacketSource::next() {
  std::string line;
  while (detail::read_line(in_, line, ++line_no_)) {
    if (line.empty()) continue;
    try {
      PacketRecord record = parse_packet_csv_row(line, line_no_);
      if (!is_transport_protocol(record.protocol)) {
        ++skipped_;
        continue;
      }
      return record;
    } catch (const Error&) {
      ++skipped_;
    }
  }
  return std::nullopt;
}

namespace {

class WindowClassifier {
public:
  WindowClassifier(const TrainedModel& model, const AlertSink& sink, RunSummary& summary)
      : model_(model), fingerprint_(model_fingerprint(model)), sink_(sink), summary_(summary) {}

  void close(const WindowBatch& batch, double window_end) {
    ++summary_.windows;
    std::vector<Conversation> conversations = aggregate_window(batch);
    summary_.conversations += conversations.size();
    std::sort(conversations.begin(), conversations.end(),
              [](const Conversation& a, const Conversation& b) { return a.key() < b.key(); });
    for (const Conversation& c : conversations) {
      const FeatureVector features = encode(c);
      const Prediction prediction = predict(model_, features);
      if (prediction.label != Label::Ransomware) continue;
      Alert alert{batch.index, c, features, prediction, fingerprint_, window_end};
      try {
        sink_(alert);
      } catch (const std::exception& e) {
        throw DetectionAborted(std::string("alert sink failed: ") + e.what(), summary_);
      }
      ++summary_.alerts;
    }
  }

private:
  const TrainedModel& model_;
  std::uint64_t fingerprint_;
  const AlertSink& sink_;
  RunSummary& summary_;
};

}  // namespace

RunSummary detect_stream(PacketSource& source, const TrainedModel& model, const WindowSpec& spec,
                         const AlertSink& sink) {
  spec.validate();
  RunSummary summary;
  WindowClassifier classifier(model, sink, summary);

  std::optional<double> start = spec.capture_start;
  std::optional<WindowBatch> open;
  auto window_end = [&](std::uint64_t index) { return *start + static_cast<double>(index + 1) * spec.interval; };

  while (auto packet = source.next()) {
    if (!start) start = packet->timestamp;
    if (packet->timestamp < *start) {
      ++summary.late_packets;
      continue;
    }
    const std::uint64_t index = window_index(packet->timestamp, *start, spec.interval);
    if (open && index < open->index) {
      ++summary.late_packets;
      continue;
    }
    if (open && index > open->index) {
      summary.skipped_packets = source.skipped();
      classifier.close(*open, window_end(open->index));
      open.reset();
    }
    if (!open) {
      open.emplace();
      open->index = index;
      open->start = *start + static_cast<double>(index) * spec.interval;
    }
    open->packets.push_back(*packet);
    ++summary.packets;
  }
  summary.skipped_packets = source.skipped();
  if (open) classifier.close(*open, window_end(open->index));
  return summary;
}

TrainedModel load_detection_model(const std::string& path) {
  try {
    return load_model_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::ModelLoadFailure, e.what());
  }
}

}  // namespace ransomnet
