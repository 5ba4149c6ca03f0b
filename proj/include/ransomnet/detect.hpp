#pragma once

// Windowed detection loop: replay packets, cut them into fixed intervals,
// classify every conversation of each closed window and raise alerts.

#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ransomnet/classifiers.hpp"

namespace ransomnet {

inline constexpr double kDefaultWindowSeconds = 60.0;

struct WindowSpec {
  double interval = kDefaultWindowSeconds;
  // Window n covers [capture_start + n*interval, capture_start + (n+1)*interval).
  // Unset: the first packet's timestamp (streaming) or the earliest one (batch).
  std::optional<double> capture_start;

  void validate() const;  // InvalidHyperparams unless interval is finite and > 0
};

struct WindowBatch {
  std::uint64_t index = 0;
  double start = 0.0;
  std::vector<PacketRecord> packets;  // input order
};

std::uint64_t window_index(double timestamp, double capture_start, double interval);

// Empty windows are omitted; batches are in ascending window order.
std::vector<WindowBatch> window_packets(std::span<const PacketRecord> packets, const WindowSpec& spec);

// Conversations of one window, rel_start measured from the window start.
std::vector<Conversation> aggregate_window(const WindowBatch& batch);

struct Alert {
  std::uint64_t window_index = 0;
  Conversation conversation;
  FeatureVector features{};  // encoded, before scaling
  Prediction prediction;
  std::uint64_t model_fingerprint = 0;
  double emitted_at = 0.0;  // capture time at which the window closed

  bool operator==(const Alert&) const = default;
};

std::string alert_to_json(const Alert& alert);     // one line, no newline
std::string alert_to_warning(const Alert& alert);  // human-readable, one line

class PacketSource {
public:
  virtual ~PacketSource() = default;
  // Next usable packet; nullopt at end of input.
  virtual std::optional<PacketRecord> next() = 0;
  // Inputs dropped as malformed or unsupported so far.
  virtual std::size_t skipped() const = 0;
};

class VectorPacketSource : public PacketSource {
public:
  explicit VectorPacketSource(std::vector<PacketRecord> packets) : packets_(std::move(packets)) {}
  std::optional<PacketRecord> next() override;
  std::size_t skipped() const override { return skipped_; }

private:
  std::vector<PacketRecord> packets_;
  std::size_t at_ = 0;
  std::size_t skipped_ = 0;
};

// Streams a classic pcap; non-IPv4, non-TCP/UDP and a truncated tail count
// as skipped.
class PcapPacketSource : public PacketSource {
public:
  explicit PcapPacketSource(std::istream& in);
  std::optional<PacketRecord> next() override;
  std::size_t skipped() const override;

private:
  PcapReader reader_;
};

// Streams packet CSV; malformed rows and non-TCP/UDP rows are skipped.
// A wrong header is still fatal (SchemaMismatch).
class CsvPacketSource : public PacketSource {
public:
  explicit CsvPacketSource(std::istream& in);
  std::optional<PacketRecord> next() override;
  std::size_t skipped() const override { return skipped_; }

private:
  std::istream& in_;
  std::size_t line_no_ = 1;
  std::size_t skipped_ = 0;
};

using AlertSink = std::function<void(const Alert&)>;

struct RunSummary {
  std::uint64_t windows = 0;
  std::uint64_t conversations = 0;
  std::uint64_t alerts = 0;
  std::uint64_t packets = 0;
  std::uint64_t skipped_packets = 0;
  // Packets older than an already closed window (input not time ordered).
  std::uint64_t late_packets = 0;
};

// Thrown when the sink fails; carries the counts reached before the abort.
class DetectionAborted : public Error {
public:
  DetectionAborted(const std::string& message, RunSummary summary)
      : Error(ErrorCode::SinkFailure, message), summary_(summary) {}
  const RunSummary& summary() const { return summary_; }

private:
  RunSummary summary_;
};

// Alerts are emitted per closed window in (window index, conversation key)
// order, at most one per key and window.
RunSummary detect_stream(PacketSource& source, const TrainedModel& model, const WindowSpec& spec,
                         const AlertSink& sink);

// Loads a model for detection; any load problem becomes ModelLoadFailure.
TrainedModel load_detection_model(const std::string& path);

}  // namespace ransomnet
