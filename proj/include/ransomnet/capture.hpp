#pragma once

// Packet ingestion: classic libpcap files and the packet-record CSV format.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ransomnet/error.hpp"
#include "ransomnet/ipv4.hpp"

namespace ransomnet {

inline constexpr std::uint8_t kProtocolTcp = 6;
inline constexpr std::uint8_t kProtocolUdp = 17;

constexpr bool is_transport_protocol(std::uint8_t protocol) {
  return protocol == kProtocolTcp || protocol == kProtocolUdp;
}

struct PacketRecord {
  double timestamp = 0.0;  // seconds
  Ipv4Address src_addr;
  std::uint16_t src_port = 0;
  Ipv4Address dst_addr;
  std::uint16_t dst_port = 0;
  std::uint8_t protocol = 0;
  std::uint32_t wire_bytes = 0;

  Endpoint source() const { return {src_addr, src_port}; }
  Endpoint destination() const { return {dst_addr, dst_port}; }

  bool operator==(const PacketRecord&) const = default;
};

struct CaptureSummary {
  std::size_t packets_read = 0;
  std::size_t packets_skipped_non_ip = 0;
  std::size_t packets_skipped_unsupported_protocol = 0;
  double capture_start = 0.0;
  double capture_end = 0.0;

  std::size_t records_seen() const {
    return packets_read + packets_skipped_non_ip + packets_skipped_unsupported_protocol;
  }
};

enum class TimestampResolution { Microsecond, Nanosecond };

// Outcome of a full-file parse. A file that ends mid-record still yields
// every packet decoded before the cut, with `truncation` set.
struct PcapParseResult {
  std::vector<PacketRecord> packets;
  CaptureSummary summary;
  std::optional<ErrorCode> truncation;  // TruncatedHeader or TruncatedRecord
};

// Incremental reader over a classic pcap stream. The global header is
// validated in the constructor (BadMagic, TruncatedHeader,
// UnsupportedLinkType are thrown from there).
class PcapReader {
public:
  explicit PcapReader(std::istream& in);

  // Next IPv4 TCP/UDP packet, or nullopt at end of stream or truncation.
  std::optional<PacketRecord> next();

  const CaptureSummary& summary() const { return summary_; }
  std::optional<ErrorCode> truncation() const { return truncation_; }
  TimestampResolution resolution() const { return resolution_; }
  bool swapped() const { return swapped_; }

private:
  std::uint32_t read_u32(const unsigned char* p) const;

  std::istream& in_;
  bool swapped_ = false;
  TimestampResolution resolution_ = TimestampResolution::Microsecond;
  CaptureSummary summary_;
  std::optional<ErrorCode> truncation_;
  std::vector<unsigned char> frame_;
  bool done_ = false;
};

PcapParseResult parse_pcap(std::span<const std::byte> raw);
PcapParseResult parse_pcap(std::istream& in);
PcapParseResult read_pcap_file(const std::string& path);

// Frame-level decode used by PcapReader; exposed for tests.
enum class FrameVerdict { Packet, NonIp, UnsupportedProtocol };
FrameVerdict decode_ethernet_frame(std::span<const unsigned char> frame, PacketRecord& out);

// Writes an Ethernet/IPv4 capture (microsecond or nanosecond magic, little
// endian). Each record carries a minimal synthetic header stack padded to
// wire_bytes; the on-disk orig_len is wire_bytes.
std::string write_pcap(std::span<const PacketRecord> packets,
                       TimestampResolution resolution = TimestampResolution::Microsecond);

inline constexpr std::string_view kPacketCsvHeader =
    "timestamp,src_addr,src_port,dst_addr,dst_port,protocol,wire_bytes";

// One data row; `line_no` is reported in RowError / Ipv6Unsupported.
PacketRecord parse_packet_csv_row(std::string_view line, std::size_t line_no);
std::vector<PacketRecord> parse_packet_csv(std::istream& in);
std::vector<PacketRecord> parse_packet_csv(std::string_view text);
std::string packets_to_csv(std::span<const PacketRecord> packets);

}  // namespace ransomnet
