#include "ransomnet/capture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "text_util.hpp"

namespace ransomnet {

namespace {

constexpr std::uint32_t kMagicMicro = 0xA1B2C3D4;
constexpr std::uint32_t kMagicNano = 0xA1B23C4D;
constexpr std::uint32_t kLinkTypeEthernet = 1;
constexpr std::size_t kGlobalHeaderSize = 24;
constexpr std::size_t kRecordHeaderSize = 16;
// Upper bound on a single record; anything larger is a corrupt length field.
constexpr std::uint32_t kMaxRecordLength = 16u * 1024u * 1024u;

constexpr std::uint16_t kEtherTypeIpv4 = 0x0800;
constexpr std::uint16_t kEtherTypeVlan = 0x8100;

std::uint16_t be16(const unsigned char* p) { return static_cast<std::uint16_t>((p[0] << 8) | p[1]); }

std::uint32_t be32(const unsigned char* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

std::uint32_t le32(const unsigned char* p) {
  return (std::uint32_t{p[3]} << 24) | (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[1]} << 8) | p[0];
}

// Reads up to n bytes; returns how many arrived.
std::size_t read_some(std::istream& in, unsigned char* dst, std::size_t n) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount());
}

}  // namespace

FrameVerdict decode_ethernet_frame(std::span<const unsigned char> frame, PacketRecord& out) {
  const unsigned char* p = frame.data();
  const std::size_t size = frame.size();
  if (size < 14) return FrameVerdict::NonIp;

  std::size_t offset = 14;
  std::uint16_t ether_type = be16(p + 12);
  if (ether_type == kEtherTypeVlan) {
    if (size < 18) return FrameVerdict::NonIp;
    ether_type = be16(p + 16);
    offset = 18;
  }
  if (ether_type != kEtherTypeIpv4) return FrameVerdict::NonIp;
  if (size < offset + 20) return FrameVerdict::UnsupportedProtocol;

  const unsigned char* ip = p + offset;
  if ((ip[0] >> 4) != 4) return FrameVerdict::NonIp;
  const std::size_t header_len = static_cast<std::size_t>(ip[0] & 0x0F) * 4;
  if (header_len < 20 || size < offset + header_len) return FrameVerdict::UnsupportedProtocol;

  const std::uint8_t protocol = ip[9];
  if (!is_transport_protocol(protocol)) return FrameVerdict::UnsupportedProtocol;
  // Non-first fragments carry no transport header.
  if ((be16(ip + 6) & 0x1FFF) != 0) return FrameVerdict::UnsupportedProtocol;

  const std::size_t transport = offset + header_len;
  if (size < transport + 4) return FrameVerdict::UnsupportedProtocol;

  out.protocol = protocol;
  out.src_addr = Ipv4Address(be32(ip + 12));
  out.dst_addr = Ipv4Address(be32(ip + 16));
  out.src_port = be16(p + transport);
  out.dst_port = be16(p + transport + 2);
  return FrameVerdict::Packet;
}

PcapReader::PcapReader(std::istream& in) : in_(in) {
  unsigned char header[kGlobalHeaderSize];
  const std::size_t got = read_some(in_, header, kGlobalHeaderSize);
  if (got >= 4) {
    const std::uint32_t magic = le32(header);
    if (magic == kMagicMicro || magic == kMagicNano) {
      swapped_ = false;
    } else if (__builtin_bswap32(magic) == kMagicMicro || __builtin_bswap32(magic) == kMagicNano) {
      swapped_ = true;
    } else {
      throw Error(ErrorCode::BadMagic, "not a classic pcap file");
    }
    const std::uint32_t native = swapped_ ? __builtin_bswap32(magic) : magic;
    resolution_ = native == kMagicNano ? TimestampResolution::Nanosecond : TimestampResolution::Microsecond;
  }
  if (got < kGlobalHeaderSize) {
    if (got < 4) throw Error(ErrorCode::BadMagic, "file shorter than a pcap magic number");
    throw Error(ErrorCode::TruncatedHeader, "pcap global header is incomplete");
  }
  const std::uint32_t link_type = read_u32(header + 20);
  if (link_type != kLinkTypeEthernet) {
    throw Error(ErrorCode::UnsupportedLinkType, "link type " + std::to_string(link_type) + " is not Ethernet");
  }
}

std::uint32_t PcapReader::read_u32(const unsigned char* p) const { return swapped_ ? be32(p) : le32(p); }

std::optional<PacketRecord> PcapReader::next() {
  while (!done_) {
    unsigned char header[kRecordHeaderSize];
    const std::size_t got = read_some(in_, header, kRecordHeaderSize);
    if (got == 0) {
      done_ = true;
      break;
    }
    if (got < kRecordHeaderSize) {
      truncation_ = ErrorCode::TruncatedHeader;
      done_ = true;
      break;
    }
    const std::uint32_t ts_sec = read_u32(header);
    const std::uint32_t ts_frac = read_u32(header + 4);
    const std::uint32_t incl_len = read_u32(header + 8);
    const std::uint32_t orig_len = read_u32(header + 12);
    if (incl_len > kMaxRecordLength) {
      truncation_ = ErrorCode::TruncatedRecord;
      done_ = true;
      break;
    }
    frame_.resize(incl_len);
    if (read_some(in_, frame_.data(), incl_len) < incl_len) {
      truncation_ = ErrorCode::TruncatedRecord;
      done_ = true;
      break;
    }

    const double divisor = resolution_ == TimestampResolution::Nanosecond ? 1e9 : 1e6;
    const double timestamp = static_cast<double>(ts_sec) + static_cast<double>(ts_frac) / divisor;

    PacketRecord record;
    record.timestamp = timestamp;
    record.wire_bytes = orig_len > 0 ? orig_len : incl_len;
    const FrameVerdict verdict = record.wire_bytes == 0 ? FrameVerdict::NonIp
                                                        : decode_ethernet_frame(frame_, record);
    switch (verdict) {
      case FrameVerdict::NonIp:
        ++summary_.packets_skipped_non_ip;
        continue;
      case FrameVerdict::UnsupportedProtocol:
        ++summary_.packets_skipped_unsupported_protocol;
        continue;
      case FrameVerdict::Packet:
        break;
    }
    if (summary_.packets_read == 0) {
      summary_.capture_start = timestamp;
      summary_.capture_end = timestamp;
    } else {
      summary_.capture_start = std::min(summary_.capture_start, timestamp);
      summary_.capture_end = std::max(summary_.capture_end, timestamp);
    }
    ++summary_.packets_read;
    return record;
  }
  return std::nullopt;
}

PcapParseResult parse_pcap(std::istream& in) {
  PcapReader reader(in);
  PcapParseResult result;
  while (auto packet = reader.next()) result.packets.push_back(*packet);
  result.summary = reader.summary();
  result.truncation = reader.truncation();
  return result;
}

PcapParseResult parse_pcap(std::span<const std::byte> raw) {
  std::istringstream in(std::string(reinterpret_cast<const char*>(raw.data()), raw.size()));
  return parse_pcap(in);
}

PcapParseResult read_pcap_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return parse_pcap(in);
}

namespace {

void put_le32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_le16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void put_be16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v & 0xFF));
}

void put_be32(std::string& out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

}  // namespace

std::string write_pcap(std::span<const PacketRecord> packets, TimestampResolution resolution) {
  const bool nano = resolution == TimestampResolution::Nanosecond;
  const double scale = nano ? 1e9 : 1e6;
  std::string out;
  put_le32(out, nano ? kMagicNano : kMagicMicro);
  put_le16(out, 2);
  put_le16(out, 4);
  put_le32(out, 0);
  put_le32(out, 0);
  put_le32(out, 65535);
  put_le32(out, kLinkTypeEthernet);

  for (const PacketRecord& packet : packets) {
    const bool tcp = packet.protocol == kProtocolTcp;
    const std::uint32_t transport_len = tcp ? 20 : 8;
    const std::uint32_t frame_len = 14 + 20 + transport_len;

    double whole = std::floor(packet.timestamp);
    double frac = std::round((packet.timestamp - whole) * scale);
    if (frac >= scale) {
      whole += 1.0;
      frac -= scale;
    }
    put_le32(out, static_cast<std::uint32_t>(whole));
    put_le32(out, static_cast<std::uint32_t>(frac));
    put_le32(out, frame_len);
    put_le32(out, packet.wire_bytes);

    // Ethernet: locally administered MACs, IPv4 ethertype.
    out.append("\x02\x00\x00\x00\x00\x02\x02\x00\x00\x00\x00\x01", 12);
    put_be16(out, kEtherTypeIpv4);
    // IPv4 header without options; checksum left zero.
    out.push_back(static_cast<char>(0x45));
    out.push_back(0);
    put_be16(out, static_cast<std::uint16_t>(std::clamp<std::uint32_t>(packet.wire_bytes > 14 ? packet.wire_bytes - 14 : 20, 20, 65535)));
    put_be16(out, 0);
    put_be16(out, 0x4000);  // don't fragment
    out.push_back(64);
    out.push_back(static_cast<char>(packet.protocol));
    put_be16(out, 0);
    put_be32(out, packet.src_addr.value());
    put_be32(out, packet.dst_addr.value());
    put_be16(out, packet.src_port);
    put_be16(out, packet.dst_port);
    if (tcp) {
      put_be32(out, 0);          // seq
      put_be32(out, 0);          // ack
      put_be16(out, 0x5010);     // data offset 5, ACK
      put_be16(out, 65535);      // window
      put_be32(out, 0);          // checksum + urgent
    } else {
      put_be16(out, static_cast<std::uint16_t>(std::clamp<std::uint32_t>(packet.wire_bytes > 34 ? packet.wire_bytes - 34 : 8, 8, 65535)));
      put_be16(out, 0);
    }
  }
  return out;
}

PacketRecord parse_packet_csv_row(std::string_view line, std::size_t line_no) {
  const auto fields = detail::split_commas(line);
  if (fields.size() != 7) throw Error(ErrorCode::RowError, "expected 7 fields", line_no);

  auto address = [&](std::string_view text, const char* what) {
    if (text.find(':') != std::string_view::npos) {
      throw Error(ErrorCode::Ipv6Unsupported, std::string(what) + " is an IPv6 address", line_no);
    }
    auto parsed = Ipv4Address::parse(text);
    if (!parsed) throw Error(ErrorCode::RowError, std::string("bad ") + what, line_no);
    return *parsed;
  };
  auto port = [&](std::string_view text, const char* what) {
    auto parsed = detail::parse_unsigned<std::uint16_t>(text);
    if (!parsed) throw Error(ErrorCode::RowError, std::string(what) + " is not a port in 0-65535", line_no);
    return *parsed;
  };

  PacketRecord record;
  auto timestamp = detail::parse_real(fields[0]);
  if (!timestamp || *timestamp < 0.0) throw Error(ErrorCode::RowError, "bad timestamp", line_no);
  record.timestamp = *timestamp;
  record.src_addr = address(fields[1], "src_addr");
  record.src_port = port(fields[2], "src_port");
  record.dst_addr = address(fields[3], "dst_addr");
  record.dst_port = port(fields[4], "dst_port");
  auto protocol = detail::parse_unsigned<std::uint8_t>(fields[5]);
  if (!protocol) throw Error(ErrorCode::RowError, "protocol is not in 0-255", line_no);
  record.protocol = *protocol;
  auto wire = detail::parse_unsigned<std::uint32_t>(fields[6]);
  if (!wire || *wire == 0) throw Error(ErrorCode::RowError, "wire_bytes must be a positive integer", line_no);
  record.wire_bytes = *wire;
  return record;
}

std::vector<PacketRecord> parse_packet_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!detail::read_line(in, line, line_no) || line != kPacketCsvHeader) {
    throw Error(ErrorCode::SchemaMismatch, "expected header '" + std::string(kPacketCsvHeader) + "'", 1);
  }
  std::vector<PacketRecord> packets;
  while (detail::read_line(in, line, ++line_no)) {
    if (line.empty()) continue;
    packets.push_back(parse_packet_csv_row(line, line_no));
  }
  return packets;
}

std::vector<PacketRecord> parse_packet_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_packet_csv(in);
}

std::string packets_to_csv(std::span<const PacketRecord> packets) {
  std::string out(kPacketCsvHeader);
  out += '\n';
  for (const PacketRecord& p : packets) {
    out += detail::format_exact(p.timestamp);
    out += ',';
    out += p.src_addr.to_string();
    out += ',';
    out += std::to_string(p.src_port);
    out += ',';
    out += p.dst_addr.to_string();
    out += ',';
    out += std::to_string(p.dst_port);
    out += ',';
    out += std::to_string(p.protocol);
    out += ',';
    out += std::to_string(p.wire_bytes);
    out += '\n';
  }
  return out;
}

}  // namespace ransomnet
