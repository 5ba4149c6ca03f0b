#include "ransomnet/conversation.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "text_util.hpp"

namespace ransomnet {

ConversationKey ConversationKey::of(const Endpoint& a, const Endpoint& b, std::uint8_t protocol) {
  return a <= b ? ConversationKey{a, b, protocol} : ConversationKey{b, a, protocol};
}

std::size_t ConversationKeyHash::operator()(const ConversationKey& key) const noexcept {
  std::uint64_t h = (std::uint64_t{key.low.address.value()} << 32) | key.high.address.value();
  h ^= (std::uint64_t{key.low.port} << 24) ^ (std::uint64_t{key.high.port} << 8) ^ key.protocol;
  h *= 0x9E3779B97F4A7C15ull;
  return static_cast<std::size_t>(h ^ (h >> 29));
}

namespace {

struct Accumulator {
  Conversation conversation;
  double first = 0.0;
  double last = 0.0;
};

}  // namespace

std::vector<Conversation> aggregate(std::span<const PacketRecord> packets, double capture_start) {
  for (std::size_t i = 0; i < packets.size(); ++i) {
    if (!is_transport_protocol(packets[i].protocol)) {
      throw Error(ErrorCode::UnsupportedProtocol, "only TCP and UDP packets can be aggregated", i);
    }
    if (packets[i].timestamp < capture_start) {
      throw Error(ErrorCode::ClockSkew, "packet timestamp precedes capture start", i);
    }
  }

  std::vector<std::size_t> order(packets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return packets[a].timestamp < packets[b].timestamp; });

  std::unordered_map<ConversationKey, std::size_t, ConversationKeyHash> index;
  std::vector<Accumulator> flows;
  for (std::size_t i : order) {
    const PacketRecord& p = packets[i];
    const auto key = ConversationKey::of(p.source(), p.destination(), p.protocol);
    auto [it, inserted] = index.try_emplace(key, flows.size());
    if (inserted) {
      Accumulator acc;
      acc.conversation.address_a = p.src_addr;
      acc.conversation.port_a = p.src_port;
      acc.conversation.address_b = p.dst_addr;
      acc.conversation.port_b = p.dst_port;
      acc.conversation.protocol = p.protocol;
      acc.first = p.timestamp;
      flows.push_back(acc);
    }
    Accumulator& acc = flows[it->second];
    Conversation& c = acc.conversation;
    acc.last = p.timestamp;
    if (p.src_addr == c.address_a && p.src_port == c.port_a) {
      ++c.packets_ab;
      c.bytes_ab += p.wire_bytes;
    } else {
      ++c.packets_ba;
      c.bytes_ba += p.wire_bytes;
    }
  }

  std::vector<Conversation> out;
  out.reserve(flows.size());
  for (Accumulator& acc : flows) {
    Conversation& c = acc.conversation;
    c.packets_total = c.packets_ab + c.packets_ba;
    c.bytes_total = c.bytes_ab + c.bytes_ba;
    c.rel_start = acc.first - capture_start;
    c.duration = acc.last - acc.first;
    out.push_back(c);
  }
  std::stable_sort(out.begin(), out.end(), [](const Conversation& a, const Conversation& b) {
    if (a.rel_start != b.rel_start) return a.rel_start < b.rel_start;
    return a.key() < b.key();
  });
  return out;
}

std::vector<Conversation> aggregate(std::span<const PacketRecord> packets) {
  if (packets.empty()) return {};
  const auto earliest = std::min_element(packets.begin(), packets.end(), [](const auto& a, const auto& b) {
    return a.timestamp < b.timestamp;
  });
  return aggregate(packets, earliest->timestamp);
}

void append_conversation_fields(std::string& out, const Conversation& c) {
  out += std::to_string(c.protocol);
  out += ',';
  out += c.address_a.to_string();
  out += ',';
  out += std::to_string(c.port_a);
  out += ',';
  out += c.address_b.to_string();
  out += ',';
  out += std::to_string(c.port_b);
  for (std::uint64_t v : {c.packets_total, c.bytes_total, c.packets_ab, c.bytes_ab, c.packets_ba, c.bytes_ba}) {
    out += ',';
    out += std::to_string(v);
  }
  out += ',';
  out += detail::format_fixed(c.rel_start, 6);
  out += ',';
  out += detail::format_fixed(c.duration, 6);
}

std::string conversations_to_csv(std::span<const Conversation> conversations) {
  std::string out(kConversationCsvHeader);
  out += '\n';
  for (const Conversation& c : conversations) {
    append_conversation_fields(out, c);
    out += '\n';
  }
  return out;
}

Conversation parse_conversation_fields(std::span<const std::string_view> fields, std::size_t line,
                                       Validation mode, std::vector<std::string>& warnings) {
  if (fields.size() < 13) throw Error(ErrorCode::RowError, "expected 13 conversation fields", line);

  auto row_error = [&](const std::string& what) { return Error(ErrorCode::RowError, what, line); };
  auto address = [&](std::string_view text, const char* what) {
    if (text.find(':') != std::string_view::npos) {
      throw Error(ErrorCode::Ipv6Unsupported, std::string(what) + " is an IPv6 address", line);
    }
    auto parsed = Ipv4Address::parse(text);
    if (!parsed) throw row_error(std::string("bad ") + what);
    return *parsed;
  };
  auto port = [&](std::string_view text, const char* what) {
    auto parsed = detail::parse_unsigned<std::uint16_t>(text);
    if (!parsed) throw row_error(std::string(what) + " is not a port in 0-65535");
    return *parsed;
  };
  auto count = [&](std::string_view text, const char* what) {
    auto parsed = detail::parse_unsigned<std::uint64_t>(text);
    if (!parsed) throw row_error(std::string(what) + " is not a non-negative integer");
    return *parsed;
  };
  auto seconds = [&](std::string_view text, const char* what) {
    auto parsed = detail::parse_real(text);
    if (!parsed || *parsed < 0.0) throw row_error(std::string(what) + " is not a non-negative number");
    return *parsed;
  };

  Conversation c;
  auto protocol = detail::parse_unsigned<std::uint8_t>(fields[0]);
  if (!protocol) throw row_error("bad protocol");
  if (!is_transport_protocol(*protocol)) {
    throw Error(ErrorCode::UnsupportedProtocol, "protocol must be 6 or 17", line);
  }
  c.protocol = *protocol;
  c.address_a = address(fields[1], "address_a");
  c.port_a = port(fields[2], "port_a");
  c.address_b = address(fields[3], "address_b");
  c.port_b = port(fields[4], "port_b");
  c.packets_total = count(fields[5], "packets");
  c.bytes_total = count(fields[6], "bytes");
  c.packets_ab = count(fields[7], "packets_ab");
  c.bytes_ab = count(fields[8], "bytes_ab");
  c.packets_ba = count(fields[9], "packets_ba");
  c.bytes_ba = count(fields[10], "bytes_ba");
  c.rel_start = seconds(fields[11], "rel_start");
  c.duration = seconds(fields[12], "duration");

  const bool consistent =
      c.packets_total == c.packets_ab + c.packets_ba && c.bytes_total == c.bytes_ab + c.bytes_ba;
  if (!consistent) {
    const std::string detail = "totals (" + std::to_string(c.packets_total) + " packets, " +
                               std::to_string(c.bytes_total) + " bytes) differ from directional sums (" +
                               std::to_string(c.packets_ab + c.packets_ba) + ", " +
                               std::to_string(c.bytes_ab + c.bytes_ba) + ")";
    if (mode == Validation::Strict) throw Error(ErrorCode::InvariantViolation, detail, line);
    warnings.push_back("line " + std::to_string(line) + ": " + detail + "; totals recomputed");
    c.packets_total = c.packets_ab + c.packets_ba;
    c.bytes_total = c.bytes_ab + c.bytes_ba;
  }
  if (c.packets_total == 0) throw Error(ErrorCode::InvariantViolation, "conversation has no packets", line);
  return c;
}

ConversationCsvResult csv_to_conversations(std::istream& in, Validation mode) {
  std::string line;
  std::size_t line_no = 1;
  if (!detail::read_line(in, line, line_no) || line != kConversationCsvHeader) {
    throw Error(ErrorCode::SchemaMismatch, "expected header '" + std::string(kConversationCsvHeader) + "'", 1);
  }
  ConversationCsvResult result;
  while (detail::read_line(in, line, ++line_no)) {
    if (line.empty()) continue;
    const auto fields = detail::split_commas(line);
    if (fields.size() != 13) throw Error(ErrorCode::RowError, "expected 13 fields", line_no);
    result.conversations.push_back(parse_conversation_fields(fields, line_no, mode, result.warnings));
  }
  return result;
}

ConversationCsvResult csv_to_conversations(std::string_view text, Validation mode) {
  std::istringstream in{std::string(text)};
  return csv_to_conversations(in, mode);
}

}  // namespace ransomnet
