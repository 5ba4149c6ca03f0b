#pragma once

// Bidirectional conversation reconstruction and the conversation CSV format.

#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ransomnet/capture.hpp"

namespace ransomnet {

// Direction-free 5-tuple: low <= high under (address, port) ordering.
struct ConversationKey {
  Endpoint low;
  Endpoint high;
  std::uint8_t protocol = 0;

  static ConversationKey of(const Endpoint& a, const Endpoint& b, std::uint8_t protocol);

  auto operator<=>(const ConversationKey&) const = default;
};

struct ConversationKeyHash {
  std::size_t operator()(const ConversationKey& key) const noexcept;
};

struct Conversation {
  Ipv4Address address_a;
  std::uint16_t port_a = 0;
  Ipv4Address address_b;
  std::uint16_t port_b = 0;
  std::uint8_t protocol = 0;
  double rel_start = 0.0;
  double duration = 0.0;
  std::uint64_t packets_ab = 0;
  std::uint64_t bytes_ab = 0;
  std::uint64_t packets_ba = 0;
  std::uint64_t bytes_ba = 0;
  std::uint64_t packets_total = 0;
  std::uint64_t bytes_total = 0;

  ConversationKey key() const { return ConversationKey::of({address_a, port_a}, {address_b, port_b}, protocol); }

  bool operator==(const Conversation&) const = default;
};

// Groups packets by ConversationKey. Endpoint A is the sender of the key's
// earliest packet (stable on equal timestamps). Output is ordered by
// rel_start, then canonical key. Throws ClockSkew if a timestamp precedes
// capture_start and UnsupportedProtocol for anything but TCP/UDP.
std::vector<Conversation> aggregate(std::span<const PacketRecord> packets, double capture_start);

// Same, with capture_start = earliest timestamp.
std::vector<Conversation> aggregate(std::span<const PacketRecord> packets);

inline constexpr std::string_view kConversationCsvHeader =
    "protocol,address_a,port_a,address_b,port_b,packets,bytes,packets_ab,bytes_ab,packets_ba,bytes_ba,"
    "rel_start,duration";

enum class Validation { Strict, Lenient };

struct ConversationCsvResult {
  std::vector<Conversation> conversations;
  // Lenient mode: one entry per row whose totals were recomputed.
  std::vector<std::string> warnings;
};

std::string conversations_to_csv(std::span<const Conversation> conversations);
void append_conversation_fields(std::string& out, const Conversation& conversation);

ConversationCsvResult csv_to_conversations(std::istream& in, Validation mode = Validation::Strict);
ConversationCsvResult csv_to_conversations(std::string_view text, Validation mode = Validation::Strict);

// Parses the 13 conversation columns of one row; `line` is used in errors.
// Shared with the dataset reader, which appends a label column.
Conversation parse_conversation_fields(std::span<const std::string_view> fields, std::size_t line,
                                       Validation mode, std::vector<std::string>& warnings);

}  // namespace ransomnet
