#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ransomnet {

// IPv4 address held as its host-order 32-bit value (192.168.1.4 == 0xC0A80104).
class Ipv4Address {
public:
  constexpr Ipv4Address() = default;
  constexpr explicit Ipv4Address(std::uint32_t value) : value_(value) {}
  constexpr Ipv4Address(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d)
      : value_((std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) | (std::uint32_t{c} << 8) | d) {}

  constexpr std::uint32_t value() const { return value_; }

  // Dotted quad only; rejects leading '+', empty octets, octets > 255.
  static std::optional<Ipv4Address> parse(std::string_view text);
  std::string to_string() const;

  constexpr auto operator<=>(const Ipv4Address&) const = default;

private:
  std::uint32_t value_ = 0;
};

struct Endpoint {
  Ipv4Address address;
  std::uint16_t port = 0;

  constexpr auto operator<=>(const Endpoint&) const = default;
};

}  // namespace ransomnet
