#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace ransomnet {

// 64-bit FNV-1a. Used for dataset fingerprints and model identities, not
// for security.
class Fnv1a {
public:
  void update(std::span<const std::byte> bytes);
  void update(std::string_view text);
  void update_u64(std::uint64_t value);
  void update_double(double value);

  std::uint64_t digest() const { return state_; }

private:
  std::uint64_t state_ = 0xcbf29ce484222325ull;
};

std::string to_hex(std::uint64_t value);

}  // namespace ransomnet
