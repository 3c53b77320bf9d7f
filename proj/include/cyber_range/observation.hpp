#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <string>
#include <string_view>

#include "cyber_range/network.hpp"

namespace cyber_range {

enum class Activity : std::uint8_t { None = 0, Scanned = 1, Exploited = 2 };
enum class Access : std::uint8_t { None = 0, User = 1, Admin = 2 };

std::string_view to_string(Activity a);
std::string_view to_string(Access a);

/// What the defender believes about one host.
struct HostKnowledge {
  Activity activity = Activity::None;
  Access access = Access::None;

  bool operator==(const HostKnowledge&) const = default;
};

using Knowledge = std::array<HostKnowledge, kHostCount>;

inline constexpr std::size_t kBitsPerHost = 4;
inline constexpr std::size_t kBits52 = kHostCount * kBitsPerHost;
inline constexpr std::size_t kBitsAk = kBits52 + 1;
inline constexpr std::size_t kSrLength = kHostCount * 2 + 1;

using Bits52 = std::bitset<kBits52>;
using BitsAk = std::bitset<kBitsAk>;
using SrVector = std::array<double, kSrLength>;

// Per host, bits [4i, 4i+1] hold activity and [4i+2, 4i+3] hold access:
//   None 00, Scanned/User 01, Exploited/Admin 11.
Bits52 encode_bits52(const Knowledge& knowledge);
BitsAk encode_ak(const Bits52& bits52, bool last_success);
// Per host (activity, access) floats in {0, 0.5, 1}; last element is the success flag.
SrVector encode_sr(const Knowledge& knowledge, bool last_success);

/// Inverse of encode_bits52. Throws Error on the unused code 10.
Knowledge decode_bits52(const Bits52& bits);

/// 13 hex digits; digit i is host i's nibble, most significant bit first.
std::string to_hex(const Bits52& bits);
Bits52 bits52_from_hex(std::string_view hex);

/// The defender's view of one step in all three encodings.
struct BlueObservation {
  Bits52 bits52;
  BitsAk bits_ak;
  SrVector floats_sr{};

  static BlueObservation encode(const Knowledge& knowledge, bool last_success);

  bool last_success() const { return bits_ak.test(kBits52); }
  /// Per-host knowledge recovered from the 52-bit encoding.
  Knowledge knowledge() const { return decode_bits52(bits52); }

  bool operator==(const BlueObservation&) const = default;
};

}  // namespace cyber_range
