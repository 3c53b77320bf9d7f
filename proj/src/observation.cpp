#include "cyber_range/observation.hpp"

#include "cyber_range/error.hpp"

namespace cyber_range {
namespace {

// (first bit, second bit) for a three-level field.
constexpr std::pair<bool, bool> field_bits(std::uint8_t level) {
  switch (level) {
    case 1:
      return {false, true};
    case 2:
      return {true, true};
    default:
      return {false, false};
  }
}

std::uint8_t field_level(bool first, bool second) {
  if (!first && !second) return 0;
  if (!first && second) return 1;
  if (first && second) return 2;
  throw Error("observation field uses the unassigned code 10");
}

constexpr double field_float(std::uint8_t level) { return 0.5 * level; }

}  // namespace

std::string_view to_string(Activity a) {
  switch (a) {
    case Activity::None:
      return "None";
    case Activity::Scanned:
      return "Scanned";
    case Activity::Exploited:
      return "Exploited";
  }
  return "?";
}

std::string_view to_string(Access a) {
  switch (a) {
    case Access::None:
      return "None";
    case Access::User:
      return "User";
    case Access::Admin:
      return "Admin";
  }
  return "?";
}

Bits52 encode_bits52(const Knowledge& knowledge) {
  Bits52 bits;
  for (std::size_t i = 0; i < kHostCount; ++i) {
    const auto [a0, a1] = field_bits(static_cast<std::uint8_t>(knowledge[i].activity));
    const auto [c0, c1] = field_bits(static_cast<std::uint8_t>(knowledge[i].access));
    const std::size_t base = i * kBitsPerHost;
    bits[base] = a0;
    bits[base + 1] = a1;
    bits[base + 2] = c0;
    bits[base + 3] = c1;
  }
  return bits;
}

BitsAk encode_ak(const Bits52& bits52, bool last_success) {
  BitsAk out;
  for (std::size_t i = 0; i < kBits52; ++i) out[i] = bits52[i];
  out[kBits52] = last_success;
  return out;
}

SrVector encode_sr(const Knowledge& knowledge, bool last_success) {
  SrVector out{};
  for (std::size_t i = 0; i < kHostCount; ++i) {
    out[2 * i] = field_float(static_cast<std::uint8_t>(knowledge[i].activity));
    out[2 * i + 1] = field_float(static_cast<std::uint8_t>(knowledge[i].access));
  }
  out[kSrLength - 1] = last_success ? 1.0 : 0.0;
  return out;
}

Knowledge decode_bits52(const Bits52& bits) {
  Knowledge out{};
  for (std::size_t i = 0; i < kHostCount; ++i) {
    const std::size_t base = i * kBitsPerHost;
    out[i].activity = static_cast<Activity>(field_level(bits[base], bits[base + 1]));
    out[i].access = static_cast<Access>(field_level(bits[base + 2], bits[base + 3]));
  }
  return out;
}

std::string to_hex(const Bits52& bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(kHostCount);
  for (std::size_t i = 0; i < kBits52; i += 4) {
    const unsigned nibble = (bits[i] << 3) | (bits[i + 1] << 2) | (bits[i + 2] << 1) | bits[i + 3];
    out.push_back(kDigits[nibble]);
  }
  return out;
}

Bits52 bits52_from_hex(std::string_view hex) {
  if (hex.size() != kBits52 / 4) throw Error("bits52 hex must have 13 digits");
  Bits52 bits;
  for (std::size_t d = 0; d < hex.size(); ++d) {
    const char c = hex[d];
    unsigned v = 0;
    if (c >= '0' && c <= '9') {
      v = static_cast<unsigned>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      v = static_cast<unsigned>(c - 'a' + 10);
    } else {
      throw Error("bits52 hex has invalid digit");
    }
    for (unsigned b = 0; b < 4; ++b) bits[d * 4 + b] = (v >> (3 - b)) & 1u;
  }
  return bits;
}

BlueObservation BlueObservation::encode(const Knowledge& knowledge, bool last_success) {
  BlueObservation obs;
  obs.bits52 = encode_bits52(knowledge);
  obs.bits_ak = encode_ak(obs.bits52, last_success);
  obs.floats_sr = encode_sr(knowledge, last_success);
  return obs;
}

}  // namespace cyber_range
