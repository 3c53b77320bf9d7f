#pragma once

// Independent reference implementations and generators for the test suites.
// Nothing here calls the library's own encoders or reward code.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cyber_range/observation.hpp"
#include "cyber_range/rng.hpp"
#include "cyber_range/sim.hpp"

namespace oracle {

using cyber_range::Access;
using cyber_range::Activity;

// Canonical host order by index:
//   0-4 User0..User4, 5-7 Enterprise0..2, 8 Defender, 9-11 OpHost0..2, 12 OpServer.
inline constexpr std::array<const char*, 13> kHostNames{"User0",       "User1",       "User2",   "User3",   "User4",
                                                        "Enterprise0", "Enterprise1", "Enterprise2", "Defender",
                                                        "OpHost0",     "OpHost1",     "OpHost2", "OpServer"};

inline bool is_server(std::size_t host) { return (host >= 5 && host <= 7) || (host >= 9 && host <= 12); }

/// Rule sum, counted in tenths of a point: 1 per non-server host with Admin,
/// 10 per server with Admin, 100 for a successful Impact, 10 for a successful
/// Restore.
inline long reward_tenths(const std::array<Access, 13>& access, bool impact, bool restore_ok) {
  long tenths = 0;
  for (std::size_t h = 0; h < access.size(); ++h) {
    if (access[h] == Access::Admin) tenths += is_server(h) ? 10 : 1;
  }
  if (impact) tenths += 100;
  if (restore_ok) tenths += 10;
  return tenths;
}

inline double reward(const std::array<Access, 13>& access, bool impact, bool restore_ok) {
  const long t = reward_tenths(access, impact, restore_ok);
  return t == 0 ? 0.0 : -static_cast<double>(t) / 10.0;
}

/// Codes from the encoding table: None "00", Scanned/User "01", Exploited/Admin "11".
inline const char* code(int level) {
  static const char* kCodes[] = {"00", "01", "11"};
  return kCodes[level];
}

/// The 52-bit observation as a '0'/'1' string, bit 0 first.
inline std::string bits52_string(const cyber_range::Knowledge& k) {
  std::string out;
  for (const auto& h : k) {
    out += code(static_cast<int>(h.activity));
    out += code(static_cast<int>(h.access));
  }
  return out;
}

inline double level_float(int level) {
  static const double kFloats[] = {0.0, 0.5, 1.0};
  return kFloats[level];
}

/// Two-sided count interval for a Binomial(n, p): n*p +- z*sqrt(n*p*(1-p)).
inline std::pair<double, double> binomial_bounds(std::size_t n, double p, double z = 5.0) {
  const double mean = static_cast<double>(n) * p;
  const double sd = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
  return {mean - z * sd, mean + z * sd};
}

/// Plain arithmetic mean.
inline double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace oracle

namespace gen {

inline cyber_range::Knowledge knowledge(cyber_range::Rng& rng) {
  cyber_range::Knowledge k{};
  for (auto& h : k) {
    h.activity = static_cast<cyber_range::Activity>(rng.below(3));
    h.access = static_cast<cyber_range::Access>(rng.below(3));
  }
  return k;
}

inline std::array<cyber_range::Access, 13> accesses(cyber_range::Rng& rng) {
  std::array<cyber_range::Access, 13> a{};
  for (auto& x : a) x = static_cast<cyber_range::Access>(rng.below(3));
  return a;
}

inline cyber_range::Bits52 bits52(cyber_range::Rng& rng) {
  return cyber_range::encode_bits52(knowledge(rng));
}

}  // namespace gen
