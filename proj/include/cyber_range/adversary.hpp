#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cyber_range/network.hpp"
#include "cyber_range/rng.hpp"
#include "cyber_range/sim.hpp"

namespace cyber_range {

/// Values double as the controller's action ids.
enum class AdversaryKind : int { Meander = 0, BLine = 1, UserBenign = 2 };

inline constexpr std::array<AdversaryKind, 3> kAllAdversaries{AdversaryKind::Meander, AdversaryKind::BLine,
                                                              AdversaryKind::UserBenign};

std::string_view to_string(AdversaryKind kind);  // "meander", "bline", "benign"
AdversaryKind adversary_from_string(std::string_view text);
AdversaryKind adversary_from_action(int action);
inline int action_id(AdversaryKind kind) { return static_cast<int>(kind); }

/// Probability per adversary kind; must sum to 1.
using AdversaryMix = std::map<AdversaryKind, double>;

void validate_mix(const AdversaryMix& mix);
AdversaryKind sample_adversary(Rng& rng, const AdversaryMix& mix);

/// Rank of a service id in the attacker's exploit preference (0 = tried first).
int exploit_preference(std::string_view service_id);

/// What an attacker has learned about one address.
struct HostIntel {
  std::string hostname;
  bool scanned = false;
  std::vector<ServiceView> services;
  std::set<int> failed_ports;
  std::optional<int> working_port;

  /// Next port to try: the last port that worked, then untried ports by preference.
  std::optional<int> next_port() const;
};

struct RedIntel {
  std::map<Address, HostIntel> hosts;
  std::set<int> discovered_subnets;

  /// Fold the outcome of the last action into the intel.
  void absorb(const RedView& view);
  std::optional<Address> address_of(std::string_view hostname) const;
};

class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual AdversaryKind kind() const = 0;
  virtual RedAction next(const RedView& view) = 0;
};

struct BLineState {
  enum class Phase { Discover, Scan, Exploit, Escalate, Impact };

  std::array<std::string, 4> path;  // user host, enterprise server, operational host, operational server
  RedIntel intel;
  Phase phase = Phase::Discover;
  std::size_t hop = 0;
  // Hops currently held at Admin, in path order. Losing one rewinds to it.
  std::vector<std::size_t> fallback_stack;
};

/// Depth-first kill chain towards the operational server:
/// DRS -> DNS -> ERS -> PE per hop, then Impact every turn.
/// Exploit failure rotates to the next service; exhausting services rescans;
/// losing a session re-exploits the first hop no longer held at Admin.
RedAction bline_next(BLineState& st, const RedView& view, const Network& net);

class BLineAgent final : public Adversary {
 public:
  /// The entry user host is fixed (first non-foothold user host); the enterprise
  /// and operational hops are drawn from `rng`.
  BLineAgent(const Network& net, Rng& rng);

  AdversaryKind kind() const override { return AdversaryKind::BLine; }
  RedAction next(const RedView& view) override { return bline_next(state_, view, *net_); }
  const BLineState& state() const { return state_; }

 private:
  const Network* net_;
  BLineState state_;
};

struct MeanderState {
  RedIntel intel;
  int frontier_subnet = 1;
  std::vector<Address> order;  // discovery order, shuffled per subnet
  std::set<Address> blocked;   // scans that failed since the last new session
  std::set<Address> held;      // sessions as of the previous view
};

/// Breadth-first: discover a subnet, scan every host in it, exploit every
/// scanned host, escalate every held host, then move to the next subnet.
RedAction meander_next(MeanderState& st, const RedView& view, const Network& net, Rng& rng);

class MeanderAgent final : public Adversary {
 public:
  MeanderAgent(const Network& net, Rng rng) : net_(&net), rng_(rng) {}

  AdversaryKind kind() const override { return AdversaryKind::Meander; }
  RedAction next(const RedView& view) override { return meander_next(state_, view, *net_, rng_); }
  const MeanderState& state() const { return state_; }

 private:
  const Network* net_;
  Rng rng_;
  MeanderState state_;
};

inline RedAction benign_next() { return RedAction::sleep(); }

class BenignAgent final : public Adversary {
 public:
  AdversaryKind kind() const override { return AdversaryKind::UserBenign; }
  RedAction next(const RedView&) override { return benign_next(); }
};

std::unique_ptr<Adversary> make_adversary(AdversaryKind kind, const Network& net, std::uint64_t seed);

}  // namespace cyber_range
