#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cyber_range/network.hpp"
#include "cyber_range/observation.hpp"
#include "cyber_range/rng.hpp"

namespace cyber_range {

enum class BlueVerb { Sleep, Analyse, Remove, Restore, Decoy };
enum class RedVerb { Sleep, DiscoverRemoteSystems, DiscoverNetworkServices, ExploitRemoteService, PrivilegeEscalate, Impact };

std::string_view to_string(BlueVerb verb);
/// Short form used in traces and graphs: DRS, DNS, ERS, PE, Impact, Sleep.
std::string_view to_string(RedVerb verb);
BlueVerb blue_verb_from_string(std::string_view text);
RedVerb red_verb_from_string(std::string_view text);

struct BlueAction {
  BlueVerb verb = BlueVerb::Sleep;
  std::string target;         // empty for Sleep
  std::string decoy_service;  // Decoy only

  static BlueAction sleep() { return {}; }
  static BlueAction analyse(std::string host) { return {BlueVerb::Analyse, std::move(host), {}}; }
  static BlueAction remove(std::string host) { return {BlueVerb::Remove, std::move(host), {}}; }
  static BlueAction restore(std::string host) { return {BlueVerb::Restore, std::move(host), {}}; }
  static BlueAction decoy(std::string host, std::string service) {
    return {BlueVerb::Decoy, std::move(host), std::move(service)};
  }

  bool operator==(const BlueAction&) const = default;
};

struct RedAction {
  RedVerb verb = RedVerb::Sleep;
  int subnet = 0;             // DiscoverRemoteSystems
  Address address;            // host-targeted verbs
  std::optional<int> port;    // ExploitRemoteService

  static RedAction sleep() { return {}; }
  static RedAction discover_remote_systems(int subnet) { return {RedVerb::DiscoverRemoteSystems, subnet, {}, {}}; }
  static RedAction discover_network_services(Address a) { return {RedVerb::DiscoverNetworkServices, 0, a, {}}; }
  static RedAction exploit(Address a, int port) { return {RedVerb::ExploitRemoteService, 0, a, port}; }
  static RedAction escalate(Address a) { return {RedVerb::PrivilegeEscalate, 0, a, {}}; }
  static RedAction impact(Address a) { return {RedVerb::Impact, 0, a, {}}; }

  bool operator==(const RedAction&) const = default;
};

/// Per action-class success probabilities.
struct SuccessModel {
  double exploit = 1.0;
  double escalate = 0.95;
  double scan = 1.0;
  double impact = 1.0;
  double restore = 0.95;
  double remove = 0.95;
  double analyse = 1.0;
  double decoy = 1.0;

  bool operator==(const SuccessModel&) const = default;
};

/// Ground truth for one host.
struct HostState {
  Activity activity = Activity::None;  // furthest red activity seen this episode
  Access access = Access::None;        // red's access level
  std::vector<DecoySpec> decoys;
  bool impacted = false;

  bool operator==(const HostState&) const = default;
};

using HostStates = std::array<HostState, kHostCount>;

struct SimState {
  const Network* net = nullptr;
  SuccessModel probs;
  AddressBook addresses;
  HostStates hosts{};
  Knowledge knowledge{};  // defender's belief
  int turn = 0;
  bool last_blue_success = true;
  Rng rng;

  std::vector<HostId> red_position() const;

  bool operator==(const SimState& o) const;
};

struct DiscoveredHost {
  Address address;
  std::string hostname;

  bool operator==(const DiscoveredHost&) const = default;
};

struct ServiceView {
  int port = 0;
  std::string id;

  bool operator==(const ServiceView&) const = default;
};

struct Session {
  Address address;
  std::string hostname;
  Access access = Access::None;

  bool operator==(const Session&) const = default;
};

/// What the attacker learns from its last action, plus its live sessions.
/// Decoys are indistinguishable from real services here.
struct RedView {
  std::optional<RedAction> last_action;
  bool success = false;
  std::vector<DiscoveredHost> discovered;  // DiscoverRemoteSystems result
  std::vector<ServiceView> services;       // DiscoverNetworkServices result, by port
  std::vector<Session> sessions;           // canonical host order

  bool holds(Address a) const;
  Access access_on(Address a) const;

  bool operator==(const RedView&) const = default;
};

struct StepOutcome {
  bool blue_success = false;
  bool red_success = false;
  bool decoy_triggered = false;
  bool impact = false;  // successful Impact this turn
  double reward = 0.0;  // blue's reward, always <= 0
  BlueObservation blue_obs;
  RedView red_view;
  std::uint64_t pre_digest = 0;
  std::uint64_t post_digest = 0;
};

/// Fresh episode: foothold holds User access, defender knows nothing.
std::pair<SimState, BlueObservation> reset(const Network& net, std::uint64_t seed, const SuccessModel& probs = {});

/// The attacker's view before its first action.
RedView initial_red_view(const SimState& state);

/// One turn: red resolves first, then blue. Throws ActionError on malformed
/// actions and leaves the state untouched in that case.
StepOutcome step(SimState& state, const BlueAction& blue, const RedAction& red);

/// Blue's reward for the turn, from post-action accesses:
///   -0.1 per user host with Admin, -1 per server with Admin,
///   -10 for a successful Impact, -1 for a successful Restore.
double compute_reward(const SimState& state, const BlueAction& blue, bool blue_success, bool impact_success);

void validate(const SimState& state, const BlueAction& blue);
void validate(const SimState& state, const RedAction& red);

/// FNV-1a over the ground-truth host states and the turn counter.
std::uint64_t digest(const SimState& state);
std::string digest_hex(std::uint64_t d);

}  // namespace cyber_range
