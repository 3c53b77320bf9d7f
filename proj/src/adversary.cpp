#include "cyber_range/adversary.hpp"

#include <algorithm>
#include <cmath>

#include "cyber_range/error.hpp"

namespace cyber_range {
namespace {

// Services the attacker goes after first. Decoys of the top entries pull
// exploit attempts away from the real services.
constexpr std::array<std::string_view, 8> kExploitPreference{"ftp",   "http", "smb",   "modbus",
                                                             "mysql", "rdp",  "https", "ssh"};

const std::string& op_server_name(const Network& net) { return net.host(net.op_server()).name; }

}  // namespace

std::string_view to_string(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::Meander:
      return "meander";
    case AdversaryKind::BLine:
      return "bline";
    case AdversaryKind::UserBenign:
      return "benign";
  }
  return "?";
}

AdversaryKind adversary_from_string(std::string_view text) {
  for (auto kind : kAllAdversaries) {
    if (to_string(kind) == text) return kind;
  }
  throw ConfigError("unknown adversary '" + std::string(text) + "' (expected bline, meander or benign)");
}

AdversaryKind adversary_from_action(int action) {
  if (action < 0 || action > 2) throw ControllerError("controller action out of range: " + std::to_string(action));
  return static_cast<AdversaryKind>(action);
}

void validate_mix(const AdversaryMix& mix) {
  if (mix.empty()) throw ConfigError("adversary mix is empty");
  double total = 0.0;
  for (const auto& [kind, p] : mix) {
    if (!std::isfinite(p) || p < 0.0) {
      throw ConfigError("adversary mix: probability for " + std::string(to_string(kind)) + " must be in [0, 1]");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("adversary mix must sum to 1, got " + std::to_string(total));
  }
}

AdversaryKind sample_adversary(Rng& rng, const AdversaryMix& mix) {
  validate_mix(mix);
  const double u = rng.uniform();
  double cumulative = 0.0;
  AdversaryKind last = mix.begin()->first;
  for (const auto& [kind, p] : mix) {
    if (p <= 0.0) continue;
    cumulative += p;
    last = kind;
    if (u < cumulative) return kind;
  }
  return last;
}

int exploit_preference(std::string_view service_id) {
  auto it = std::find(kExploitPreference.begin(), kExploitPreference.end(), service_id);
  return static_cast<int>(it - kExploitPreference.begin());
}

std::optional<int> HostIntel::next_port() const {
  if (working_port && !failed_ports.contains(*working_port)) return working_port;
  const ServiceView* best = nullptr;
  for (const auto& svc : services) {
    if (failed_ports.contains(svc.port)) continue;
    if (!best || exploit_preference(svc.id) < exploit_preference(best->id)) best = &svc;
  }
  if (!best) return std::nullopt;
  return best->port;
}

void RedIntel::absorb(const RedView& view) {
  if (view.last_action) {
    const RedAction& a = *view.last_action;
    switch (a.verb) {
      case RedVerb::DiscoverRemoteSystems:
        if (view.success) {
          discovered_subnets.insert(a.subnet);
          for (const auto& d : view.discovered) hosts[d.address].hostname = d.hostname;
        }
        break;
      case RedVerb::DiscoverNetworkServices:
        if (view.success) {
          auto& h = hosts[a.address];
          h.scanned = true;
          h.services = view.services;
          h.failed_ports.clear();
        }
        break;
      case RedVerb::ExploitRemoteService: {
        auto& h = hosts[a.address];
        if (view.success) {
          h.working_port = *a.port;
          h.failed_ports.erase(*a.port);
        } else {
          h.failed_ports.insert(*a.port);
          if (h.working_port == a.port) h.working_port.reset();
        }
        break;
      }
      default:
        break;
    }
  }
  for (const auto& s : view.sessions) hosts[s.address].hostname = s.hostname;
}

std::optional<Address> RedIntel::address_of(std::string_view hostname) const {
  for (const auto& [addr, info] : hosts) {
    if (info.hostname == hostname) return addr;
  }
  return std::nullopt;
}

RedAction bline_next(BLineState& st, const RedView& view, const Network& net) {
  using Phase = BLineState::Phase;
  st.intel.absorb(view);

  auto access_of = [&](const std::string& name) {
    auto addr = st.intel.address_of(name);
    return addr ? view.access_on(*addr) : Access::None;
  };

  if (auto server = st.intel.address_of(op_server_name(net)); server && view.access_on(*server) == Access::Admin) {
    st.phase = Phase::Impact;
    st.hop = st.path.size() - 1;
    return RedAction::impact(*server);
  }

  st.fallback_stack.clear();
  while (st.fallback_stack.size() < st.path.size() && access_of(st.path[st.fallback_stack.size()]) == Access::Admin) {
    st.fallback_stack.push_back(st.fallback_stack.size());
  }
  st.hop = st.fallback_stack.size();
  const std::string& target = st.path[st.hop];

  auto addr = st.intel.address_of(target);
  if (!addr) {
    st.phase = Phase::Discover;
    return RedAction::discover_remote_systems(net.host(net.index_of(target)).subnet);
  }
  if (view.access_on(*addr) == Access::User) {
    st.phase = Phase::Escalate;
    return RedAction::escalate(*addr);
  }
  HostIntel& info = st.intel.hosts[*addr];
  if (info.scanned) {
    if (auto port = info.next_port()) {
      st.phase = Phase::Exploit;
      return RedAction::exploit(*addr, *port);
    }
    // Every service failed: rescan.
    info.scanned = false;
    info.failed_ports.clear();
  }
  st.phase = Phase::Scan;
  return RedAction::discover_network_services(*addr);
}

BLineAgent::BLineAgent(const Network& net, Rng& rng) : net_(&net) {
  std::vector<HostId> users;
  for (HostId id : net.hosts_in_subnet(1)) {
    if (id != net.foothold()) users.push_back(id);
  }
  std::vector<HostId> enterprise;
  std::vector<HostId> operational;
  for (HostId id = 0; id < kHostCount; ++id) {
    if (net.host(id).kind == HostKind::EnterpriseServer) enterprise.push_back(id);
    if (net.host(id).kind == HostKind::OperationalHost) operational.push_back(id);
  }
  state_.path[0] = net.host(users.front()).name;
  state_.path[1] = net.host(enterprise[rng.below(enterprise.size())]).name;
  state_.path[2] = net.host(operational[rng.below(operational.size())]).name;
  state_.path[3] = op_server_name(net);
}

RedAction meander_next(MeanderState& st, const RedView& view, const Network& net, Rng& rng) {
  st.intel.absorb(view);

  if (view.last_action) {
    const RedAction& a = *view.last_action;
    if (a.verb == RedVerb::DiscoverRemoteSystems && view.success) {
      std::vector<Address> fresh;
      for (const auto& d : view.discovered) {
        if (std::find(st.order.begin(), st.order.end(), d.address) == st.order.end()) fresh.push_back(d.address);
      }
      rng.shuffle(fresh);
      st.order.insert(st.order.end(), fresh.begin(), fresh.end());
    }
    if (a.verb == RedVerb::DiscoverNetworkServices && !view.success) st.blocked.insert(a.address);
  }

  std::set<Address> now;
  for (const auto& s : view.sessions) now.insert(s.address);
  for (const auto& a : now) {
    if (!st.held.contains(a)) {
      st.blocked.clear();
      break;
    }
  }
  for (const auto& a : st.held) {
    if (!now.contains(a)) st.intel.hosts[a].failed_ports.clear();
  }
  st.held = now;

  if (auto server = st.intel.address_of(op_server_name(net)); server && view.access_on(*server) == Access::Admin) {
    return RedAction::impact(*server);
  }
  if (!st.intel.discovered_subnets.contains(st.frontier_subnet)) {
    return RedAction::discover_remote_systems(st.frontier_subnet);
  }

  auto in_scope = [&](Address a) {
    return net.host(net.index_of(st.intel.hosts[a].hostname)).subnet <= st.frontier_subnet;
  };
  for (Address a : st.order) {
    if (in_scope(a) && !now.contains(a) && !st.blocked.contains(a) && !st.intel.hosts[a].scanned) {
      return RedAction::discover_network_services(a);
    }
  }
  for (Address a : st.order) {
    if (!in_scope(a) || now.contains(a) || st.blocked.contains(a)) continue;
    HostIntel& info = st.intel.hosts[a];
    if (auto port = info.next_port()) return RedAction::exploit(a, *port);
    info.scanned = false;
    info.failed_ports.clear();
    return RedAction::discover_network_services(a);
  }
  for (Address a : st.order) {
    if (in_scope(a) && view.access_on(a) == Access::User) return RedAction::escalate(a);
  }
  if (st.frontier_subnet < kSubnetCount) {
    ++st.frontier_subnet;
    return RedAction::discover_remote_systems(st.frontier_subnet);
  }
  st.blocked.clear();
  return RedAction::sleep();
}

std::unique_ptr<Adversary> make_adversary(AdversaryKind kind, const Network& net, std::uint64_t seed) {
  Rng rng(seed);
  switch (kind) {
    case AdversaryKind::BLine:
      return std::make_unique<BLineAgent>(net, rng);
    case AdversaryKind::Meander:
      return std::make_unique<MeanderAgent>(net, rng);
    case AdversaryKind::UserBenign:
      return std::make_unique<BenignAgent>();
  }
  throw ConfigError("unknown adversary kind");
}

}  // namespace cyber_range
