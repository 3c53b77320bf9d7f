#include "cyber_range/sim.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

#include "cyber_range/error.hpp"

namespace cyber_range {
namespace {

constexpr std::array<std::pair<RedVerb, std::string_view>, 6> kRedNames{{
    {RedVerb::Sleep, "Sleep"},
    {RedVerb::DiscoverRemoteSystems, "DRS"},
    {RedVerb::DiscoverNetworkServices, "DNS"},
    {RedVerb::ExploitRemoteService, "ERS"},
    {RedVerb::PrivilegeEscalate, "PE"},
    {RedVerb::Impact, "Impact"},
}};

constexpr std::array<std::pair<BlueVerb, std::string_view>, 5> kBlueNames{{
    {BlueVerb::Sleep, "Sleep"},
    {BlueVerb::Analyse, "Analyse"},
    {BlueVerb::Remove, "Remove"},
    {BlueVerb::Restore, "Restore"},
    {BlueVerb::Decoy, "Decoy"},
}};

bool has_session(const HostState& h) { return h.access != Access::None; }

std::optional<HostId> source_for_host(const SimState& s, HostId target) {
  for (HostId i = 0; i < kHostCount; ++i) {
    if (has_session(s.hosts[i]) && s.net->reachable(i, target)) return i;
  }
  return std::nullopt;
}

bool can_reach_subnet(const SimState& s, int subnet) {
  for (HostId i = 0; i < kHostCount; ++i) {
    if (has_session(s.hosts[i]) && s.net->firewall_permits(s.net->host(i).subnet, subnet)) return true;
  }
  return false;
}

bool port_in_use(const HostSpec& spec, const HostState& st, int port) {
  const bool real = std::any_of(spec.services.begin(), spec.services.end(), [&](const auto& s) { return s.port == port; });
  const bool decoy = std::any_of(st.decoys.begin(), st.decoys.end(), [&](const auto& d) { return d.port == port; });
  return real || decoy;
}

void raise_activity(Activity& a, Activity to) {
  if (static_cast<int>(to) > static_cast<int>(a)) a = to;
}

HostId blue_target(const SimState& s, const BlueAction& blue) {
  auto id = s.net->find(blue.target);
  if (!id) throw ActionError("blue action targets unknown host '" + blue.target + "'");
  return *id;
}

struct RedResult {
  bool success = false;
  bool decoy_triggered = false;
  bool impact = false;
};

RedResult resolve_red(SimState& s, const RedAction& red, double u, RedView& view) {
  RedResult r;
  const Network& net = *s.net;
  switch (red.verb) {
    case RedVerb::Sleep:
      r.success = true;
      break;
    case RedVerb::DiscoverRemoteSystems: {
      r.success = can_reach_subnet(s, red.subnet) && u < s.probs.scan;
      if (r.success) {
        for (HostId id : net.hosts_in_subnet(red.subnet)) {
          if (net.host(id).kind == HostKind::DefenderMachine) continue;
          view.discovered.push_back({s.addresses.address_of(id), net.host(id).name});
        }
      }
      break;
    }
    case RedVerb::DiscoverNetworkServices: {
      const HostId target = s.addresses.resolve_id(red.address);
      r.success = source_for_host(s, target).has_value() && u < s.probs.scan;
      if (r.success) {
        auto& host = s.hosts[target];
        for (const auto& svc : net.host(target).services) view.services.push_back({svc.port, svc.id});
        for (const auto& d : host.decoys) view.services.push_back({d.port, d.id});
        std::sort(view.services.begin(), view.services.end(),
                  [](const auto& a, const auto& b) { return a.port < b.port; });
        raise_activity(host.activity, Activity::Scanned);
        s.knowledge[target].activity = Activity::Scanned;
      }
      break;
    }
    case RedVerb::ExploitRemoteService: {
      const HostId target = s.addresses.resolve_id(red.address);
      if (!source_for_host(s, target)) break;
      auto& host = s.hosts[target];
      const int port = *red.port;
      raise_activity(host.activity, Activity::Exploited);
      s.knowledge[target].activity = Activity::Exploited;
      if (std::any_of(host.decoys.begin(), host.decoys.end(), [&](const auto& d) { return d.port == port; })) {
        r.decoy_triggered = true;
        break;
      }
      const auto& services = net.host(target).services;
      auto svc = std::find_if(services.begin(), services.end(), [&](const auto& x) { return x.port == port; });
      if (svc != services.end() && svc->exploitable && u < s.probs.exploit) {
        r.success = true;
        if (host.access == Access::None) host.access = Access::User;
      }
      break;
    }
    case RedVerb::PrivilegeEscalate: {
      const HostId target = s.addresses.resolve_id(red.address);
      auto& host = s.hosts[target];
      if (has_session(host) && u < s.probs.escalate) {
        r.success = true;
        host.access = Access::Admin;
      }
      break;
    }
    case RedVerb::Impact: {
      const HostId target = s.addresses.resolve_id(red.address);
      auto& host = s.hosts[target];
      if (host.access == Access::Admin && u < s.probs.impact) {
        r.success = true;
        r.impact = true;
        host.impacted = true;
      }
      break;
    }
  }
  return r;
}

bool resolve_blue(SimState& s, const BlueAction& blue, double u) {
  if (blue.verb == BlueVerb::Sleep) return true;
  const HostId target = blue_target(s, blue);
  auto& host = s.hosts[target];
  auto& belief = s.knowledge[target];
  const bool foothold = target == s.net->foothold();
  switch (blue.verb) {
    case BlueVerb::Sleep:
      return true;
    case BlueVerb::Analyse:
      if (u < s.probs.analyse) {
        belief.access = host.access;
        return true;
      }
      return false;
    case BlueVerb::Remove: {
      bool ok = false;
      if (!foothold && host.access != Access::Admin && u < s.probs.remove) {
        host.access = Access::None;
        ok = true;
      }
      belief.access = host.access;
      return ok;
    }
    case BlueVerb::Restore:
      if (foothold || u >= s.probs.restore) return false;
      host.access = Access::None;
      host.activity = Activity::None;
      host.impacted = false;
      belief.access = Access::None;
      return true;
    case BlueVerb::Decoy: {
      const DecoySpec* spec = s.net->find_decoy(blue.decoy_service);
      if (port_in_use(s.net->host(target), host, spec->port) || u >= s.probs.decoy) return false;
      host.decoys.push_back(*spec);
      return true;
    }
  }
  return false;
}

}  // namespace

std::string_view to_string(BlueVerb verb) {
  for (const auto& [v, name] : kBlueNames) {
    if (v == verb) return name;
  }
  return "?";
}

std::string_view to_string(RedVerb verb) {
  for (const auto& [v, name] : kRedNames) {
    if (v == verb) return name;
  }
  return "?";
}

BlueVerb blue_verb_from_string(std::string_view text) {
  for (const auto& [v, name] : kBlueNames) {
    if (name == text) return v;
  }
  throw ActionError("unknown blue verb '" + std::string(text) + "'");
}

RedVerb red_verb_from_string(std::string_view text) {
  for (const auto& [v, name] : kRedNames) {
    if (name == text) return v;
  }
  throw ActionError("unknown red verb '" + std::string(text) + "'");
}

std::vector<HostId> SimState::red_position() const {
  std::vector<HostId> out;
  for (HostId i = 0; i < kHostCount; ++i) {
    if (has_session(hosts[i])) out.push_back(i);
  }
  return out;
}

bool SimState::operator==(const SimState& o) const {
  return *net == *o.net && probs == o.probs && addresses == o.addresses && hosts == o.hosts &&
         knowledge == o.knowledge && turn == o.turn && last_blue_success == o.last_blue_success && rng == o.rng;
}

bool RedView::holds(Address a) const { return access_on(a) != Access::None; }

Access RedView::access_on(Address a) const {
  for (const auto& s : sessions) {
    if (s.address == a) return s.access;
  }
  return Access::None;
}

std::pair<SimState, BlueObservation> reset(const Network& net, std::uint64_t seed, const SuccessModel& probs) {
  SimState s;
  s.net = &net;
  s.probs = probs;
  Rng address_rng(derive_seed(seed, stream::kAddresses));
  s.addresses = AddressBook::generate(net, address_rng);
  s.rng = Rng(derive_seed(seed, stream::kSim));
  s.hosts[net.foothold()].access = Access::User;
  s.last_blue_success = true;
  BlueObservation obs = BlueObservation::encode(s.knowledge, s.last_blue_success);
  return {std::move(s), obs};
}

RedView initial_red_view(const SimState& state) {
  RedView view;
  for (HostId id : state.red_position()) {
    view.sessions.push_back({state.addresses.address_of(id), state.net->host(id).name, state.hosts[id].access});
  }
  return view;
}

void validate(const SimState& state, const BlueAction& blue) {
  if (blue.verb == BlueVerb::Sleep) {
    if (!blue.target.empty()) throw ActionError("blue Sleep takes no target");
    return;
  }
  blue_target(state, blue);
  if (blue.verb == BlueVerb::Decoy) {
    if (!state.net->find_decoy(blue.decoy_service)) {
      throw ActionError("unknown decoy service '" + blue.decoy_service + "'");
    }
  } else if (!blue.decoy_service.empty()) {
    throw ActionError("decoy_service is only valid for Decoy");
  }
}

void validate(const SimState& state, const RedAction& red) {
  if (red.port && red.verb != RedVerb::ExploitRemoteService) throw ActionError("only ERS takes a port");
  switch (red.verb) {
    case RedVerb::Sleep:
      return;
    case RedVerb::DiscoverRemoteSystems:
      if (red.subnet < 1 || red.subnet > kSubnetCount) throw ActionError("DRS targets unknown subnet");
      return;
    default:
      break;
  }
  HostId target = 0;
  try {
    target = state.addresses.resolve_id(red.address);
  } catch (const ResolutionError& e) {
    throw ActionError(std::string("red action: ") + e.what());
  }
  if (state.net->host(target).kind == HostKind::DefenderMachine) {
    throw ActionError("the defender machine cannot be targeted by red");
  }
  if (red.verb == RedVerb::ExploitRemoteService && !red.port) throw ActionError("ERS requires a port");
  if (red.verb == RedVerb::Impact && target != state.net->op_server()) {
    throw ActionError("Impact only targets the operational server");
  }
}

StepOutcome step(SimState& state, const BlueAction& blue, const RedAction& red) {
  validate(state, blue);
  validate(state, red);

  StepOutcome out;
  out.pre_digest = digest(state);
  for (auto& k : state.knowledge) k.activity = Activity::None;

  // Two draws per turn regardless of verbs keeps the stream aligned.
  const double u_red = state.rng.uniform();
  const double u_blue = state.rng.uniform();

  RedResult r = resolve_red(state, red, u_red, out.red_view);
  out.red_success = r.success;
  out.decoy_triggered = r.decoy_triggered;
  out.impact = r.impact;
  out.blue_success = resolve_blue(state, blue, u_blue);

  out.reward = compute_reward(state, blue, out.blue_success, out.impact);
  state.last_blue_success = out.blue_success;
  state.turn += 1;

  out.red_view.last_action = red;
  out.red_view.success = r.success;
  for (HostId id : state.red_position()) {
    out.red_view.sessions.push_back(
        {state.addresses.address_of(id), state.net->host(id).name, state.hosts[id].access});
  }
  out.blue_obs = BlueObservation::encode(state.knowledge, state.last_blue_success);
  out.post_digest = digest(state);
  return out;
}

double compute_reward(const SimState& state, const BlueAction& blue, bool blue_success, bool impact_success) {
  // Counted in tenths and divided once, so the result is the correctly
  // rounded value of the rule sum whatever the host order.
  long tenths = 0;
  for (HostId i = 0; i < kHostCount; ++i) {
    if (state.hosts[i].access != Access::Admin) continue;
    tenths += state.net->is_server(i) ? 10 : 1;
  }
  if (impact_success) tenths += 100;
  if (blue.verb == BlueVerb::Restore && blue_success) tenths += 10;
  return tenths == 0 ? 0.0 : -static_cast<double>(tenths) / 10.0;
}

std::uint64_t digest(const SimState& state) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(state.turn));
  for (const auto& host : state.hosts) {
    mix(static_cast<std::uint64_t>(host.activity));
    mix(static_cast<std::uint64_t>(host.access));
    mix(host.impacted ? 1 : 0);
    mix(host.decoys.size());
    for (const auto& d : host.decoys) mix(static_cast<std::uint64_t>(d.port));
  }
  return h;
}

std::string digest_hex(std::uint64_t d) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(d));
  return buf;
}

}  // namespace cyber_range
