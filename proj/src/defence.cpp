#include "cyber_range/defence.hpp"

#include <algorithm>
#include <vector>

#include "cyber_range/error.hpp"

namespace cyber_range {
namespace {

Knowledge knowledge_from_ak(const BitsAk& ak) {
  Bits52 bits;
  for (std::size_t i = 0; i < kBits52; ++i) bits[i] = ak[i];
  return decode_bits52(bits);
}

std::optional<HostId> first_with_activity(const Knowledge& k, Activity a) {
  for (HostId i = 0; i < kHostCount; ++i) {
    if (k[i].activity == a) return i;
  }
  return std::nullopt;
}

}  // namespace

std::vector<HostId> decoy_priority(const Network& net) {
  std::vector<HostId> out;
  for (HostKind kind : {HostKind::EnterpriseServer, HostKind::OperationalHost, HostKind::OperationalServer}) {
    for (HostId i = 0; i < kHostCount; ++i) {
      if (net.host(i).kind == kind) out.push_back(i);
    }
  }
  return out;
}

std::optional<BlueAction> next_decoy(const Network& net, const std::set<HostId>& protected_hosts) {
  for (HostId id : decoy_priority(net)) {
    if (protected_hosts.contains(id)) continue;
    const auto& services = net.host(id).services;
    for (const auto& decoy : net.decoy_catalogue()) {
      const bool taken =
          std::any_of(services.begin(), services.end(), [&](const auto& s) { return s.port == decoy.port; });
      if (!taken) return BlueAction::decoy(net.host(id).name, decoy.id);
    }
  }
  return std::nullopt;
}

BlueAction greedy_restore_policy(const Network& net, const Knowledge& knowledge,
                                 const std::set<HostId>& protected_hosts) {
  for (HostId i = 0; i < kHostCount; ++i) {
    if (net.is_server(i) && knowledge[i].access == Access::Admin) return BlueAction::restore(net.host(i).name);
  }
  for (HostId i = 0; i < kHostCount; ++i) {
    if (knowledge[i].access == Access::User) return BlueAction::remove(net.host(i).name);
  }
  if (auto decoy = next_decoy(net, protected_hosts)) return *decoy;
  auto active = first_with_activity(knowledge, Activity::Exploited);
  if (!active) active = first_with_activity(knowledge, Activity::Scanned);
  if (active) return BlueAction::analyse(net.host(*active).name);
  return BlueAction::sleep();
}

BlueAction decoy_wall_policy(const Network& net, const Knowledge& knowledge,
                             const std::set<HostId>& protected_hosts) {
  if (auto decoy = next_decoy(net, protected_hosts)) return *decoy;
  return greedy_restore_policy(net, knowledge, protected_hosts);
}

void ScriptedPolicy::record(const BlueAction& issued) {
  if (issued.verb == BlueVerb::Decoy) protected_.insert(net_->index_of(issued.target));
}

BlueAction GreedyRestorePolicy::act(const BlueObservation& obs, int) {
  return greedy_restore_policy(net(), decode_bits52(obs.bits52), protected_hosts());
}

BlueAction DecoyWallPolicy::act(const BlueObservation& obs, int) {
  return decoy_wall_policy(net(), knowledge_from_ak(obs.bits_ak), protected_hosts());
}

std::unique_ptr<DefencePolicy> make_policy(std::string_view name, const Network& net) {
  if (name == "sleep") return std::make_unique<SleepPolicy>();
  if (name == "greedy_restore") return std::make_unique<GreedyRestorePolicy>(net);
  if (name == "decoy_wall") return std::make_unique<DecoyWallPolicy>(net);
  throw ConfigError("unknown defence policy '" + std::string(name) +
                    "' (expected sleep, greedy_restore or decoy_wall)");
}

HierarchicalDefender::HierarchicalDefender(std::shared_ptr<const AdversaryClassifier> controller,
                                           std::unique_ptr<DefencePolicy> meander_specialist,
                                           std::unique_ptr<DefencePolicy> bline_specialist)
    : controller_(std::move(controller)), meander_(std::move(meander_specialist)), bline_(std::move(bline_specialist)) {
  if (!controller_ || !meander_ || !bline_) throw ConfigError("hierarchical defender needs a controller and two specialists");
}

DefencePolicy& HierarchicalDefender::active() {
  if (decided_ == AdversaryKind::Meander) return *meander_;
  return *bline_;
}

BlueAction HierarchicalDefender::act(const BlueObservation& obs, int turn) {
  if (turn >= 1) {
    window_.push_back(obs.bits52);
    if (window_.size() > kWindowLength) window_.pop_front();
  }
  if (turn >= static_cast<int>(kWindowLength) && !decided_) {
    const std::vector<Bits52> window(window_.begin(), window_.end());
    decided_ = controller_->classify(window);
  }
  BlueAction action = active().act(obs, turn);
  meander_->record(action);
  bline_->record(action);
  return action;
}

void HierarchicalDefender::reset() {
  decided_.reset();
  window_.clear();
  meander_->reset();
  bline_->reset();
}

}  // namespace cyber_range
