#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cyber_range/controller.hpp"
#include "cyber_range/network.hpp"
#include "cyber_range/observation.hpp"
#include "cyber_range/sim.hpp"

namespace cyber_range {

enum class ObservationEncoding { Bits52, AK, SR };

/// A blue policy. Scripted specialists implement it here; learned policies
/// can be plugged in behind the same interface.
class DefencePolicy {
 public:
  virtual ~DefencePolicy() = default;

  virtual std::string_view name() const = 0;
  virtual ObservationEncoding encoding() const = 0;
  /// `obs` is the observation produced by the previous turn (reset's at turn 0).
  virtual BlueAction act(const BlueObservation& obs, int turn) = 0;
  /// Every action the defender issued, whichever policy chose it.
  virtual void record(const BlueAction& /*issued*/) {}
  virtual void reset() {}
};

class SleepPolicy final : public DefencePolicy {
 public:
  std::string_view name() const override { return "sleep"; }
  ObservationEncoding encoding() const override { return ObservationEncoding::Bits52; }
  BlueAction act(const BlueObservation&, int) override { return BlueAction::sleep(); }
};

/// Servers in decoy priority order: enterprise, then operational hosts, then
/// the operational server.
std::vector<HostId> decoy_priority(const Network& net);

/// Decoy for the first server in priority order without one, using the first
/// catalogue entry whose port is free on that host.
std::optional<BlueAction> next_decoy(const Network& net, const std::set<HostId>& protected_hosts);

/// Restore a server showing Admin; else Remove a host showing User; else
/// place the next decoy; else Analyse an active host (exploited before
/// scanned); else Sleep. Ties go to canonical host order.
BlueAction greedy_restore_policy(const Network& net, const Knowledge& knowledge,
                                 const std::set<HostId>& protected_hosts);

/// Every decoy along the attack path first, then greedy_restore_policy.
BlueAction decoy_wall_policy(const Network& net, const Knowledge& knowledge,
                             const std::set<HostId>& protected_hosts);

/// Shared bookkeeping for the scripted policies: which servers already carry
/// a decoy this episode.
class ScriptedPolicy : public DefencePolicy {
 public:
  explicit ScriptedPolicy(const Network& net) : net_(&net) {}

  void record(const BlueAction& issued) override;
  void reset() override { protected_.clear(); }
  const std::set<HostId>& protected_hosts() const { return protected_; }

 protected:
  const Network& net() const { return *net_; }

 private:
  const Network* net_;
  std::set<HostId> protected_;
};

/// Meander specialist stand-in. Reads the 52-bit encoding.
class GreedyRestorePolicy final : public ScriptedPolicy {
 public:
  using ScriptedPolicy::ScriptedPolicy;
  std::string_view name() const override { return "greedy_restore"; }
  ObservationEncoding encoding() const override { return ObservationEncoding::Bits52; }
  BlueAction act(const BlueObservation& obs, int turn) override;
};

/// BLine specialist stand-in. Reads the first 52 bits of the AK encoding.
class DecoyWallPolicy final : public ScriptedPolicy {
 public:
  using ScriptedPolicy::ScriptedPolicy;
  std::string_view name() const override { return "decoy_wall"; }
  ObservationEncoding encoding() const override { return ObservationEncoding::AK; }
  BlueAction act(const BlueObservation& obs, int turn) override;
};

/// "sleep", "greedy_restore" or "decoy_wall".
std::unique_ptr<DefencePolicy> make_policy(std::string_view name, const Network& net);

/// Controller plus two specialists. Turns 0-3 use the BLine specialist; at
/// turn 4 the controller classifies the four observations seen so far, once;
/// from then on the matching specialist acts. A benign classification routes
/// to the BLine specialist.
class HierarchicalDefender final : public DefencePolicy {
 public:
  HierarchicalDefender(std::shared_ptr<const AdversaryClassifier> controller,
                       std::unique_ptr<DefencePolicy> meander_specialist,
                       std::unique_ptr<DefencePolicy> bline_specialist);

  std::string_view name() const override { return "hierarchical"; }
  ObservationEncoding encoding() const override { return ObservationEncoding::AK; }
  BlueAction act(const BlueObservation& obs, int turn) override;
  void reset() override;

  std::optional<AdversaryKind> decided() const { return decided_; }
  const std::deque<Bits52>& window() const { return window_; }

 private:
  DefencePolicy& active();

  std::shared_ptr<const AdversaryClassifier> controller_;
  std::unique_ptr<DefencePolicy> meander_;
  std::unique_ptr<DefencePolicy> bline_;
  std::optional<AdversaryKind> decided_;
  std::deque<Bits52> window_;
};

}  // namespace cyber_range
