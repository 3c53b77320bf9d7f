#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cyber_range/adversary.hpp"
#include "cyber_range/observation.hpp"
#include "cyber_range/rng.hpp"

namespace cyber_range {

inline constexpr std::size_t kWindowLength = 4;
inline constexpr std::size_t kControllerActions = 3;

/// Concatenation of the last four 52-bit observations, oldest first,
/// left-padded with all-zero observations. 208 bits packed MSB-first.
struct WindowKey {
  std::array<std::uint8_t, kWindowLength * kBits52 / 8> bytes{};

  std::string to_hex() const;
  static WindowKey from_hex(std::string_view hex);

  auto operator<=>(const WindowKey&) const = default;
};

WindowKey window_key(std::span<const Bits52> history);

/// One bandit: sample-average action values over the three adversary labels.
struct BanditEntry {
  std::array<double, kControllerActions> q{};
  std::array<std::uint64_t, kControllerActions> n{};

  bool operator==(const BanditEntry&) const = default;
};

/// Lowest action id among the maxima.
int argmax_lowest(const std::array<double, kControllerActions>& q);

/// One bandit per distinct observation window.
class BanditTable {
 public:
  explicit BanditTable(double epsilon = 0.01) : epsilon_(epsilon) {}

  double epsilon() const { return epsilon_; }
  std::size_t size() const { return entries_.size(); }
  bool known(const WindowKey& key) const { return entries_.contains(key); }
  const BanditEntry* find(const WindowKey& key) const;
  const std::map<WindowKey, BanditEntry>& entries() const { return entries_; }

  /// Adds a zero-initialised bandit for an unseen key.
  BanditEntry& ensure(const WindowKey& key) { return entries_[key]; }

  /// Greedy choice without inserting; unseen keys behave as all-zero Q.
  int greedy_action(const WindowKey& key) const;

  bool operator==(const BanditTable&) const = default;

 private:
  friend void bandit_update(BanditTable&, const WindowKey&, int, double);

  double epsilon_;
  std::map<WindowKey, BanditEntry> entries_;
};

struct Prediction {
  AdversaryKind kind = AdversaryKind::Meander;
  WindowKey key;
  bool explored = false;
};

/// Epsilon-greedy choice; creates the bandit for an unseen key.
Prediction bandit_predict(BanditTable& table, const WindowKey& key, Rng& rng);

/// N(A) += 1, then Q(A) += (R - Q(A)) / N(A). Throws ControllerError for unseen keys.
void bandit_update(BanditTable& table, const WindowKey& key, int action, double reward);

/// Keyed union; shared keys combine per action with count-weighted Q.
BanditTable merge(const BanditTable& a, const BanditTable& b);

/// Produces the first four 52-bit observations of an episode against the given adversary.
using WindowSource = std::function<std::vector<Bits52>(AdversaryKind adversary, std::uint64_t seed)>;

/// Runs four-step episodes against adversaries drawn uniformly from all three
/// kinds, predicting once per episode with reward +1/-1, until at least
/// `timesteps` environment steps have been consumed.
BanditTable bandit_train(const WindowSource& source, long timesteps, double epsilon, std::uint64_t seed);

/// Meander when two or more distinct hosts show scan or exploit activity in
/// the window; otherwise BLine (which also covers the benign user).
AdversaryKind heuristic_predict(std::span<const Bits52> history);

nlohmann::json to_json(const BanditTable& table);
BanditTable bandit_table_from_json(const nlohmann::json& doc);

class AdversaryClassifier {
 public:
  virtual ~AdversaryClassifier() = default;
  virtual std::string_view name() const = 0;
  /// Called once per episode with the first four observations. Must be safe
  /// to call concurrently.
  virtual AdversaryKind classify(std::span<const Bits52> window) const = 0;
};

class HeuristicClassifier final : public AdversaryClassifier {
 public:
  std::string_view name() const override { return "heuristic"; }
  AdversaryKind classify(std::span<const Bits52> window) const override { return heuristic_predict(window); }
};

/// Greedy (epsilon = 0) lookup in a trained table.
class BanditClassifier final : public AdversaryClassifier {
 public:
  explicit BanditClassifier(std::shared_ptr<const BanditTable> table) : table_(std::move(table)) {}
  std::string_view name() const override { return "bandit"; }
  AdversaryKind classify(std::span<const Bits52> window) const override;

 private:
  std::shared_ptr<const BanditTable> table_;
};

class ConstantClassifier final : public AdversaryClassifier {
 public:
  explicit ConstantClassifier(AdversaryKind kind) : kind_(kind) {}
  std::string_view name() const override { return "constant"; }
  AdversaryKind classify(std::span<const Bits52>) const override { return kind_; }

 private:
  AdversaryKind kind_;
};

}  // namespace cyber_range
