#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "cyber_range/adversary.hpp"
#include "cyber_range/controller.hpp"
#include "cyber_range/defence.hpp"
#include "cyber_range/explain.hpp"
#include "cyber_range/network.hpp"
#include "cyber_range/sim.hpp"

namespace cyber_range {

/// A single policy by name, or a hierarchical defender when `controller` is set.
struct DefenderSpec {
  std::string policy = "hierarchical";  // sleep | greedy_restore | decoy_wall | hierarchical
  std::string controller = "heuristic";  // heuristic | bandit
  std::string meander_specialist = "greedy_restore";
  std::string bline_specialist = "decoy_wall";
  std::optional<std::filesystem::path> bandit_table;  // trained inline when absent

  bool operator==(const DefenderSpec&) const = default;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t episodes = 1;
  int episode_length = 100;
  AdversaryMix adversary{{AdversaryKind::BLine, 1.0}};
  DefenderSpec defender;
  SuccessModel probs;
  std::optional<std::filesystem::path> topology;
  int workers = 0;  // 0: OpenMP default
  bool traces = true;
  long bandit_timesteps = 15000;
  double bandit_epsilon = 0.01;

  bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError naming the offending field.
void validate(const RunConfig& cfg);

/// `env_seed` is used only when the document has no "seed". Relative paths
/// are resolved against `base_dir`.
RunConfig run_config_from_json(const nlohmann::json& doc, std::optional<std::uint64_t> env_seed = std::nullopt,
                               const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const RunConfig& cfg);
/// Reads a config file, falling back to CYBER_RANGE_SEED for the seed.
RunConfig load_run_config(const std::filesystem::path& path);
std::optional<std::uint64_t> seed_from_env();

/// The topology named by cfg.topology, or the default one.
Network load_network(const RunConfig& cfg);

struct RewardSummary {
  std::size_t episodes = 0;
  double mean = 0.0;
  double std = 0.0;  // population
  double min = 0.0;
  double max = 0.0;

  bool operator==(const RewardSummary&) const = default;
};

struct BatchStats {
  RewardSummary overall;
  std::map<AdversaryKind, RewardSummary> per_adversary;

  bool operator==(const BatchStats&) const = default;
};

/// Exact mean, population std, min and max. Throws Error for an empty list.
RewardSummary stats(std::span<const double> rewards);

struct EpisodeResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  AdversaryKind adversary = AdversaryKind::BLine;
  double total_reward = 0.0;
  std::optional<AdversaryKind> decided;  // hierarchical defenders only
  EpisodeTrace trace;                    // empty unless traces were requested

  bool operator==(const EpisodeResult&) const = default;
};

BatchStats batch_stats(std::span<const EpisodeResult> results);

/// Builds one fresh defender per episode. Shared state (a bandit table) is
/// read-only, so make() may be called from several threads.
class DefenderFactory {
 public:
  DefenderFactory(const DefenderSpec& spec, const Network& net, const SuccessModel& probs, long bandit_timesteps,
                  double bandit_epsilon, std::uint64_t seed);

  std::unique_ptr<DefencePolicy> make() const;
  bool observes() const { return spec_.policy != "sleep"; }
  std::shared_ptr<const AdversaryClassifier> classifier() const { return classifier_; }

 private:
  DefenderSpec spec_;
  const Network* net_;
  std::shared_ptr<const AdversaryClassifier> classifier_;
};

std::shared_ptr<const AdversaryClassifier> make_classifier(std::string_view name,
                                                           std::shared_ptr<const BanditTable> table = nullptr);

/// The defender's view of the first four turns: bits52 after each of turns
/// 0-3, with the pre-classification specialist (decoy_wall) acting.
std::vector<Bits52> observe_opening(const Network& net, const SuccessModel& probs, AdversaryKind kind,
                                    std::uint64_t seed);

/// Bandit table trained on opening windows from observe_opening.
BanditTable train_bandit_table(const Network& net, const SuccessModel& probs, long timesteps, double epsilon,
                               std::uint64_t seed);

/// Episode `index` of a batch. Every random choice derives from
/// derive_seed(cfg.seed, index): the adversary draw, the simulator, the
/// address book and the attacker each get their own sub-stream.
EpisodeResult run_episode(const RunConfig& cfg, const Network& net, const DefenderFactory& defender,
                          std::size_t index, const FeatureMask& mask = {});

struct BatchResult {
  std::vector<EpisodeResult> episodes;  // by index
  BatchStats stats;
};

/// Episodes run on an OpenMP pool; results are ordered by index, so the
/// output does not depend on scheduling.
BatchResult run_episodes(const RunConfig& cfg, const Network& net, const DefenderFactory& defender,
                         const FeatureMask& mask = {});
BatchResult run_episodes_serial(const RunConfig& cfg, const Network& net, const DefenderFactory& defender,
                                const FeatureMask& mask = {});
/// Loads the network and builds the defender from cfg.
BatchResult run_episodes(const RunConfig& cfg, const FeatureMask& mask = {});

struct ClassAccuracy {
  std::size_t correct = 0;
  std::size_t total = 0;

  double rate() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
  bool operator==(const ClassAccuracy&) const = default;
};

struct AccuracyTable {
  std::string controller;
  std::map<AdversaryKind, ClassAccuracy> classes;  // BLine and Meander

  bool operator==(const AccuracyTable&) const = default;
};

/// 50/50 BLine/Meander episodes of four turns, classified at turn 4.
AccuracyTable eval_controller_accuracy(const AdversaryClassifier& controller, std::size_t episodes, std::uint64_t seed,
                                       const Network& net, const SuccessModel& probs = {});
AccuracyTable eval_controller_accuracy_serial(const AdversaryClassifier& controller, std::size_t episodes,
                                              std::uint64_t seed, const Network& net, const SuccessModel& probs = {});

struct AblationRow {
  FeatureMask mask;
  BatchStats stats;
};

/// The unmasked baseline followed by one row per mask, all on the same seeds.
/// Throws ConfigError when the defender ignores observations.
std::vector<AblationRow> run_ablation(const RunConfig& cfg, std::span<const FeatureMask> masks);

nlohmann::json to_json(const RewardSummary& s);
nlohmann::json to_json(const BatchStats& s);
nlohmann::json to_json(const AccuracyTable& t);
nlohmann::json to_json(std::span<const AblationRow> rows);

std::string format_stats_table(const BatchStats& s);
std::string format_accuracy_table(const AccuracyTable& t);
std::string format_ablation_table(std::span<const AblationRow> rows);

}  // namespace cyber_range
