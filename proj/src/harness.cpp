#include "cyber_range/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>

#include "cyber_range/error.hpp"

namespace cyber_range {
namespace {

const std::set<std::string> kConfigKeys{"seed",     "episodes", "episode_length", "adversary",        "defender",
                                        "success_probabilities", "topology", "workers", "traces",
                                        "bandit_timesteps",      "bandit_epsilon"};
const std::set<std::string> kPolicies{"sleep", "greedy_restore", "decoy_wall", "hierarchical"};

[[noreturn]] void field_error(std::string_view field, std::string_view what) {
  throw ConfigError("config field '" + std::string(field) + "': " + std::string(what));
}

template <class T>
T get_field(const nlohmann::json& value, std::string_view field, std::string_view expected) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception&) {
    field_error(field, "expected " + std::string(expected));
  }
}

std::int64_t get_integer(const nlohmann::json& value, std::string_view field) {
  if (!value.is_number_integer()) field_error(field, "expected an integer");
  return value.get<std::int64_t>();
}

AdversaryMix parse_adversary(const nlohmann::json& value) {
  AdversaryMix mix;
  try {
    if (value.is_string()) {
      mix[adversary_from_string(value.get<std::string>())] = 1.0;
      return mix;
    }
    if (!value.is_object() || !value.contains("mix") || !value.at("mix").is_object()) {
      field_error("adversary", "expected \"bline\", \"meander\", \"benign\" or {\"mix\": {...}}");
    }
    for (const auto& [name, p] : value.at("mix").items()) {
      if (!p.is_number()) field_error("adversary.mix." + name, "expected a probability");
      mix[adversary_from_string(name)] = p.get<double>();
    }
    validate_mix(mix);
  } catch (const ConfigError& e) {
    if (std::string_view(e.what()).starts_with("config field")) throw;
    field_error("adversary", e.what());
  }
  return mix;
}

DefenderSpec parse_defender(const nlohmann::json& value, const std::filesystem::path& base_dir) {
  DefenderSpec spec;
  if (value.is_string()) {
    spec.policy = value.get<std::string>();
    return spec;
  }
  if (!value.is_object()) field_error("defender", "expected a policy name or {\"controller\": ...}");
  for (const auto& [key, v] : value.items()) {
    if (key == "controller") {
      spec.controller = get_field<std::string>(v, "defender.controller", "a string");
    } else if (key == "specialists") {
      if (!v.is_object()) field_error("defender.specialists", "expected {\"meander\": ..., \"bline\": ...}");
      for (const auto& [role, name] : v.items()) {
        const auto policy = get_field<std::string>(name, "defender.specialists." + role, "a policy name");
        if (role == "meander") {
          spec.meander_specialist = policy;
        } else if (role == "bline") {
          spec.bline_specialist = policy;
        } else {
          field_error("defender.specialists." + role, "unknown specialist role (expected meander or bline)");
        }
      }
    } else if (key == "bandit_table") {
      spec.bandit_table = base_dir / get_field<std::string>(v, "defender.bandit_table", "a path");
    } else {
      field_error("defender." + key, "unknown key");
    }
  }
  return spec;
}

SuccessModel parse_probs(const nlohmann::json& value) {
  if (!value.is_object()) field_error("success_probabilities", "expected an object");
  SuccessModel m;
  const std::map<std::string, double*> slots{{"exploit", &m.exploit}, {"escalate", &m.escalate},
                                             {"scan", &m.scan},       {"impact", &m.impact},
                                             {"restore", &m.restore}, {"remove", &m.remove},
                                             {"analyse", &m.analyse}, {"decoy", &m.decoy}};
  for (const auto& [key, v] : value.items()) {
    auto it = slots.find(key);
    if (it == slots.end()) field_error("success_probabilities." + key, "unknown action class");
    if (!v.is_number()) field_error("success_probabilities." + key, "expected a number");
    *it->second = v.get<double>();
  }
  return m;
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  // Avoid "-0.0000" so that tables do not depend on the sign of a zero.
  if (std::string_view(buf).find_first_not_of("-0.") == std::string_view::npos) {
    std::snprintf(buf, sizeof buf, "%.*f", digits, 0.0);
  }
  return buf;
}

// Right-aligned columns, first column left-aligned.
std::string render(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()));
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string pad(width[c] - row[c].size(), ' ');
      if (c == 0) {
        out << row[c] << pad;
      } else {
        out << "  " << pad << row[c];
      }
    }
    out << '\n';
  }
  return out.str();
}

std::vector<std::string> summary_row(std::string label, const RewardSummary& s) {
  return {std::move(label), std::to_string(s.episodes), fixed(s.mean), fixed(s.std), fixed(s.min), fixed(s.max)};
}

std::unique_ptr<DefencePolicy> make_specialist(const std::string& name, const Network& net) {
  if (name == "hierarchical") throw ConfigError("a specialist cannot itself be hierarchical");
  return make_policy(name, net);
}

template <class Body>
void parallel_for(std::size_t count, int workers, Body body) {
  std::exception_ptr error;
  std::size_t error_index = count;
  const auto n = static_cast<std::ptrdiff_t>(count);
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(cyber_range_batch_error)
      {
        // Report the lowest failing index so the error is reproducible.
        if (static_cast<std::size_t>(i) < error_index) {
          error_index = static_cast<std::size_t>(i);
          error = std::current_exception();
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

AccuracyTable empty_accuracy(const AdversaryClassifier& controller) {
  AccuracyTable t;
  t.controller = std::string(controller.name());
  t.classes[AdversaryKind::BLine] = {};
  t.classes[AdversaryKind::Meander] = {};
  return t;
}

AdversaryKind accuracy_truth(std::uint64_t episode_seed) {
  static const AdversaryMix kEvalMix{{AdversaryKind::BLine, 0.5}, {AdversaryKind::Meander, 0.5}};
  Rng draw(derive_seed(episode_seed, stream::kAdversaryDraw));
  return sample_adversary(draw, kEvalMix);
}

void check_accuracy_args(std::size_t episodes) {
  if (episodes == 0) throw ConfigError("accuracy evaluation needs at least one episode");
}

}  // namespace

void validate(const RunConfig& cfg) {
  if (cfg.episodes < 1) field_error("episodes", "must be at least 1");
  if (cfg.episode_length < static_cast<int>(kWindowLength)) {
    field_error("episode_length", "must be at least 4 so the controller sees a full window");
  }
  try {
    validate_mix(cfg.adversary);
  } catch (const ConfigError& e) {
    field_error("adversary", e.what());
  }
  if (!kPolicies.contains(cfg.defender.policy)) {
    field_error("defender", "unknown policy '" + cfg.defender.policy +
                                "' (expected sleep, greedy_restore, decoy_wall or hierarchical)");
  }
  if (cfg.defender.policy == "hierarchical") {
    if (cfg.defender.controller != "heuristic" && cfg.defender.controller != "bandit") {
      field_error("defender.controller", "expected heuristic or bandit");
    }
    for (const auto* name : {&cfg.defender.meander_specialist, &cfg.defender.bline_specialist}) {
      if (!kPolicies.contains(*name) || *name == "hierarchical") {
        field_error("defender.specialists", "unknown specialist '" + *name + "'");
      }
    }
  }
  const std::pair<const char*, double> probs[] = {
      {"exploit", cfg.probs.exploit}, {"escalate", cfg.probs.escalate}, {"scan", cfg.probs.scan},
      {"impact", cfg.probs.impact},   {"restore", cfg.probs.restore},   {"remove", cfg.probs.remove},
      {"analyse", cfg.probs.analyse}, {"decoy", cfg.probs.decoy}};
  for (const auto& [name, p] : probs) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      field_error(std::string("success_probabilities.") + name, "must be in [0, 1]");
    }
  }
  if (cfg.workers < 0) field_error("workers", "must be >= 0");
  if (cfg.bandit_timesteps <= 0) field_error("bandit_timesteps", "must be positive");
  if (!(cfg.bandit_epsilon >= 0.0 && cfg.bandit_epsilon <= 1.0)) field_error("bandit_epsilon", "must be in [0, 1]");
}

RunConfig run_config_from_json(const nlohmann::json& doc, std::optional<std::uint64_t> env_seed,
                               const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kConfigKeys.contains(key)) field_error(key, "unknown key");
  }
  RunConfig cfg;
  if (doc.contains("seed")) {
    const auto& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      field_error("seed", "expected a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  } else if (env_seed) {
    cfg.seed = *env_seed;
  } else {
    field_error("seed", "missing (set it in the config or via CYBER_RANGE_SEED)");
  }
  if (doc.contains("episodes")) {
    const auto n = get_integer(doc.at("episodes"), "episodes");
    if (n < 1) field_error("episodes", "must be at least 1");
    cfg.episodes = static_cast<std::size_t>(n);
  }
  if (doc.contains("episode_length")) {
    const auto n = get_integer(doc.at("episode_length"), "episode_length");
    if (n < static_cast<std::int64_t>(kWindowLength) || n > 1'000'000) {
      field_error("episode_length", "must be between 4 and 1000000");
    }
    cfg.episode_length = static_cast<int>(n);
  }
  if (doc.contains("adversary")) cfg.adversary = parse_adversary(doc.at("adversary"));
  if (doc.contains("defender")) cfg.defender = parse_defender(doc.at("defender"), base_dir);
  if (doc.contains("success_probabilities")) cfg.probs = parse_probs(doc.at("success_probabilities"));
  if (doc.contains("topology")) cfg.topology = base_dir / get_field<std::string>(doc.at("topology"), "topology", "a path");
  if (doc.contains("workers")) {
    const auto n = get_integer(doc.at("workers"), "workers");
    if (n < 0 || n > 4096) field_error("workers", "must be between 0 and 4096");
    cfg.workers = static_cast<int>(n);
  }
  if (doc.contains("traces")) cfg.traces = get_field<bool>(doc.at("traces"), "traces", "a boolean");
  if (doc.contains("bandit_timesteps")) cfg.bandit_timesteps = get_integer(doc.at("bandit_timesteps"), "bandit_timesteps");
  if (doc.contains("bandit_epsilon")) {
    cfg.bandit_epsilon = get_field<double>(doc.at("bandit_epsilon"), "bandit_epsilon", "a number");
  }
  validate(cfg);
  return cfg;
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json doc;
  doc["seed"] = cfg.seed;
  doc["episodes"] = cfg.episodes;
  doc["episode_length"] = cfg.episode_length;
  if (cfg.adversary.size() == 1 && cfg.adversary.begin()->second == 1.0) {
    doc["adversary"] = std::string(to_string(cfg.adversary.begin()->first));
  } else {
    nlohmann::json mix = nlohmann::json::object();
    for (const auto& [kind, p] : cfg.adversary) mix[std::string(to_string(kind))] = p;
    doc["adversary"] = {{"mix", mix}};
  }
  if (cfg.defender.policy == "hierarchical") {
    nlohmann::json d{{"controller", cfg.defender.controller},
                     {"specialists", {{"meander", cfg.defender.meander_specialist},
                                      {"bline", cfg.defender.bline_specialist}}}};
    if (cfg.defender.bandit_table) d["bandit_table"] = cfg.defender.bandit_table->string();
    doc["defender"] = d;
  } else {
    doc["defender"] = cfg.defender.policy;
  }
  doc["success_probabilities"] = {{"exploit", cfg.probs.exploit}, {"escalate", cfg.probs.escalate},
                                  {"scan", cfg.probs.scan},       {"impact", cfg.probs.impact},
                                  {"restore", cfg.probs.restore}, {"remove", cfg.probs.remove},
                                  {"analyse", cfg.probs.analyse}, {"decoy", cfg.probs.decoy}};
  if (cfg.topology) doc["topology"] = cfg.topology->string();
  doc["workers"] = cfg.workers;
  doc["traces"] = cfg.traces;
  doc["bandit_timesteps"] = cfg.bandit_timesteps;
  doc["bandit_epsilon"] = cfg.bandit_epsilon;
  return doc;
}

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("CYBER_RANGE_SEED");
  if (!raw || !*raw) return std::nullopt;
  const std::string text(raw);
  if (text.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("CYBER_RANGE_SEED must be a non-negative integer, got '" + text + "'");
  }
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    throw ConfigError("CYBER_RANGE_SEED is out of range");
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(doc, seed_from_env(), path.parent_path());
}

Network load_network(const RunConfig& cfg) {
  if (!cfg.topology) return default_topology();
  std::ifstream in(*cfg.topology);
  if (!in) throw ConfigError("cannot open topology file " + cfg.topology->string());
  try {
    return network_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw TopologyError("topology file " + cfg.topology->string() + ": " + e.what());
  }
}

RewardSummary stats(std::span<const double> rewards) {
  if (rewards.empty()) throw Error("stats of an empty reward list");
  RewardSummary s;
  s.episodes = rewards.size();
  double sum = 0.0;
  s.min = rewards.front();
  s.max = rewards.front();
  for (double r : rewards) {
    sum += r;
    s.min = std::min(s.min, r);
    s.max = std::max(s.max, r);
  }
  const double n = static_cast<double>(rewards.size());
  s.mean = sum / n;
  double sq = 0.0;
  for (double r : rewards) sq += (r - s.mean) * (r - s.mean);
  s.std = std::sqrt(sq / n);
  // Rounding can push the mean a hair outside [min, max] for constant input.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

BatchStats batch_stats(std::span<const EpisodeResult> results) {
  std::vector<double> all;
  std::map<AdversaryKind, std::vector<double>> by_kind;
  for (const auto& r : results) {
    all.push_back(r.total_reward);
    by_kind[r.adversary].push_back(r.total_reward);
  }
  BatchStats s;
  s.overall = stats(all);
  for (const auto& [kind, rewards] : by_kind) s.per_adversary[kind] = stats(rewards);
  return s;
}

std::shared_ptr<const AdversaryClassifier> make_classifier(std::string_view name,
                                                           std::shared_ptr<const BanditTable> table) {
  if (name == "heuristic") return std::make_shared<HeuristicClassifier>();
  if (name == "bandit") {
    if (!table) throw ConfigError("bandit controller needs a table");
    return std::make_shared<BanditClassifier>(std::move(table));
  }
  throw ConfigError("unknown controller '" + std::string(name) + "' (expected heuristic or bandit)");
}

DefenderFactory::DefenderFactory(const DefenderSpec& spec, const Network& net, const SuccessModel& probs,
                                 long bandit_timesteps, double bandit_epsilon, std::uint64_t seed)
    : spec_(spec), net_(&net) {
  if (!kPolicies.contains(spec.policy)) throw ConfigError("unknown defence policy '" + spec.policy + "'");
  if (spec.policy != "hierarchical") return;
  std::shared_ptr<const BanditTable> table;
  if (spec.controller == "bandit") {
    if (spec.bandit_table) {
      std::ifstream in(*spec.bandit_table);
      if (!in) throw ConfigError("cannot open bandit table " + spec.bandit_table->string());
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bandit table " + spec.bandit_table->string() + " is not valid JSON: " + e.what());
      }
      table = std::make_shared<const BanditTable>(bandit_table_from_json(doc));
    } else {
      table = std::make_shared<const BanditTable>(
          train_bandit_table(net, probs, bandit_timesteps, bandit_epsilon, derive_seed(seed, stream::kBlue)));
    }
  }
  classifier_ = make_classifier(spec.controller, table);
  // Fail early on bad specialist names rather than inside the worker pool.
  make_specialist(spec.meander_specialist, net);
  make_specialist(spec.bline_specialist, net);
}

std::unique_ptr<DefencePolicy> DefenderFactory::make() const {
  if (spec_.policy != "hierarchical") return make_policy(spec_.policy, *net_);
  return std::make_unique<HierarchicalDefender>(classifier_, make_specialist(spec_.meander_specialist, *net_),
                                                make_specialist(spec_.bline_specialist, *net_));
}

std::vector<Bits52> observe_opening(const Network& net, const SuccessModel& probs, AdversaryKind kind,
                                    std::uint64_t seed) {
  auto [state, obs] = reset(net, seed, probs);
  auto adversary = make_adversary(kind, net, derive_seed(seed, stream::kRed));
  DecoyWallPolicy policy(net);
  RedView view = initial_red_view(state);
  std::vector<Bits52> window;
  for (int turn = 0; turn < static_cast<int>(kWindowLength); ++turn) {
    const BlueAction blue = policy.act(obs, turn);
    policy.record(blue);
    const RedAction red = adversary->next(view);
    StepOutcome out = step(state, blue, red);
    obs = out.blue_obs;
    view = std::move(out.red_view);
    window.push_back(obs.bits52);
  }
  return window;
}

BanditTable train_bandit_table(const Network& net, const SuccessModel& probs, long timesteps, double epsilon,
                               std::uint64_t seed) {
  const WindowSource source = [&](AdversaryKind kind, std::uint64_t s) { return observe_opening(net, probs, kind, s); };
  return bandit_train(source, timesteps, epsilon, seed);
}

EpisodeResult run_episode(const RunConfig& cfg, const Network& net, const DefenderFactory& defender,
                          std::size_t index, const FeatureMask& mask) {
  EpisodeResult result;
  result.index = index;
  result.seed = derive_seed(cfg.seed, index);
  Rng draw(derive_seed(result.seed, stream::kAdversaryDraw));
  result.adversary = sample_adversary(draw, cfg.adversary);

  auto [state, obs] = reset(net, result.seed, cfg.probs);
  auto adversary = make_adversary(result.adversary, net, derive_seed(result.seed, stream::kRed));
  auto policy = defender.make();
  RedView view = initial_red_view(state);

  result.trace.episode = index;
  result.trace.seed = result.seed;
  result.trace.adversary = result.adversary;
  for (int turn = 0; turn < cfg.episode_length; ++turn) {
    const BlueAction blue = policy->act(ablate(obs, mask), turn);
    policy->record(blue);
    const RedAction red = adversary->next(view);
    StepOutcome out = step(state, blue, red);
    if (cfg.traces) record_step(result.trace, turn, red, blue, out, state.addresses, net);
    result.total_reward += out.reward;
    obs = out.blue_obs;
    view = std::move(out.red_view);
  }
  if (const auto* h = dynamic_cast<const HierarchicalDefender*>(policy.get())) result.decided = h->decided();
  return result;
}

BatchResult run_episodes(const RunConfig& cfg, const Network& net, const DefenderFactory& defender,
                         const FeatureMask& mask) {
  validate(cfg);
  BatchResult batch;
  batch.episodes.resize(cfg.episodes);
  parallel_for(cfg.episodes, cfg.workers,
               [&](std::size_t i) { batch.episodes[i] = run_episode(cfg, net, defender, i, mask); });
  batch.stats = batch_stats(batch.episodes);
  return batch;
}

BatchResult run_episodes_serial(const RunConfig& cfg, const Network& net, const DefenderFactory& defender,
                                const FeatureMask& mask) {
  validate(cfg);
  BatchResult batch;
  for (std::size_t i = 0; i < cfg.episodes; ++i) batch.episodes.push_back(run_episode(cfg, net, defender, i, mask));
  batch.stats = batch_stats(batch.episodes);
  return batch;
}

BatchResult run_episodes(const RunConfig& cfg, const FeatureMask& mask) {
  validate(cfg);
  const Network net = load_network(cfg);
  const DefenderFactory defender(cfg.defender, net, cfg.probs, cfg.bandit_timesteps, cfg.bandit_epsilon, cfg.seed);
  return run_episodes(cfg, net, defender, mask);
}

AccuracyTable eval_controller_accuracy(const AdversaryClassifier& controller, std::size_t episodes, std::uint64_t seed,
                                       const Network& net, const SuccessModel& probs) {
  check_accuracy_args(episodes);
  std::vector<std::pair<AdversaryKind, bool>> outcomes(episodes);
  parallel_for(episodes, 0, [&](std::size_t i) {
    const std::uint64_t s = derive_seed(seed, i);
    const AdversaryKind truth = accuracy_truth(s);
    const auto window = observe_opening(net, probs, truth, s);
    outcomes[i] = {truth, controller.classify(window) == truth};
  });
  AccuracyTable t = empty_accuracy(controller);
  for (const auto& [truth, ok] : outcomes) {
    auto& c = t.classes[truth];
    ++c.total;
    if (ok) ++c.correct;
  }
  return t;
}

AccuracyTable eval_controller_accuracy_serial(const AdversaryClassifier& controller, std::size_t episodes,
                                              std::uint64_t seed, const Network& net, const SuccessModel& probs) {
  check_accuracy_args(episodes);
  AccuracyTable t = empty_accuracy(controller);
  for (std::size_t i = 0; i < episodes; ++i) {
    const std::uint64_t s = derive_seed(seed, i);
    const AdversaryKind truth = accuracy_truth(s);
    auto& c = t.classes[truth];
    ++c.total;
    if (controller.classify(observe_opening(net, probs, truth, s)) == truth) ++c.correct;
  }
  return t;
}

std::vector<AblationRow> run_ablation(const RunConfig& cfg, std::span<const FeatureMask> masks) {
  validate(cfg);
  const Network net = load_network(cfg);
  const DefenderFactory defender(cfg.defender, net, cfg.probs, cfg.bandit_timesteps, cfg.bandit_epsilon, cfg.seed);
  if (!defender.observes()) throw ConfigError("ablation needs a defender that reads observations, not sleep");
  RunConfig quiet = cfg;
  quiet.traces = false;
  std::vector<AblationRow> rows;
  rows.push_back({FeatureMask{}, run_episodes(quiet, net, defender).stats});
  for (const auto& mask : masks) rows.push_back({mask, run_episodes(quiet, net, defender, mask).stats});
  return rows;
}

nlohmann::json to_json(const RewardSummary& s) {
  return {{"episodes", s.episodes}, {"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max}};
}

nlohmann::json to_json(const BatchStats& s) {
  nlohmann::json doc = to_json(s.overall);
  doc["per_adversary"] = nlohmann::json::object();
  for (const auto& [kind, summary] : s.per_adversary) doc["per_adversary"][std::string(to_string(kind))] = to_json(summary);
  return doc;
}

nlohmann::json to_json(const AccuracyTable& t) {
  nlohmann::json doc{{"controller", t.controller}, {"classes", nlohmann::json::object()}};
  for (const auto& [kind, c] : t.classes) {
    doc["classes"][std::string(to_string(kind))] = {
        {"correct", c.correct}, {"incorrect", c.total - c.correct}, {"total", c.total}, {"accuracy", c.rate()}};
  }
  return doc;
}

nlohmann::json to_json(std::span<const AblationRow> rows) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& row : rows) doc.push_back({{"mask", row.mask.to_string()}, {"stats", to_json(row.stats)}});
  return doc;
}

std::string format_stats_table(const BatchStats& s) {
  std::vector<std::vector<std::string>> rows{{"adversary", "episodes", "mean", "std", "min", "max"}};
  rows.push_back(summary_row("all", s.overall));
  for (const auto& [kind, summary] : s.per_adversary) rows.push_back(summary_row(std::string(to_string(kind)), summary));
  return render(rows);
}

std::string format_accuracy_table(const AccuracyTable& t) {
  std::vector<std::vector<std::string>> rows{{"controller", "adversary", "correct", "total", "accuracy"}};
  for (const auto& [kind, c] : t.classes) {
    rows.push_back({t.controller, std::string(to_string(kind)), std::to_string(c.correct), std::to_string(c.total),
                    fixed(100.0 * c.rate(), 1) + "%"});
  }
  return render(rows);
}

std::string format_ablation_table(std::span<const AblationRow> rows) {
  std::vector<std::vector<std::string>> out{{"mask", "episodes", "mean", "std", "min", "max"}};
  for (const auto& row : rows) out.push_back(summary_row(row.mask.to_string(), row.stats.overall));
  return render(out);
}

}  // namespace cyber_range
