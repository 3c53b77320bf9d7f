#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cyber_range/error.hpp"
#include "cyber_range/explain.hpp"
#include "cyber_range/harness.hpp"

namespace fs = std::filesystem;
using namespace cyber_range;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
  if (!out.flush()) throw ConfigError("failed writing " + path.string());
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + " is not valid JSON: " + e.what());
  }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (auto env = seed_from_env()) return *env;
  throw ConfigError("--seed is required (or set CYBER_RANGE_SEED)");
}

Network network_from(const std::optional<fs::path>& topology) {
  RunConfig cfg;
  cfg.topology = topology;
  return load_network(cfg);
}

int cmd_run(const fs::path& config, const fs::path& out_dir) {
  const RunConfig cfg = load_run_config(config);
  const BatchResult batch = run_episodes(cfg);
  fs::create_directories(out_dir);
  if (cfg.traces) {
    std::ostringstream traces;
    for (const auto& ep : batch.episodes) write_trace_lines(traces, ep.trace);
    write_file(out_dir / "traces.jsonl", traces.str());
  }
  write_file(out_dir / "stats.json", to_json(batch.stats).dump(2) + "\n");
  const std::string table = format_stats_table(batch.stats);
  write_file(out_dir / "stats.txt", table);
  std::cout << table;
  return 0;
}

int cmd_train(long timesteps, double epsilon, const std::optional<std::uint64_t>& seed_flag, const fs::path& out,
              const std::optional<fs::path>& topology) {
  const std::uint64_t seed = resolve_seed(seed_flag);
  const Network net = network_from(topology);
  const BanditTable table = train_bandit_table(net, SuccessModel{}, timesteps, epsilon, seed);
  write_file(out, to_json(table).dump(2) + "\n");
  std::cout << "trained " << table.size() << " window contexts over " << timesteps << " timesteps -> "
            << out.string() << "\n";
  return 0;
}

int cmd_eval(const std::string& controller, const std::optional<fs::path>& table_path, std::size_t episodes,
             const std::optional<std::uint64_t>& seed_flag, const std::optional<fs::path>& out,
             const std::optional<fs::path>& topology) {
  const std::uint64_t seed = resolve_seed(seed_flag);
  const Network net = network_from(topology);
  std::shared_ptr<const BanditTable> table;
  if (controller == "bandit") {
    if (!table_path) throw ConfigError("--controller bandit needs --bandit-table");
    table = std::make_shared<const BanditTable>(bandit_table_from_json(read_json(*table_path)));
  }
  const auto classifier = make_classifier(controller, table);
  const AccuracyTable result = eval_controller_accuracy(*classifier, episodes, seed, net);
  const std::string text = format_accuracy_table(result);
  if (out) write_file(*out, to_json(result).dump(2) + "\n");
  std::cout << text;
  return 0;
}

int cmd_explain(const std::vector<fs::path>& files, std::optional<std::size_t> max_steps, const fs::path& dot,
                const std::optional<fs::path>& csv, const std::string& perspective, bool distinguish_decoys) {
  std::vector<EpisodeTrace> traces;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open trace file " + file.string());
    auto more = read_trace_lines(in);
    traces.insert(traces.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  }
  if (traces.empty()) throw ConfigError("no trace records in the given files");
  GraphOptions options;
  options.max_steps = max_steps;
  options.distinguish_decoys = distinguish_decoys;
  if (perspective == "blue") {
    options.perspective = Perspective::Blue;
  } else if (perspective != "red") {
    throw ConfigError("--perspective must be red or blue");
  }
  const TransitionGraph graph = build_graph(traces, options);
  write_file(dot, emit_dot(graph));
  if (csv) write_file(*csv, emit_edge_csv(graph));
  std::cout << traces.size() << " traces, " << graph.nodes().size() << " nodes, " << graph.edges().size()
            << " edges -> " << dot.string() << "\n";
  return 0;
}

int cmd_ablate(const std::string& masks_text, const fs::path& config, const std::optional<fs::path>& out) {
  const RunConfig cfg = load_run_config(config);
  const auto masks = parse_mask_list(masks_text);
  const auto rows = run_ablation(cfg, masks);
  if (out) write_file(*out, to_json(rows).dump(2) + "\n");
  std::cout << format_ablation_table(rows);
  return 0;
}

int cmd_topology(const std::optional<fs::path>& out) {
  const std::string text = to_json(default_topology()).dump(2) + "\n";
  if (out) {
    write_file(*out, text);
  } else {
    std::cout << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Turn-based network defence simulator and hierarchical defender toolkit"};
  app.require_subcommand(1);

  fs::path run_config, out_dir;
  auto* run = app.add_subcommand("run", "Run a batch of seeded episodes");
  run->add_option("--config", run_config, "Run configuration JSON")->required();
  run->add_option("--out-dir", out_dir, "Directory for traces.jsonl, stats.json and stats.txt")->required();

  long timesteps = 15000;
  double epsilon = 0.01;
  std::optional<std::uint64_t> seed;
  fs::path table_out;
  std::optional<fs::path> topology;
  auto* train = app.add_subcommand("train-bandit", "Train the bandit controller table");
  train->add_option("--timesteps", timesteps, "Training budget in timesteps")->capture_default_str();
  train->add_option("--epsilon", epsilon, "Exploration rate")->capture_default_str();
  train->add_option("--seed", seed, "Seed (falls back to CYBER_RANGE_SEED)");
  train->add_option("--out", table_out, "Output table JSON")->required();
  train->add_option("--topology", topology, "Topology JSON (default: the canonical network)");

  std::string controller;
  std::optional<fs::path> bandit_table, eval_out;
  std::size_t episodes = 1000;
  auto* eval = app.add_subcommand("eval-controllers", "Controller accuracy over 4-step episodes");
  eval->add_option("--controller", controller, "heuristic or bandit")
      ->required()
      ->check(CLI::IsMember({"heuristic", "bandit"}));
  eval->add_option("--bandit-table", bandit_table, "Trained table JSON");
  eval->add_option("--episodes", episodes, "Episode count")->capture_default_str()->check(CLI::PositiveNumber);
  eval->add_option("--seed", seed, "Seed (falls back to CYBER_RANGE_SEED)");
  eval->add_option("--out", eval_out, "Write the table as JSON");
  eval->add_option("--topology", topology, "Topology JSON (default: the canonical network)");

  std::vector<fs::path> trace_files;
  std::optional<std::size_t> max_steps;
  fs::path dot_out;
  std::optional<fs::path> csv_out;
  std::string perspective = "red";
  bool distinguish_decoys = false;
  auto* explain = app.add_subcommand("explain", "Build an action-outcome transition graph from traces");
  explain->add_option("--traces", trace_files, "JSON-lines trace files")->required()->expected(1, -1);
  explain->add_option("--max-steps", max_steps, "Keep the first N steps of each trace")->check(CLI::PositiveNumber);
  explain->add_option("--dot", dot_out, "DOT output")->required();
  explain->add_option("--csv", csv_out, "CSV edge list output");
  explain->add_option("--perspective", perspective, "red or blue")->capture_default_str();
  explain->add_flag("--distinguish-decoys", distinguish_decoys, "Give decoy-triggered exploits their own outcome");

  std::string masks = "access,scan,prev";
  fs::path ablate_config;
  std::optional<fs::path> ablate_out;
  auto* ablate = app.add_subcommand("ablate", "Re-run a batch with observation features masked");
  ablate->add_option("--mask", masks, "Comma-separated masks; groups join with '+'")->capture_default_str();
  ablate->add_option("--config", ablate_config, "Run configuration JSON")->required();
  ablate->add_option("--out", ablate_out, "Write the results as JSON");

  std::optional<fs::path> topology_out;
  auto* topo = app.add_subcommand("topology", "Print the canonical network as JSON");
  topo->add_option("--out", topology_out, "Write to a file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_config, out_dir);
    if (*train) return cmd_train(timesteps, epsilon, seed, table_out, topology);
    if (*eval) return cmd_eval(controller, bandit_table, episodes, seed, eval_out, topology);
    if (*explain) return cmd_explain(trace_files, max_steps, dot_out, csv_out, perspective, distinguish_decoys);
    if (*ablate) return cmd_ablate(masks, ablate_config, ablate_out);
    if (*topo) return cmd_topology(topology_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
