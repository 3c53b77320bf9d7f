#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cyber_range/adversary.hpp"
#include "cyber_range/network.hpp"
#include "cyber_range/observation.hpp"
#include "cyber_range/sim.hpp"

namespace cyber_range {

/// One actor's action with every address resolved to a hostname (or a
/// subnet name for DRS).
struct ActionRecord {
  std::string verb;
  std::string target;
  bool success = false;
  bool decoy = false;   // red exploit landed on a decoy
  std::string address;  // the raw address or range, kept for reference
  std::optional<int> port;
  std::string service;  // blue decoy service

  bool operator==(const ActionRecord&) const = default;
};

struct StepRecord {
  int turn = 0;
  ActionRecord red;
  ActionRecord blue;
  double reward = 0.0;
  Bits52 obs;
  std::uint64_t pre_digest = 0;
  std::uint64_t post_digest = 0;

  bool operator==(const StepRecord&) const = default;
};

struct EpisodeTrace {
  std::size_t episode = 0;
  std::uint64_t seed = 0;
  AdversaryKind adversary = AdversaryKind::UserBenign;
  std::vector<StepRecord> steps;

  bool operator==(const EpisodeTrace&) const = default;
};

/// Appends one turn. Throws Error when `turn` does not follow the last
/// recorded turn, ResolutionError when an address is not bound in `book`.
void record_step(EpisodeTrace& trace, int turn, const RedAction& red, const BlueAction& blue,
                 const StepOutcome& outcome, const AddressBook& book, const Network& net);

// JSON-lines: one object per step, carrying episode, seed and adversary.
nlohmann::json step_to_json(const EpisodeTrace& trace, const StepRecord& step);
void write_trace_lines(std::ostream& out, const EpisodeTrace& trace);
/// Groups lines by episode in order of first appearance.
std::vector<EpisodeTrace> read_trace_lines(std::istream& in);

enum class Perspective { Red, Blue };

struct GraphOptions {
  std::optional<std::size_t> max_steps;  // keep only the first N steps of each trace
  Perspective perspective = Perspective::Red;
  bool distinguish_decoys = false;  // "decoy" outcome instead of "failure"
  const Network* net = nullptr;     // host names for the blue perspective; default topology if null
};

struct GraphNode {
  std::string verb;
  std::string target;
  std::string outcome;

  std::string label() const;
  auto operator<=>(const GraphNode&) const = default;
};

struct EdgeStats {
  std::uint64_t weight = 0;
  int first_step = 0;  // earliest turn at which the edge's destination was reached

  bool operator==(const EdgeStats&) const = default;
};

/// Action-outcome transition graph accumulated over traces.
class TransitionGraph {
 public:
  void add_edge(const GraphNode& from, const GraphNode& to, int step);
  /// Edge weights add; first_step takes the minimum.
  void merge(const TransitionGraph& other);

  const std::map<std::string, GraphNode>& nodes() const { return nodes_; }
  const std::map<std::pair<std::string, std::string>, EdgeStats>& edges() const { return edges_; }
  std::uint64_t total_weight() const;

  bool operator==(const TransitionGraph&) const = default;

 private:
  std::map<std::string, GraphNode> nodes_;  // keyed by label
  std::map<std::pair<std::string, std::string>, EdgeStats> edges_;
};

GraphNode graph_node(const StepRecord& step, const GraphOptions& options);

/// Serial fold over traces; kept as the reference for build_graph.
TransitionGraph build_graph_serial(std::span<const EpisodeTrace> traces, const GraphOptions& options = {});
/// Shards traces across OpenMP threads and merges. Throws Error for an empty list.
TransitionGraph build_graph(std::span<const EpisodeTrace> traces, const GraphOptions& options = {});

/// Byte-stable DOT: nodes and edges in lexicographic label order.
std::string emit_dot(const TransitionGraph& graph);
/// src,dst,weight,first_step
std::string emit_edge_csv(const TransitionGraph& graph);

/// Distinct DNS targets in a single-episode opening graph: >= 2 Meander,
/// 1 BLine, 0 benign.
AdversaryKind classify_by_connectivity(const TransitionGraph& graph);

struct FeatureMask {
  bool adversary_access = false;
  bool adversary_scan = false;
  bool previous_action = false;

  bool empty() const { return !adversary_access && !adversary_scan && !previous_action; }
  /// "none", or groups joined by '+': access, scan, prev.
  std::string to_string() const;
  static FeatureMask parse(std::string_view text);

  bool operator==(const FeatureMask&) const = default;
};

/// Comma-separated masks, e.g. "access,scan,prev" or "access+scan".
std::vector<FeatureMask> parse_mask_list(std::string_view text);

/// Zeroes the masked feature groups consistently in all three encodings.
BlueObservation ablate(const BlueObservation& obs, const FeatureMask& mask);

}  // namespace cyber_range
