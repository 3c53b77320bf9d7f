#include "cyber_range/explain.hpp"

#include <omp.h>

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "cyber_range/error.hpp"

namespace cyber_range {
namespace {

std::string dot_id(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_field(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string blue_summary(const Bits52& obs, const Network& net) {
  const Knowledge k = decode_bits52(obs);
  std::string out;
  for (HostId i = 0; i < kHostCount; ++i) {
    if (k[i].activity == Activity::None) continue;
    if (!out.empty()) out += ",";
    out += net.host(i).name + ":" + std::string(to_string(k[i].activity));
  }
  return out.empty() ? "quiet" : out;
}

nlohmann::json action_json(const ActionRecord& a, bool red) {
  nlohmann::json j{{"verb", a.verb}, {"target", a.target}};
  if (red) {
    j["address"] = a.address;
    if (a.port) j["port"] = *a.port;
  } else if (!a.service.empty()) {
    j["service"] = a.service;
  }
  return j;
}

ActionRecord action_from_json(const nlohmann::json& j, bool success) {
  ActionRecord a;
  a.verb = j.at("verb").get<std::string>();
  a.target = j.at("target").get<std::string>();
  a.address = j.value("address", "");
  if (j.contains("port")) a.port = j.at("port").get<int>();
  a.service = j.value("service", "");
  a.success = success;
  return a;
}

std::uint64_t parse_digest(const std::string& hex) { return std::stoull(hex, nullptr, 16); }

}  // namespace

void record_step(EpisodeTrace& trace, int turn, const RedAction& red, const BlueAction& blue,
                 const StepOutcome& outcome, const AddressBook& book, const Network& net) {
  const int expected = trace.steps.empty() ? 0 : trace.steps.back().turn + 1;
  if (turn != expected) {
    throw Error("trace turn " + std::to_string(turn) + " out of order, expected " + std::to_string(expected));
  }
  StepRecord rec;
  rec.turn = turn;

  rec.red.verb = std::string(to_string(red.verb));
  rec.red.success = outcome.red_success;
  rec.red.decoy = outcome.decoy_triggered;
  switch (red.verb) {
    case RedVerb::Sleep:
      break;
    case RedVerb::DiscoverRemoteSystems:
      rec.red.target = net.subnet(red.subnet).name;
      rec.red.address = book.subnet_cidr(red.subnet);
      break;
    default:
      rec.red.target = book.resolve(red.address);
      rec.red.address = red.address.to_string();
      rec.red.port = red.port;
      break;
  }

  rec.blue.verb = std::string(to_string(blue.verb));
  rec.blue.target = blue.target;
  rec.blue.service = blue.decoy_service;
  rec.blue.success = outcome.blue_success;

  rec.reward = outcome.reward;
  rec.obs = outcome.blue_obs.bits52;
  rec.pre_digest = outcome.pre_digest;
  rec.post_digest = outcome.post_digest;
  trace.steps.push_back(std::move(rec));
}

nlohmann::json step_to_json(const EpisodeTrace& trace, const StepRecord& step) {
  nlohmann::json j;
  j["episode"] = trace.episode;
  j["seed"] = trace.seed;
  j["adversary"] = std::string(to_string(trace.adversary));
  j["turn"] = step.turn;
  j["red_action"] = action_json(step.red, true);
  j["red_success"] = step.red.success;
  j["red_decoy"] = step.red.decoy;
  j["blue_action"] = action_json(step.blue, false);
  j["blue_success"] = step.blue.success;
  j["reward"] = step.reward;
  j["bits52"] = to_hex(step.obs);
  j["pre_digest"] = digest_hex(step.pre_digest);
  j["digest"] = digest_hex(step.post_digest);
  return j;
}

void write_trace_lines(std::ostream& out, const EpisodeTrace& trace) {
  for (const auto& step : trace.steps) out << step_to_json(trace, step).dump() << '\n';
}

std::vector<EpisodeTrace> read_trace_lines(std::istream& in) {
  std::vector<EpisodeTrace> traces;
  std::map<std::size_t, std::size_t> slot;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto episode = j.at("episode").get<std::size_t>();
      auto [it, inserted] = slot.emplace(episode, traces.size());
      if (inserted) {
        EpisodeTrace t;
        t.episode = episode;
        t.seed = j.at("seed").get<std::uint64_t>();
        t.adversary = adversary_from_string(j.at("adversary").get<std::string>());
        traces.push_back(std::move(t));
      }
      EpisodeTrace& trace = traces[it->second];
      StepRecord rec;
      rec.turn = j.at("turn").get<int>();
      const int expected = trace.steps.empty() ? 0 : trace.steps.back().turn + 1;
      if (rec.turn != expected) throw Error("turn out of order");
      rec.red = action_from_json(j.at("red_action"), j.at("red_success").get<bool>());
      rec.red.decoy = j.value("red_decoy", false);
      rec.blue = action_from_json(j.at("blue_action"), j.at("blue_success").get<bool>());
      rec.reward = j.at("reward").get<double>();
      rec.obs = bits52_from_hex(j.at("bits52").get<std::string>());
      rec.pre_digest = parse_digest(j.at("pre_digest").get<std::string>());
      rec.post_digest = parse_digest(j.at("digest").get<std::string>());
      trace.steps.push_back(std::move(rec));
    } catch (const std::exception& e) {
      throw ConfigError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return traces;
}

std::string GraphNode::label() const {
  std::string out = verb;
  if (!target.empty()) out += " " + target;
  if (!outcome.empty()) out += " / " + outcome;
  return out;
}

void TransitionGraph::add_edge(const GraphNode& from, const GraphNode& to, int step) {
  const std::string a = from.label();
  const std::string b = to.label();
  nodes_.emplace(a, from);
  nodes_.emplace(b, to);
  auto [it, inserted] = edges_.try_emplace({a, b}, EdgeStats{0, step});
  it->second.weight += 1;
  it->second.first_step = std::min(it->second.first_step, step);
}

void TransitionGraph::merge(const TransitionGraph& other) {
  for (const auto& [label, node] : other.nodes_) nodes_.emplace(label, node);
  for (const auto& [key, stats] : other.edges_) {
    auto [it, inserted] = edges_.try_emplace(key, stats);
    if (!inserted) {
      it->second.weight += stats.weight;
      it->second.first_step = std::min(it->second.first_step, stats.first_step);
    }
  }
}

std::uint64_t TransitionGraph::total_weight() const {
  std::uint64_t total = 0;
  for (const auto& [key, stats] : edges_) total += stats.weight;
  return total;
}

GraphNode graph_node(const StepRecord& step, const GraphOptions& options) {
  if (options.perspective == Perspective::Blue) {
    const Network& net = options.net ? *options.net : default_topology();
    return {"OBS", blue_summary(step.obs, net), ""};
  }
  std::string outcome = "success";
  if (!step.red.success) outcome = (options.distinguish_decoys && step.red.decoy) ? "decoy" : "failure";
  return {step.red.verb, step.red.target, outcome};
}

namespace {

void fold_trace(TransitionGraph& g, const EpisodeTrace& trace, const GraphOptions& options) {
  std::size_t n = trace.steps.size();
  if (options.max_steps) n = std::min(n, *options.max_steps);
  for (std::size_t i = 1; i < n; ++i) {
    g.add_edge(graph_node(trace.steps[i - 1], options), graph_node(trace.steps[i], options), trace.steps[i].turn);
  }
}

}  // namespace

TransitionGraph build_graph_serial(std::span<const EpisodeTrace> traces, const GraphOptions& options) {
  if (traces.empty()) throw Error("build_graph needs at least one trace");
  TransitionGraph g;
  for (const auto& t : traces) fold_trace(g, t, options);
  return g;
}

TransitionGraph build_graph(std::span<const EpisodeTrace> traces, const GraphOptions& options) {
  if (traces.empty()) throw Error("build_graph needs at least one trace");
  std::vector<TransitionGraph> shards(static_cast<std::size_t>(omp_get_max_threads()));
  const auto count = static_cast<std::ptrdiff_t>(traces.size());
#pragma omp parallel
  {
    TransitionGraph& local = shards[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) fold_trace(local, traces[static_cast<std::size_t>(i)], options);
  }
  TransitionGraph g;
  for (const auto& shard : shards) g.merge(shard);
  return g;
}

std::string emit_dot(const TransitionGraph& graph) {
  if (graph.nodes().empty()) return "digraph G { }\n";
  std::ostringstream out;
  out << "digraph G {\n";
  for (const auto& [label, node] : graph.nodes()) out << "  " << dot_id(label) << ";\n";
  for (const auto& [key, stats] : graph.edges()) {
    out << "  " << dot_id(key.first) << " -> " << dot_id(key.second) << " [label=\"" << stats.weight << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

std::string emit_edge_csv(const TransitionGraph& graph) {
  std::ostringstream out;
  out << "src,dst,weight,first_step\n";
  for (const auto& [key, stats] : graph.edges()) {
    out << csv_field(key.first) << ',' << csv_field(key.second) << ',' << stats.weight << ',' << stats.first_step
        << '\n';
  }
  return out.str();
}

AdversaryKind classify_by_connectivity(const TransitionGraph& graph) {
  std::set<std::string> targets;
  for (const auto& [label, node] : graph.nodes()) {
    if (node.verb == "DNS") targets.insert(node.target);
  }
  if (targets.size() >= 2) return AdversaryKind::Meander;
  if (targets.size() == 1) return AdversaryKind::BLine;
  return AdversaryKind::UserBenign;
}

std::string FeatureMask::to_string() const {
  std::vector<std::string> parts;
  if (adversary_access) parts.emplace_back("access");
  if (adversary_scan) parts.emplace_back("scan");
  if (previous_action) parts.emplace_back("prev");
  if (parts.empty()) return "none";
  std::string out = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) out += "+" + parts[i];
  return out;
}

FeatureMask FeatureMask::parse(std::string_view text) {
  FeatureMask mask;
  if (text == "none") return mask;
  for (auto part : split(text, '+')) {
    if (part == "access" || part == "adversary_access") {
      mask.adversary_access = true;
    } else if (part == "scan" || part == "adversary_scan") {
      mask.adversary_scan = true;
    } else if (part == "prev" || part == "previous_action") {
      mask.previous_action = true;
    } else {
      throw ConfigError("unknown mask group '" + std::string(part) + "' (expected access, scan, prev or none)");
    }
  }
  return mask;
}

std::vector<FeatureMask> parse_mask_list(std::string_view text) {
  std::vector<FeatureMask> masks;
  for (auto part : split(text, ',')) masks.push_back(FeatureMask::parse(part));
  return masks;
}

BlueObservation ablate(const BlueObservation& obs, const FeatureMask& mask) {
  BlueObservation out = obs;
  for (std::size_t h = 0; h < kHostCount; ++h) {
    const std::size_t base = h * kBitsPerHost;
    if (mask.adversary_scan) {
      out.bits52.reset(base).reset(base + 1);
      out.bits_ak.reset(base).reset(base + 1);
      out.floats_sr[2 * h] = 0.0;
    }
    if (mask.adversary_access) {
      out.bits52.reset(base + 2).reset(base + 3);
      out.bits_ak.reset(base + 2).reset(base + 3);
      out.floats_sr[2 * h + 1] = 0.0;
    }
  }
  if (mask.previous_action) {
    out.bits_ak.reset(kBits52);
    out.floats_sr[kSrLength - 1] = 0.0;
  }
  return out;
}

}  // namespace cyber_range
