#include "cyber_range/controller.hpp"

#include <set>

#include "cyber_range/error.hpp"

namespace cyber_range {
namespace {

constexpr std::string_view kTableFormat = "cyber-range-bandit-table";

}  // namespace

std::string WindowKey::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

WindowKey WindowKey::from_hex(std::string_view hex) {
  WindowKey key;
  if (hex.size() != key.bytes.size() * 2) throw ConfigError("window key must have 52 hex digits");
  auto digit = [&](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    throw ConfigError("window key has invalid hex digit");
  };
  for (std::size_t i = 0; i < key.bytes.size(); ++i) {
    key.bytes[i] = static_cast<std::uint8_t>((digit(hex[2 * i]) << 4) | digit(hex[2 * i + 1]));
  }
  return key;
}

WindowKey window_key(std::span<const Bits52> history) {
  if (history.size() > kWindowLength) throw ControllerError("window holds at most four observations");
  WindowKey key;
  const std::size_t pad = kWindowLength - history.size();
  for (std::size_t w = 0; w < history.size(); ++w) {
    const std::size_t offset = (pad + w) * kBits52;
    for (std::size_t b = 0; b < kBits52; ++b) {
      if (!history[w][b]) continue;
      const std::size_t bit = offset + b;
      key.bytes[bit / 8] |= static_cast<std::uint8_t>(0x80u >> (bit % 8));
    }
  }
  return key;
}

int argmax_lowest(const std::array<double, kControllerActions>& q) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(kControllerActions); ++a) {
    if (q[a] > q[best]) best = a;
  }
  return best;
}

const BanditEntry* BanditTable::find(const WindowKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

int BanditTable::greedy_action(const WindowKey& key) const {
  const BanditEntry* e = find(key);
  return e ? argmax_lowest(e->q) : 0;
}

Prediction bandit_predict(BanditTable& table, const WindowKey& key, Rng& rng) {
  const BanditEntry& entry = table.ensure(key);
  Prediction p;
  p.key = key;
  // Both draws happen every call so the stream does not depend on epsilon.
  const double u = rng.uniform();
  const auto random_action = static_cast<int>(rng.below(kControllerActions));
  if (u < table.epsilon()) {
    p.explored = true;
    p.kind = adversary_from_action(random_action);
  } else {
    p.kind = adversary_from_action(argmax_lowest(entry.q));
  }
  return p;
}

void bandit_update(BanditTable& table, const WindowKey& key, int action, double reward) {
  auto it = table.entries_.find(key);
  if (it == table.entries_.end()) throw ControllerError("bandit update for a window that was never predicted");
  if (action < 0 || action >= static_cast<int>(kControllerActions)) throw ControllerError("bandit action out of range");
  auto& e = it->second;
  e.n[action] += 1;
  e.q[action] += (reward - e.q[action]) / static_cast<double>(e.n[action]);
}

BanditTable merge(const BanditTable& a, const BanditTable& b) {
  BanditTable out(a.epsilon());
  for (const auto& [key, entry] : a.entries()) out.ensure(key) = entry;
  for (const auto& [key, entry] : b.entries()) {
    BanditEntry& dst = out.ensure(key);
    for (std::size_t i = 0; i < kControllerActions; ++i) {
      const std::uint64_t total = dst.n[i] + entry.n[i];
      if (total == 0) continue;
      dst.q[i] = (static_cast<double>(dst.n[i]) * dst.q[i] + static_cast<double>(entry.n[i]) * entry.q[i]) /
                 static_cast<double>(total);
      dst.n[i] = total;
    }
  }
  return out;
}

BanditTable bandit_train(const WindowSource& source, long timesteps, double epsilon, std::uint64_t seed) {
  if (timesteps <= 0) throw ControllerError("bandit training needs a positive timestep budget");
  if (epsilon < 0.0 || epsilon > 1.0) throw ControllerError("epsilon must be in [0, 1]");
  BanditTable table(epsilon);
  Rng rng(seed);
  long consumed = 0;
  for (std::uint64_t episode = 0; consumed < timesteps; ++episode) {
    const auto truth = kAllAdversaries[rng.below(kAllAdversaries.size())];
    const auto window = source(truth, derive_seed(seed, episode));
    consumed += static_cast<long>(window.size());
    const WindowKey key = window_key(window);
    const Prediction p = bandit_predict(table, key, rng);
    bandit_update(table, key, action_id(p.kind), p.kind == truth ? 1.0 : -1.0);
  }
  return table;
}

AdversaryKind heuristic_predict(std::span<const Bits52> history) {
  if (history.size() != kWindowLength) {
    throw ControllerError("heuristic needs exactly four observations, got " + std::to_string(history.size()));
  }
  std::set<std::size_t> active;
  for (const auto& obs : history) {
    const Knowledge k = decode_bits52(obs);
    for (std::size_t h = 0; h < kHostCount; ++h) {
      if (k[h].activity != Activity::None) active.insert(h);
    }
  }
  return active.size() >= 2 ? AdversaryKind::Meander : AdversaryKind::BLine;
}

AdversaryKind BanditClassifier::classify(std::span<const Bits52> window) const {
  return adversary_from_action(table_->greedy_action(window_key(window)));
}

nlohmann::json to_json(const BanditTable& table) {
  nlohmann::json doc;
  doc["format"] = kTableFormat;
  doc["version"] = 1;
  doc["epsilon"] = table.epsilon();
  doc["entries"] = nlohmann::json::object();
  for (const auto& [key, e] : table.entries()) {
    doc["entries"][key.to_hex()] = {{"q", e.q}, {"n", e.n}};
  }
  return doc;
}

BanditTable bandit_table_from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("format", "") != kTableFormat) throw ConfigError("bandit table: unexpected format tag");
    if (doc.value("version", 0) != 1) throw ConfigError("bandit table: unsupported version");
    BanditTable table(doc.at("epsilon").get<double>());
    for (const auto& [hex, e] : doc.at("entries").items()) {
      BanditEntry& entry = table.ensure(WindowKey::from_hex(hex));
      entry.q = e.at("q").get<std::array<double, kControllerActions>>();
      entry.n = e.at("n").get<std::array<std::uint64_t, kControllerActions>>();
    }
    return table;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bandit table: ") + e.what());
  }
}

}  // namespace cyber_range
