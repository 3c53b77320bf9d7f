#include <map>
#include <set>

#include "cyber_range/controller.hpp"
#include "cyber_range/error.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cyber_range;

namespace {

Bits52 active(std::initializer_list<std::pair<std::size_t, Activity>> hosts) {
  Knowledge k{};
  for (const auto& [h, a] : hosts) k[h].activity = a;
  return encode_bits52(k);
}

WindowKey random_key(Rng& rng) {
  std::vector<Bits52> w;
  for (int i = 0; i < 4; ++i) w.push_back(gen::bits52(rng));
  return window_key(w);
}

}  // namespace

TEST_CASE("window keys") {
  const std::vector<Bits52> zeros(4);
  const WindowKey z = window_key(zeros);
  CHECK(z.bytes.size() * 8 == 208);
  for (auto b : z.bytes) CHECK(b == 0);
  CHECK(z.to_hex() == std::string(52, '0'));

  const Bits52 x = active({{0, Activity::Scanned}});
  const std::vector<Bits52> one{x};
  const std::vector<Bits52> padded{Bits52{}, Bits52{}, Bits52{}, x};
  CHECK(window_key(one) == window_key(padded));

  const Bits52 y = active({{3, Activity::Exploited}});
  const std::vector<Bits52> xy{Bits52{}, Bits52{}, x, y};
  const std::vector<Bits52> yx{Bits52{}, Bits52{}, y, x};
  CHECK_FALSE(window_key(xy) == window_key(yx));

  CHECK(WindowKey::from_hex(window_key(xy).to_hex()) == window_key(xy));
  CHECK_THROWS_AS(window_key(std::vector<Bits52>(5)), ControllerError);
  CHECK_THROWS_AS(WindowKey::from_hex("00"), ConfigError);
}

TEST_CASE("window key bit layout is oldest first") {
  Bits52 first;
  first.set(0);
  Bits52 last;
  last.set(51);
  const auto key = window_key(std::vector<Bits52>{first, Bits52{}, Bits52{}, last});
  CHECK(key.bytes.front() == 0x80);
  CHECK(key.bytes.back() == 0x01);
}

TEST_CASE("bandit_predict") {
  Rng rng(1);
  BanditTable greedy(0.0);
  Rng krng(2);
  const WindowKey k = random_key(krng);
  const auto p = bandit_predict(greedy, k, rng);
  CHECK(p.kind == AdversaryKind::Meander);
  CHECK_FALSE(p.explored);
  CHECK(greedy.known(k));
  CHECK(greedy.find(k)->n == std::array<std::uint64_t, 3>{0, 0, 0});

  greedy.ensure(k).q = {-1.0, 1.0, -1.0};
  CHECK(bandit_predict(greedy, k, rng).kind == AdversaryKind::BLine);

  BanditTable explore(1.0);
  std::map<AdversaryKind, std::size_t> counts;
  for (int i = 0; i < 30000; ++i) {
    const auto q = bandit_predict(explore, k, rng);
    CHECK(q.explored);
    ++counts[q.kind];
  }
  for (auto kind : kAllAdversaries) {
    CHECK(counts[kind] > 9400);  // 1/3 +- 2%
    CHECK(counts[kind] < 10600);
  }
}

TEST_CASE("bandit_update examples") {
  BanditTable t(0.0);
  const WindowKey k{};
  CHECK_THROWS_AS(bandit_update(t, k, 0, 1.0), ControllerError);
  t.ensure(k);
  bandit_update(t, k, 1, 1.0);
  CHECK(t.find(k)->q[1] == 1.0);
  CHECK(t.find(k)->n[1] == 1);
  bandit_update(t, k, 1, -1.0);
  CHECK(t.find(k)->q[1] == 0.0);
  CHECK(t.find(k)->n[1] == 2);
  CHECK(t.find(k)->q[0] == 0.0);
  CHECK(t.find(k)->n[0] == 0);
  for (int i = 0; i < 17; ++i) bandit_update(t, k, 2, 1.0);
  CHECK(t.find(k)->q[2] == 1.0);
  CHECK_THROWS_AS(bandit_update(t, k, 3, 1.0), ControllerError);
  CHECK_THROWS_AS(bandit_update(t, k, -1, 1.0), ControllerError);
}

TEST_CASE("update is the running sample average") {
  Rng rng(31337);
  for (int seq = 0; seq < 10000; ++seq) {
    BanditTable t(0.0);
    std::vector<WindowKey> keys{random_key(rng), random_key(rng)};
    std::map<std::pair<std::size_t, int>, std::vector<double>> applied;
    for (auto& k : keys) t.ensure(k);
    const std::size_t len = 1 + rng.below(60);
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t ki = rng.below(keys.size());
      const int a = static_cast<int>(rng.below(3));
      const double r = rng.below(2) ? 1.0 : -1.0;
      bandit_update(t, keys[ki], a, r);
      applied[{ki, a}].push_back(r);
    }
    for (std::size_t ki = 0; ki < keys.size(); ++ki) {
      const BanditEntry& e = *t.find(keys[ki]);
      for (int a = 0; a < 3; ++a) {
        const auto& rs = applied[{ki, a}];
        REQUIRE(e.n[a] == rs.size());
        REQUIRE(e.q[a] >= -1.0);
        REQUIRE(e.q[a] <= 1.0);
        if (rs.empty()) {
          REQUIRE(e.q[a] == 0.0);
        } else {
          REQUIRE(std::abs(e.q[a] - oracle::mean(rs)) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("argmax is invariant under uniform shifts") {
  Rng rng(8);
  for (int i = 0; i < 10000; ++i) {
    std::array<double, 3> q{};
    for (auto& v : q) v = (static_cast<double>(rng.below(9)) - 4.0) / 4.0;
    const double shift = (static_cast<double>(rng.below(65)) - 32.0) / 8.0;
    std::array<double, 3> shifted = q;
    for (auto& v : shifted) v += shift;
    REQUIRE(argmax_lowest(q) == argmax_lowest(shifted));
  }
  CHECK(argmax_lowest({0.0, 0.0, 0.0}) == 0);
  CHECK(argmax_lowest({0.0, 1.0, 1.0}) == 1);
}

TEST_CASE("training") {
  // A toy source: each kind has one fixed window.
  const WindowSource source = [](AdversaryKind kind, std::uint64_t) {
    std::vector<Bits52> w(4);
    if (kind == AdversaryKind::BLine) w[1] = active({{1, Activity::Scanned}});
    if (kind == AdversaryKind::Meander) w[1] = active({{1, Activity::Scanned}, {2, Activity::Scanned}});
    return w;
  };
  CHECK_THROWS_AS(bandit_train(source, 0, 0.01, 1), ControllerError);
  CHECK_THROWS_AS(bandit_train(source, 10, 1.5, 1), ControllerError);
  const BanditTable t = bandit_train(source, 15000, 0.01, 1);
  CHECK(t.size() == 3);
  for (auto kind : kAllAdversaries) {
    CHECK(adversary_from_action(t.greedy_action(window_key(source(kind, 0)))) == kind);
  }
  std::uint64_t total = 0;
  for (const auto& [key, e] : t.entries()) {
    for (int a = 0; a < 3; ++a) {
      CHECK(e.q[a] >= -1.0);
      CHECK(e.q[a] <= 1.0);
      total += e.n[a];
    }
  }
  CHECK(total == 15000 / 4);
  CHECK(bandit_train(source, 15000, 0.01, 1) == t);
}

TEST_CASE("merge weights by counts") {
  Rng rng(3);
  const WindowKey shared = random_key(rng), only_a = random_key(rng), only_b = random_key(rng);
  BanditTable a(0.01), b(0.01);
  for (const auto& k : {shared, only_a}) a.ensure(k);
  for (const auto& k : {shared, only_b}) b.ensure(k);
  bandit_update(a, shared, 0, 1.0);
  bandit_update(a, shared, 0, 1.0);
  bandit_update(a, shared, 0, -1.0);
  bandit_update(b, shared, 0, -1.0);
  bandit_update(a, only_a, 1, 1.0);
  bandit_update(b, only_b, 2, -1.0);
  const BanditTable m = merge(a, b);
  CHECK(m.size() == 3);
  CHECK(m.find(shared)->n[0] == 4);
  CHECK(m.find(shared)->q[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(*m.find(only_a) == *a.find(only_a));
  CHECK(*m.find(only_b) == *b.find(only_b));
}

TEST_CASE("heuristic examples") {
  const Bits52 z;
  const Bits52 u1s = active({{1, Activity::Scanned}});
  const Bits52 u2s = active({{2, Activity::Scanned}});
  const Bits52 u1e = active({{1, Activity::Exploited}});
  CHECK(heuristic_predict(std::vector<Bits52>{z, u1s, u2s, z}) == AdversaryKind::Meander);
  CHECK(heuristic_predict(std::vector<Bits52>{z, u1s, u1e, z}) == AdversaryKind::BLine);
  CHECK(heuristic_predict(std::vector<Bits52>(4)) == AdversaryKind::BLine);
  CHECK_THROWS_AS(heuristic_predict(std::vector<Bits52>(3)), ControllerError);
  CHECK_THROWS_AS(heuristic_predict(std::vector<Bits52>(5)), ControllerError);
}

TEST_CASE("heuristic depends only on the number of distinct active hosts") {
  Rng rng(12);
  for (int i = 0; i < 2000; ++i) {
    std::vector<Bits52> w(4);
    std::set<std::size_t> hosts;
    for (auto& obs : w) {
      Knowledge k{};
      for (std::size_t h = 0; h < 13; ++h) {
        if (rng.below(8) == 0) {
          k[h].activity = rng.below(2) ? Activity::Scanned : Activity::Exploited;
          hosts.insert(h);
        }
        k[h].access = static_cast<Access>(rng.below(3));
      }
      obs = encode_bits52(k);
    }
    const auto expected = hosts.size() >= 2 ? AdversaryKind::Meander : AdversaryKind::BLine;
    REQUIRE(heuristic_predict(w) == expected);
  }
}

TEST_CASE("table JSON round-trip") {
  Rng rng(4);
  BanditTable t(0.01);
  for (int i = 0; i < 5; ++i) {
    const auto k = random_key(rng);
    t.ensure(k);
    bandit_update(t, k, static_cast<int>(rng.below(3)), rng.below(2) ? 1.0 : -1.0);
  }
  const auto doc = to_json(t);
  CHECK(doc["format"] == "cyber-range-bandit-table");
  CHECK(doc["version"] == 1);
  CHECK(bandit_table_from_json(nlohmann::json::parse(doc.dump())) == t);
  auto bad = doc;
  bad["version"] = 2;
  CHECK_THROWS_AS(bandit_table_from_json(bad), ConfigError);
  bad = doc;
  bad.erase("entries");
  CHECK_THROWS_AS(bandit_table_from_json(bad), ConfigError);
}

TEST_CASE("classifiers") {
  const std::vector<Bits52> w(4);
  CHECK(HeuristicClassifier().classify(w) == AdversaryKind::BLine);
  CHECK(ConstantClassifier(AdversaryKind::Meander).classify(w) == AdversaryKind::Meander);
  auto table = std::make_shared<BanditTable>(0.0);
  table->ensure(window_key(w)).q = {0.0, -1.0, 1.0};
  CHECK(BanditClassifier(table).classify(w) == AdversaryKind::UserBenign);
}
