#include <set>

#include "cyber_range/error.hpp"
#include "cyber_range/network.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cyber_range;

TEST_CASE("default topology has the canonical layout") {
  const Network& net = default_topology();
  REQUIRE(net.hosts().size() == 13);
  CHECK(net.subnets().size() == 3);
  for (std::size_t i = 0; i < 13; ++i) CHECK(net.host(i).name == oracle::kHostNames[i]);
  int users = 0, enterprise = 0, defender = 0, ophosts = 0, opserver = 0;
  for (const auto& h : net.hosts()) {
    switch (h.kind) {
      case HostKind::UserHost: ++users; CHECK(h.subnet == 1); break;
      case HostKind::EnterpriseServer: ++enterprise; CHECK(h.subnet == 2); break;
      case HostKind::DefenderMachine: ++defender; CHECK(h.subnet == 2); break;
      case HostKind::OperationalHost: ++ophosts; CHECK(h.subnet == 3); break;
      case HostKind::OperationalServer: ++opserver; CHECK(h.subnet == 3); break;
    }
  }
  CHECK(users == 5);
  CHECK(enterprise == 3);
  CHECK(defender == 1);
  CHECK(ophosts == 3);
  CHECK(opserver == 1);
  CHECK(net.host(net.foothold()).name == "User0");
  CHECK(net.host(net.op_server()).name == "OpServer");
}

TEST_CASE("firewall rules") {
  const Network& net = default_topology();
  const std::set<std::pair<int, int>> expected{{1, 1}, {1, 2}, {2, 1}, {2, 2}, {2, 3}, {3, 2}, {3, 3}};
  CHECK(net.firewall() == expected);
}

TEST_CASE("every host exposes services on unique ports") {
  for (const auto& h : default_topology().hosts()) {
    CHECK(!h.services.empty());
    std::set<int> ports;
    for (const auto& s : h.services) CHECK(ports.insert(s.port).second);
  }
}

TEST_CASE("reachability examples") {
  const Network& net = default_topology();
  CHECK_FALSE(net.reachable("User0", "OpServer"));
  CHECK(net.reachable("OpHost0", "OpServer"));
  CHECK(net.reachable("User1", "Enterprise0"));
  CHECK_FALSE(net.reachable("User1", "OpHost0"));
  for (const auto& h : net.hosts()) CHECK(net.reachable(h.name, h.name));
  CHECK_THROWS_AS(net.reachable("User9", "User0"), TopologyError);
}

TEST_CASE("reachability invariants") {
  const Network& net = default_topology();
  for (HostId u = 0; u < kHostCount; ++u) {
    for (HostId v = 0; v < kHostCount; ++v) {
      if (net.host(u).subnet == 1 && net.host(v).subnet == 3) CHECK_FALSE(net.reachable(u, v));
      const auto kind = net.host(u).kind;
      if (v == net.op_server() && kind != HostKind::OperationalHost && kind != HostKind::OperationalServer) {
        CHECK_FALSE(net.reachable(u, v));
      }
      // Independent rule check.
      const bool subnet_ok = net.firewall().contains({net.host(u).subnet, net.host(v).subnet});
      const bool server_ok = v != 12 || (u >= 9 && u <= 12);
      CHECK(net.reachable(u, v) == (u == v || (subnet_ok && server_ok)));
    }
  }
}

TEST_CASE("default topology is deterministic and round-trips through JSON") {
  CHECK(network_from_json(nlohmann::json::parse(default_topology_document())) == default_topology());
  CHECK(network_from_json(to_json(default_topology())) == default_topology());
}

TEST_CASE("topology validation rejects broken documents") {
  const auto base = to_json(default_topology());
  SUBCASE("subnet 1 to subnet 3 rule") {
    auto doc = base;
    doc["firewall"].push_back({1, 3});
    CHECK_THROWS_AS(network_from_json(doc), TopologyError);
  }
  SUBCASE("duplicate port") {
    auto doc = base;
    doc["hosts"][0]["services"].push_back(doc["hosts"][0]["services"][0]);
    CHECK_THROWS_AS(network_from_json(doc), TopologyError);
  }
  SUBCASE("host without services") {
    auto doc = base;
    doc["hosts"][3]["services"] = nlohmann::json::array();
    CHECK_THROWS_AS(network_from_json(doc), TopologyError);
  }
  SUBCASE("foothold outside subnet 1") {
    auto doc = base;
    doc["foothold"] = "Enterprise0";
    CHECK_THROWS_AS(network_from_json(doc), TopologyError);
  }
  SUBCASE("missing host") {
    auto doc = base;
    doc["hosts"].erase(doc["hosts"].begin() + 4);
    CHECK_THROWS_AS(network_from_json(doc), TopologyError);
  }
  SUBCASE("malformed field") {
    auto doc = base;
    doc["hosts"][0]["subnet"] = "one";
    CHECK_THROWS_AS(network_from_json(doc), TopologyError);
  }
}

TEST_CASE("address resolution") {
  const Network& net = default_topology();
  Rng r1(1), r2(2);
  const auto a = AddressBook::generate(net, r1);
  const auto b = AddressBook::generate(net, r2);
  std::set<Address> distinct;
  for (HostId i = 0; i < kHostCount; ++i) {
    CHECK(a.resolve(a.address_of(i)) == net.host(i).name);
    CHECK(b.resolve(b.address_of(i)) == net.host(i).name);
    distinct.insert(a.address_of(i));
  }
  CHECK(distinct.size() == kHostCount);
  CHECK(a.resolve(a.address_of(net.op_server())) == "OpServer");
  int differing = 0;
  for (HostId i = 0; i < kHostCount; ++i) differing += a.address_of(i) != b.address_of(i);
  CHECK(differing > 0);
  for (int s = 1; s <= 3; ++s) CHECK(a.resolve_subnet(a.subnet_cidr(s)) == s);

  Address unissued{0};
  while (a.find(unissued)) ++unissued.value;
  CHECK_THROWS_AS(a.resolve(unissued), ResolutionError);
}

TEST_CASE("address text form round-trips") {
  const auto a = Address::parse("10.0.7.200");
  CHECK(a.to_string() == "10.0.7.200");
  CHECK_THROWS_AS(Address::parse("10.0.7"), Error);
  CHECK_THROWS_AS(Address::parse("10.0.7.300"), Error);
}
