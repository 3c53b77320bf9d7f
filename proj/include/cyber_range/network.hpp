#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cyber_range/rng.hpp"

namespace cyber_range {

/// Index of a host in the network's canonical order.
using HostId = std::size_t;

inline constexpr std::size_t kHostCount = 13;
inline constexpr int kSubnetCount = 3;

enum class HostKind { UserHost, EnterpriseServer, DefenderMachine, OperationalHost, OperationalServer };

std::string_view to_string(HostKind kind);
HostKind host_kind_from_string(std::string_view text);

struct ServiceSpec {
  int port = 0;
  std::string id;
  bool exploitable = false;

  bool operator==(const ServiceSpec&) const = default;
};

struct HostSpec {
  std::string name;
  int subnet = 0;
  HostKind kind = HostKind::UserHost;
  std::vector<ServiceSpec> services;

  bool operator==(const HostSpec&) const = default;
};

struct SubnetSpec {
  int id = 0;
  std::string name;

  bool operator==(const SubnetSpec&) const = default;
};

/// A honeypot service type the defender can deploy, with the port it binds.
struct DecoySpec {
  std::string id;
  int port = 0;

  bool operator==(const DecoySpec&) const = default;
};

/// Static plant network: subnets, hosts in canonical order, firewall rules.
///
/// The constructor enforces the fixed shape the observation layout relies on:
/// 13 hosts (5 user hosts in subnet 1; 3 enterprise servers and the defender
/// machine in subnet 2; 3 operational hosts and the operational server in
/// subnet 3), no subnet 1 -> subnet 3 rule, and a user-host foothold.
/// Immutable once built.
class Network {
 public:
  Network(std::vector<SubnetSpec> subnets, std::vector<HostSpec> hosts,
          std::set<std::pair<int, int>> firewall, std::string foothold,
          std::vector<DecoySpec> decoy_catalogue);

  const std::vector<HostSpec>& hosts() const { return hosts_; }
  const HostSpec& host(HostId id) const { return hosts_.at(id); }
  const std::vector<SubnetSpec>& subnets() const { return subnets_; }
  const std::set<std::pair<int, int>>& firewall() const { return firewall_; }
  const std::vector<DecoySpec>& decoy_catalogue() const { return decoys_; }

  HostId foothold() const { return foothold_; }
  HostId op_server() const { return op_server_; }

  /// Throws TopologyError for unknown names.
  HostId index_of(std::string_view name) const;
  std::optional<HostId> find(std::string_view name) const;

  const SubnetSpec& subnet(int id) const;
  std::vector<HostId> hosts_in_subnet(int subnet) const;
  bool firewall_permits(int from_subnet, int to_subnet) const;

  /// Subnet rule permits src -> dst, and the operational server is only
  /// reachable from operational hosts (or itself). Every host reaches itself.
  bool reachable(HostId src, HostId dst) const;
  bool reachable(std::string_view src, std::string_view dst) const;

  /// Enterprise servers, operational hosts and the operational server.
  bool is_server(HostId id) const;

  const DecoySpec* find_decoy(std::string_view id) const;

  bool operator==(const Network&) const = default;

 private:
  std::vector<SubnetSpec> subnets_;
  std::vector<HostSpec> hosts_;
  std::set<std::pair<int, int>> firewall_;
  std::vector<DecoySpec> decoys_;
  HostId foothold_ = 0;
  HostId op_server_ = 0;
};

/// The canonical 13-host plant network (embedded topology document).
const Network& default_topology();

/// The embedded topology document, verbatim.
std::string_view default_topology_document();

Network network_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const Network& net);

/// Synthetic IPv4 address token.
struct Address {
  std::uint32_t value = 0;

  std::string to_string() const;
  static Address parse(std::string_view dotted);

  auto operator<=>(const Address&) const = default;
};

/// Per-episode address bindings. Each subnet gets a random /24 and each host
/// a random final octet, so addresses differ between seeds while hostnames
/// stay fixed.
class AddressBook {
 public:
  AddressBook() = default;

  static AddressBook generate(const Network& net, Rng& rng);

  Address address_of(HostId id) const { return host_addresses_.at(id); }
  std::string subnet_cidr(int subnet) const;

  /// Hostname bound to `addr`. Throws ResolutionError for unissued addresses.
  const std::string& resolve(Address addr) const;
  HostId resolve_id(Address addr) const;
  std::optional<HostId> find(Address addr) const;
  /// Subnet id for a CIDR string issued by this book.
  int resolve_subnet(std::string_view cidr) const;

  bool operator==(const AddressBook&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<Address> host_addresses_;
  std::vector<std::uint32_t> subnet_prefixes_;
};

}  // namespace cyber_range
