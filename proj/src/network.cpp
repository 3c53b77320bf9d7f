#include "cyber_range/network.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <map>

#include "cyber_range/error.hpp"

namespace cyber_range {
namespace {

constexpr std::string_view kTopologyDocument =
#include "default_topology.inc"
    ;

constexpr std::array<std::pair<HostKind, std::string_view>, 5> kKindNames{{
    {HostKind::UserHost, "UserHost"},
    {HostKind::EnterpriseServer, "EnterpriseServer"},
    {HostKind::DefenderMachine, "DefenderMachine"},
    {HostKind::OperationalHost, "OperationalHost"},
    {HostKind::OperationalServer, "OperationalServer"},
}};

struct KindLayout {
  HostKind kind;
  int subnet;
  int count;
};

// Canonical order of host kinds; the observation bit layout follows it.
constexpr std::array<KindLayout, 5> kLayout{{
    {HostKind::UserHost, 1, 5},
    {HostKind::EnterpriseServer, 2, 3},
    {HostKind::DefenderMachine, 2, 1},
    {HostKind::OperationalHost, 3, 3},
    {HostKind::OperationalServer, 3, 1},
}};

void validate_layout(const std::vector<HostSpec>& hosts) {
  if (hosts.size() != kHostCount) {
    throw TopologyError("topology must have exactly " + std::to_string(kHostCount) + " hosts, got " +
                        std::to_string(hosts.size()));
  }
  std::size_t i = 0;
  for (const auto& group : kLayout) {
    for (int n = 0; n < group.count; ++n, ++i) {
      const auto& h = hosts[i];
      if (h.kind != group.kind || h.subnet != group.subnet) {
        throw TopologyError("host " + std::to_string(i) + " (" + h.name + ") breaks canonical order: expected " +
                            std::string(to_string(group.kind)) + " in subnet " + std::to_string(group.subnet));
      }
    }
  }
}

}  // namespace

std::string_view to_string(HostKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

HostKind host_kind_from_string(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  throw TopologyError("unknown host kind '" + std::string(text) + "'");
}

Network::Network(std::vector<SubnetSpec> subnets, std::vector<HostSpec> hosts,
                 std::set<std::pair<int, int>> firewall, std::string foothold,
                 std::vector<DecoySpec> decoy_catalogue)
    : subnets_(std::move(subnets)),
      hosts_(std::move(hosts)),
      firewall_(std::move(firewall)),
      decoys_(std::move(decoy_catalogue)) {
  if (subnets_.size() != static_cast<std::size_t>(kSubnetCount)) {
    throw TopologyError("topology must have exactly 3 subnets");
  }
  for (int s = 1; s <= kSubnetCount; ++s) {
    if (subnets_[s - 1].id != s) throw TopologyError("subnets must be listed with ids 1, 2, 3 in order");
  }
  validate_layout(hosts_);

  std::set<std::string> names;
  for (const auto& h : hosts_) {
    if (!names.insert(h.name).second) throw TopologyError("duplicate hostname " + h.name);
    if (h.services.empty()) throw TopologyError("host " + h.name + " exposes no services");
    std::set<int> ports;
    for (const auto& svc : h.services) {
      if (!ports.insert(svc.port).second) {
        throw TopologyError("host " + h.name + " repeats port " + std::to_string(svc.port));
      }
    }
  }
  for (const auto& [a, b] : firewall_) {
    if (a < 1 || a > kSubnetCount || b < 1 || b > kSubnetCount) {
      throw TopologyError("firewall rule references unknown subnet");
    }
  }
  if (firewall_.contains({1, 3})) throw TopologyError("firewall must not permit subnet 1 -> subnet 3");

  std::set<std::string> decoy_ids;
  for (const auto& d : decoys_) {
    if (!decoy_ids.insert(d.id).second) throw TopologyError("duplicate decoy id " + d.id);
  }

  foothold_ = index_of(foothold);
  if (hosts_[foothold_].kind != HostKind::UserHost) throw TopologyError("foothold must be a user host");
  op_server_ = kHostCount - 1;
}

HostId Network::index_of(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw TopologyError("unknown host '" + std::string(name) + "'");
}

std::optional<HostId> Network::find(std::string_view name) const {
  for (HostId i = 0; i < hosts_.size(); ++i) {
    if (hosts_[i].name == name) return i;
  }
  return std::nullopt;
}

const SubnetSpec& Network::subnet(int id) const {
  if (id < 1 || id > kSubnetCount) throw TopologyError("unknown subnet " + std::to_string(id));
  return subnets_[id - 1];
}

std::vector<HostId> Network::hosts_in_subnet(int subnet) const {
  std::vector<HostId> out;
  for (HostId i = 0; i < hosts_.size(); ++i) {
    if (hosts_[i].subnet == subnet) out.push_back(i);
  }
  return out;
}

bool Network::firewall_permits(int from_subnet, int to_subnet) const {
  return firewall_.contains({from_subnet, to_subnet});
}

bool Network::reachable(HostId src, HostId dst) const {
  const auto& s = hosts_.at(src);
  const auto& d = hosts_.at(dst);
  if (src == dst) return true;
  if (!firewall_permits(s.subnet, d.subnet)) return false;
  if (d.kind == HostKind::OperationalServer) {
    return s.kind == HostKind::OperationalHost || s.kind == HostKind::OperationalServer;
  }
  return true;
}

bool Network::reachable(std::string_view src, std::string_view dst) const {
  return reachable(index_of(src), index_of(dst));
}

bool Network::is_server(HostId id) const {
  switch (hosts_.at(id).kind) {
    case HostKind::EnterpriseServer:
    case HostKind::OperationalHost:
    case HostKind::OperationalServer:
      return true;
    default:
      return false;
  }
}

const DecoySpec* Network::find_decoy(std::string_view id) const {
  for (const auto& d : decoys_) {
    if (d.id == id) return &d;
  }
  return nullptr;
}

const Network& default_topology() {
  static const Network net = network_from_json(nlohmann::json::parse(kTopologyDocument));
  return net;
}

std::string_view default_topology_document() { return kTopologyDocument; }

Network network_from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("format", "") != "cyber-range-topology") {
      throw TopologyError("topology: expected format \"cyber-range-topology\"");
    }
    if (doc.value("version", 0) != 1) throw TopologyError("topology: unsupported version");

    std::vector<SubnetSpec> subnets;
    for (const auto& s : doc.at("subnets")) {
      subnets.push_back({s.at("id").get<int>(), s.at("name").get<std::string>()});
    }
    std::set<std::pair<int, int>> firewall;
    for (const auto& rule : doc.at("firewall")) {
      firewall.emplace(rule.at(0).get<int>(), rule.at(1).get<int>());
    }
    std::vector<DecoySpec> decoys;
    if (doc.contains("decoy_catalogue")) {
      for (const auto& d : doc.at("decoy_catalogue")) {
        decoys.push_back({d.at("id").get<std::string>(), d.at("port").get<int>()});
      }
    }
    std::vector<HostSpec> hosts;
    for (const auto& h : doc.at("hosts")) {
      HostSpec spec;
      spec.name = h.at("name").get<std::string>();
      spec.subnet = h.at("subnet").get<int>();
      spec.kind = host_kind_from_string(h.at("kind").get<std::string>());
      for (const auto& svc : h.at("services")) {
        spec.services.push_back(
            {svc.at("port").get<int>(), svc.at("id").get<std::string>(), svc.value("exploitable", false)});
      }
      hosts.push_back(std::move(spec));
    }
    return Network(std::move(subnets), std::move(hosts), std::move(firewall),
                   doc.at("foothold").get<std::string>(), std::move(decoys));
  } catch (const nlohmann::json::exception& e) {
    throw TopologyError(std::string("topology: ") + e.what());
  }
}

nlohmann::json to_json(const Network& net) {
  nlohmann::json doc;
  doc["format"] = "cyber-range-topology";
  doc["version"] = 1;
  doc["subnets"] = nlohmann::json::array();
  for (const auto& s : net.subnets()) doc["subnets"].push_back({{"id", s.id}, {"name", s.name}});
  doc["firewall"] = nlohmann::json::array();
  for (const auto& [a, b] : net.firewall()) doc["firewall"].push_back({a, b});
  doc["foothold"] = net.host(net.foothold()).name;
  doc["decoy_catalogue"] = nlohmann::json::array();
  for (const auto& d : net.decoy_catalogue()) doc["decoy_catalogue"].push_back({{"id", d.id}, {"port", d.port}});
  doc["hosts"] = nlohmann::json::array();
  for (const auto& h : net.hosts()) {
    nlohmann::json services = nlohmann::json::array();
    for (const auto& svc : h.services) {
      services.push_back({{"port", svc.port}, {"id", svc.id}, {"exploitable", svc.exploitable}});
    }
    doc["hosts"].push_back(
        {{"name", h.name}, {"subnet", h.subnet}, {"kind", std::string(to_string(h.kind))}, {"services", services}});
  }
  return doc;
}

std::string Address::to_string() const {
  return std::to_string(value >> 24) + "." + std::to_string((value >> 16) & 0xFF) + "." +
         std::to_string((value >> 8) & 0xFF) + "." + std::to_string(value & 0xFF);
}

Address Address::parse(std::string_view dotted) {
  std::uint32_t out = 0;
  const char* p = dotted.data();
  const char* end = dotted.data() + dotted.size();
  for (int octet = 0; octet < 4; ++octet) {
    unsigned v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc{} || v > 255) throw ResolutionError("malformed address '" + std::string(dotted) + "'");
    out = (out << 8) | v;
    p = next;
    if (octet < 3) {
      if (p == end || *p != '.') throw ResolutionError("malformed address '" + std::string(dotted) + "'");
      ++p;
    }
  }
  if (p != end) throw ResolutionError("malformed address '" + std::string(dotted) + "'");
  return Address{out};
}

AddressBook AddressBook::generate(const Network& net, Rng& rng) {
  AddressBook book;
  std::vector<std::uint32_t> third_octets;
  for (int s = 0; s < kSubnetCount; ++s) {
    std::uint32_t octet = 0;
    do {
      octet = 1 + static_cast<std::uint32_t>(rng.below(254));
    } while (std::find(third_octets.begin(), third_octets.end(), octet) != third_octets.end());
    third_octets.push_back(octet);
    book.subnet_prefixes_.push_back((10u << 24) | (octet << 8));
  }
  std::map<int, std::set<std::uint32_t>> used;
  for (const auto& h : net.hosts()) {
    std::uint32_t last = 0;
    do {
      last = 1 + static_cast<std::uint32_t>(rng.below(254));
    } while (used[h.subnet].contains(last));
    used[h.subnet].insert(last);
    book.names_.push_back(h.name);
    book.host_addresses_.push_back(Address{book.subnet_prefixes_[h.subnet - 1] | last});
  }
  return book;
}

std::string AddressBook::subnet_cidr(int subnet) const {
  return Address{subnet_prefixes_.at(subnet - 1)}.to_string() + "/24";
}

std::optional<HostId> AddressBook::find(Address addr) const {
  for (HostId i = 0; i < host_addresses_.size(); ++i) {
    if (host_addresses_[i] == addr) return i;
  }
  return std::nullopt;
}

HostId AddressBook::resolve_id(Address addr) const {
  if (auto id = find(addr)) return *id;
  throw ResolutionError("address " + addr.to_string() + " was not issued in this episode");
}

const std::string& AddressBook::resolve(Address addr) const { return names_[resolve_id(addr)]; }

int AddressBook::resolve_subnet(std::string_view cidr) const {
  for (std::size_t i = 0; i < subnet_prefixes_.size(); ++i) {
    if (subnet_cidr(static_cast<int>(i) + 1) == cidr) return static_cast<int>(i) + 1;
  }
  throw ResolutionError("subnet range " + std::string(cidr) + " was not issued in this episode");
}

}  // namespace cyber_range
