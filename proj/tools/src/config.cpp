#include "harqmac_app/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fmt/format.h>
#include <set>
#include <sstream>

#include "harqmac/error.hpp"
#include "harqmac/simulator.hpp"

namespace harqmac::app {
namespace {

namespace pt = boost::property_tree;

template <typename T>
T read_value(const pt::ptree& node, const std::string& key, const std::string& section) {
  try {
    return node.get_value<T>();
  } catch (const pt::ptree_bad_data&) {
    throw ConfigError(fmt::format("config [{}]: malformed value '{}' for '{}'", section,
                                  node.data(), key));
  }
}

bool read_bool(const pt::ptree& node, const std::string& key, const std::string& section) {
  std::string text = node.data();
  std::transform(text.begin(), text.end(), text.begin(), ::tolower);
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(fmt::format("config [{}]: '{}' must be a boolean, got '{}'", section, key,
                                node.data()));
}

void read_sweep_section(const pt::ptree& section, SweepConfig& cfg) {
  const std::string name = "sweep";
  for (const auto& [key, node] : section) {
    if (key == "snr_from") cfg.snr_from = read_value<double>(node, key, name);
    else if (key == "snr_to") cfg.snr_to = read_value<double>(node, key, name);
    else if (key == "snr_step") cfg.snr_step = read_value<double>(node, key, name);
    else if (key == "policies") cfg.policies = parse_policy_list(node.data());
    else if (key == "users") cfg.users = read_value<int>(node, key, name);
    else if (key == "attempts") cfg.attempts = read_value<int>(node, key, name);
    else if (key == "levels") cfg.levels = read_value<int>(node, key, name);
    else if (key == "slots") cfg.slots = read_value<std::int64_t>(node, key, name);
    else if (key == "seed") cfg.seed = read_value<std::uint64_t>(node, key, name);
    else if (key == "convention") cfg.convention = parse_power_convention(node.data());
    else if (key == "simulate") cfg.simulate = read_bool(node, key, name);
    else if (key == "threads") cfg.threads = read_value<int>(node, key, name);
    else if (key == "output") cfg.output = node.data();
    else if (key == "early_shortfall") cfg.early_shortfall = parse_shortfall(node.data());
    else if (key == "final_shortfall") cfg.final_shortfall = parse_shortfall(node.data());
    else throw ConfigError(fmt::format("config [sweep]: unknown key '{}'", key));
  }
}

void read_policy_section(const std::string& name, const pt::ptree& section, SweepConfig& cfg) {
  const PolicyKind kind = parse_policy(name);
  PolicyOverride& o = cfg.overrides[kind];
  for (const auto& [key, node] : section) {
    if (key == "attempts") o.attempts = read_value<int>(node, key, name);
    else if (key == "levels") o.levels = read_value<int>(node, key, name);
    else throw ConfigError(fmt::format("config [{}]: unknown key '{}'", name, key));
  }
}

}  // namespace

void SweepConfig::validate() const {
  if (!std::isfinite(snr_from) || !std::isfinite(snr_to) || !(snr_from <= snr_to)) {
    throw ConfigError(fmt::format("sweep: need snr_from <= snr_to, got {} > {}", snr_from, snr_to));
  }
  if (!(snr_step > 0.0)) throw ConfigError("sweep: snr_step must be > 0");
  if (slots < kMinSimulationSlots) {
    throw ConfigError(fmt::format("sweep: slots must be >= {}", kMinSimulationSlots));
  }
  if (users < 1) throw ConfigError("sweep: users must be >= 1");
  if (attempts < 1 || levels < 1) throw ConfigError("sweep: attempts and levels must be >= 1");
  if (threads < 0) throw ConfigError("sweep: threads must be >= 0");
  if (policies.empty()) throw ConfigError("sweep: empty policy list");
  for (const auto& [kind, o] : overrides) {
    if ((o.attempts && *o.attempts < 1) || (o.levels && *o.levels < 1)) {
      throw ConfigError(fmt::format("sweep: [{}] attempts and levels must be >= 1", policy_name(kind)));
    }
  }
}

std::vector<double> SweepConfig::snr_grid() const {
  const auto count = static_cast<int>(std::floor((snr_to - snr_from) / snr_step + 1e-9)) + 1;
  std::vector<double> grid;
  for (int i = 0; i < count; ++i) grid.push_back(snr_from + i * snr_step);
  return grid;
}

int SweepConfig::attempts_for(PolicyKind kind) const {
  if (kind != PolicyKind::CdTdmaAlo && kind != PolicyKind::CdTdmaInr) return 1;
  const auto it = overrides.find(kind);
  return it != overrides.end() && it->second.attempts ? *it->second.attempts : attempts;
}

int SweepConfig::levels_for(PolicyKind kind) const {
  if (kind != PolicyKind::MultilevelCdTdma && kind != PolicyKind::CdTdmaInr) return 1;
  const auto it = overrides.find(kind);
  return it != overrides.end() && it->second.levels ? *it->second.levels : levels;
}

SweepConfig load_sweep_config(const std::string& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("cannot read config '{}': {}", path, e.message()));
  }
  SweepConfig cfg;
  for (const auto& [name, section] : tree) {
    if (section.empty() && !section.data().empty()) {
      throw ConfigError(fmt::format("config: key '{}' outside a section", name));
    }
    if (name == "sweep") {
      read_sweep_section(section, cfg);
    } else {
      read_policy_section(name, section, cfg);
    }
  }
  return cfg;
}

std::vector<PolicyKind> parse_policy_list(const std::string& text) {
  if (text == "all") return {std::begin(kAllPolicies), std::end(kAllPolicies)};
  std::vector<PolicyKind> out;
  std::set<PolicyKind> seen;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    const PolicyKind kind = parse_policy(item);
    if (seen.insert(kind).second) out.push_back(kind);
  }
  if (out.empty()) throw ConfigError("empty policy list");
  return out;
}

InrShortfall parse_shortfall(const std::string& text) {
  if (text == "silent") return InrShortfall::Silent;
  if (text == "send_top") return InrShortfall::SendTop;
  throw ConfigError(fmt::format("unknown shortfall rule '{}' (expected silent|send_top)", text));
}

std::string_view shortfall_name(InrShortfall rule) {
  return rule == InrShortfall::SendTop ? "send_top" : "silent";
}

}  // namespace harqmac::app
