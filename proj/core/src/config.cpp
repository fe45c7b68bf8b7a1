#include "sphwave/config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sphwave/io.hpp"

namespace sphwave {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"eos", {"builtin", "kind", "law", "K", "alpha", "A", "gamma", "taut1", "taut2", "table", "nu", "name"}},
      {"data", {"u0", "rho0", "tau0"}},
      {"controls",
       {"rtol", "atol", "eps_sonic", "eps_event", "eps_u", "rho_vac_rel", "s_max", "delta_switch", "max_steps",
        "dense_subsamples", "family_samples", "fit_tol", "max_depth"}},
      {"critical", {"lo", "hi", "tol", "s_classify"}},
      {"output", {"dir", "formats", "threads"}},
  };
  return keys;
}

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c); };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

double to_double(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  double v = 0.0;
  auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty()) {
    throw ConfigError(key + ": not a number: '" + text + "'");
  }
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  double v = to_double(key, text);
  if (v != static_cast<int>(v)) throw ConfigError(key + ": not an integer: '" + text + "'");
  return static_cast<int>(v);
}

// Comma separated values; an item lo:hi:n expands to n evenly spaced values.
std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (std::count(item.begin(), item.end(), ':') == 2) {
      auto a = item.find(':'), b = item.rfind(':');
      double lo = to_double(key, item.substr(0, a));
      double hi = to_double(key, item.substr(a + 1, b - a - 1));
      int n = to_int(key, item.substr(b + 1));
      if (n < 1) throw ConfigError(key + ": range count must be positive");
      for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    } else {
      out.push_back(to_double(key, item));
    }
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

void apply_override(pt::ptree& tree, const std::string& ov) {
  auto eq = ov.find('=');
  auto dot = ov.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ConfigError("override must read section.key=value: '" + ov + "'");
  }
  std::string path = trim(ov.substr(0, eq));
  tree.put(pt::ptree::path_type(path, '.'), trim(ov.substr(eq + 1)));
}

void check_keys(const pt::ptree& tree) {
  const auto& keys = known_keys();
  for (const auto& [section, body] : tree) {
    auto it = keys.find(section);
    if (it == keys.end()) throw ConfigError("unknown section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("value outside a section: " + section);
    for (const auto& [key, val] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
      (void)val;
    }
  }
}

EosSpec make_eos(const pt::ptree& e, const std::string& base_dir) {
  if (auto b = e.get_optional<std::string>("builtin")) {
    if (e.size() != 1) throw ConfigError("eos.builtin excludes every other eos key");
    return builtin_eos(trim(*b));
  }
  auto need = [&](const std::string& k) {
    auto v = e.get_optional<std::string>(k);
    if (!v) throw ConfigError("missing eos." + k);
    return *v;
  };
  auto num = [&](const std::string& k) { return to_double("eos." + k, need(k)); };
  EosKind kind;
  try {
    kind = eos_kind_from_string(trim(need("kind")));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& err) {
    throw ConfigError(std::string("eos.kind: ") + err.what());
  }
  std::string law = trim(need("law"));
  PressureLaw pl;
  if (law == "power") {
    pl = PowerLaw{num("K"), num("alpha")};
  } else if (law == "vdw") {
    pl = VanDerWaals{num("A"), num("gamma")};
  } else if (law == "plateau") {
    double t2 = e.get_optional<std::string>("taut2") ? num("taut2") : 0.0;
    pl = MaxwellPlateau{VanDerWaals{num("A"), num("gamma")}, num("taut1"), t2};
  } else if (law == "table") {
    std::filesystem::path p = trim(need("table"));
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    pl = TabulatedLaw::from_csv(p.string());
  } else {
    throw ConfigError("eos.law must be power, vdw, plateau or table, got '" + law + "'");
  }
  double nu = e.get_optional<std::string>("nu") ? num("nu") : 0.5;
  try {
    return EosSpec::make(kind, std::move(pl), nu, e.get<std::string>("name", law));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& err) {
    throw ConfigError(std::string("eos rejected: ") + err.what());
  }
}

}  // namespace

bool RunConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

EosSpec builtin_eos(const std::string& name) {
  if (name == "convex_power") return builtin::convex_power();
  if (name == "inflected_vdw") return builtin::inflected_vdw();
  if (name == "plateau_vdw") return builtin::plateau_vdw();
  throw ConfigError("unknown builtin law '" + name + "'");
}

RunConfig parse_config(const std::string& ini_text, const std::vector<std::string>& overrides,
                       const std::string& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(ini_text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.message() + " at line " + std::to_string(e.line()));
  }
  try {
    for (const auto& ov : overrides) apply_override(tree, ov);
  } catch (const pt::ptree_error& e) {
    throw ConfigError(std::string("override: ") + e.what());
  }
  check_keys(tree);

  RunConfig cfg;
  auto eos = tree.get_child_optional("eos");
  if (!eos) throw ConfigError("missing [eos] section");
  cfg.eos = make_eos(*eos, base_dir);

  auto data = tree.get_child("data", pt::ptree());
  auto u0 = data.get_optional<std::string>("u0");
  if (!u0) throw ConfigError("missing data.u0");
  cfg.u0 = to_list("data.u0", *u0);
  auto rho = data.get_optional<std::string>("rho0");
  auto tau = data.get_optional<std::string>("tau0");
  if (rho && tau) throw ConfigError("give data.rho0 or data.tau0, not both");
  if (rho) {
    cfg.rho0 = to_list("data.rho0", *rho);
  } else if (tau) {
    for (double t : to_list("data.tau0", *tau)) cfg.rho0.push_back(1.0 / t);
  } else {
    throw ConfigError("missing data.rho0");
  }
  for (double r : cfg.rho0) {
    if (!(r > 0) || !cfg.eos.in_domain(1.0 / r)) throw ConfigError("data.rho0 outside the law's domain");
  }

  nlohmann::json cj = nlohmann::json::object();
  const pt::ptree controls = tree.get_child("controls", pt::ptree());
  for (const auto& [key, val] : controls) {
    std::string name = "controls." + key;
    if (key == "max_steps" || key == "dense_subsamples" || key == "family_samples" || key == "max_depth") {
      cj[key] = to_int(name, val.data());
    } else {
      cj[key] = to_double(name, val.data());
    }
  }
  cfg.controls = controls_from_json(cj);
  const auto& o = cfg.controls.ode;
  for (double v : {o.rtol, o.atol, o.eps_sonic, o.eps_event, o.eps_u, o.rho_vac_rel, o.s_max, o.delta_switch,
                   cfg.controls.fit_tol}) {
    if (!(v > 0)) throw ConfigError("every tolerance and s_max must be positive");
  }
  if (o.max_steps < 1 || o.dense_subsamples < 1 || cfg.controls.family_samples < 3 || cfg.controls.max_depth < 0) {
    throw ConfigError("step, sample and depth counts out of range");
  }

  auto crit = tree.get_child("critical", pt::ptree());
  auto cnum = [&](const char* k, double dflt) {
    auto v = crit.get_optional<std::string>(k);
    return v ? to_double(std::string("critical.") + k, *v) : dflt;
  };
  cfg.critical.lo = cnum("lo", cfg.critical.lo);
  cfg.critical.hi = cnum("hi", cfg.critical.hi);
  cfg.critical.tol = cnum("tol", cfg.critical.tol);
  cfg.critical.s_classify = cnum("s_classify", cfg.critical.s_classify);
  if (!(cfg.critical.tol > 0) || !(cfg.critical.s_classify > 0)) throw ConfigError("critical settings must be positive");

  auto out = tree.get_child("output", pt::ptree());
  cfg.output_dir = trim(out.get<std::string>("dir", ""));
  std::string formats = out.get<std::string>("formats", "json,csv,txt");
  std::stringstream fs(formats);
  std::string f;
  while (std::getline(fs, f, ',')) {
    f = trim(f);
    if (f.empty()) continue;
    if (f != "json" && f != "csv" && f != "txt" && f != "svg") throw ConfigError("unknown output format '" + f + "'");
    cfg.formats.push_back(f);
  }
  if (auto t = out.get_optional<std::string>("threads")) cfg.threads = to_int("output.threads", *t);
  if (cfg.threads < 0) throw ConfigError("output.threads must be non-negative");
  return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::string text = read_file(path);
  auto dir = std::filesystem::path(path).parent_path();
  return parse_config(text, overrides, dir.empty() ? "." : dir.string());
}

}  // namespace sphwave
