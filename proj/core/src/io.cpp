#include "sphwave/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace sphwave {

using nlohmann::json;

namespace {

std::string num(double v, int digits = 17) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

json state_json(const State& s) { return {{"u", s.u}, {"rho", s.rho}}; }

State state_from(const json& j) { return {j.at("u").get<double>(), j.at("rho").get<double>()}; }

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed ") + what + ": " + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid ") + what + ": " + e.what());
  }
}

}  // namespace

json eos_to_json(const EosSpec& eos) {
  json j;
  j["kind"] = to_string(eos.kind());
  j["name"] = eos.name();
  j["nu"] = eos.nu();
  std::visit(
      [&](const auto& l) {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, PowerLaw>) {
          j["law"] = {{"name", "power"}, {"K", l.K}, {"alpha", l.alpha}};
        } else if constexpr (std::is_same_v<L, VanDerWaals>) {
          j["law"] = {{"name", "vdw"}, {"A", l.A}, {"gamma", l.gamma}};
        } else if constexpr (std::is_same_v<L, MaxwellPlateau>) {
          j["law"] = {{"name", "plateau"}, {"A", l.base.A}, {"gamma", l.base.gamma}, {"taut1", l.taut1},
                      {"taut2", *eos.landmarks().taut2}};
        } else {
          j["law"] = {{"name", "table"}, {"tau", l.tau}, {"p", l.p}, {"source", l.source}};
        }
      },
      eos.law());
  return j;
}

EosSpec eos_from_json(const json& j) {
  return guarded("eos", [&] {
    EosKind kind = eos_kind_from_string(j.at("kind").get<std::string>());
    const json& l = j.at("law");
    std::string name = l.at("name").get<std::string>();
    PressureLaw law;
    if (name == "power") {
      law = PowerLaw{l.at("K").get<double>(), l.at("alpha").get<double>()};
    } else if (name == "vdw") {
      law = VanDerWaals{l.at("A").get<double>(), l.at("gamma").get<double>()};
    } else if (name == "plateau") {
      law = MaxwellPlateau{VanDerWaals{l.at("A").get<double>(), l.at("gamma").get<double>()},
                           l.at("taut1").get<double>(), l.value("taut2", 0.0)};
    } else if (name == "table") {
      law = TabulatedLaw::from_points(l.at("tau").get<std::vector<double>>(), l.at("p").get<std::vector<double>>(),
                                      l.value("source", std::string()));
    } else {
      throw ConfigError("unknown law: " + name);
    }
    return EosSpec::make(kind, std::move(law), j.at("nu").get<double>(), j.value("name", std::string()));
  });
}

json controls_to_json(const BuildControls& c) {
  const auto& o = c.ode;
  return {{"rtol", o.rtol},
          {"atol", o.atol},
          {"eps_sonic", o.eps_sonic},
          {"eps_event", o.eps_event},
          {"eps_u", o.eps_u},
          {"rho_vac_rel", o.rho_vac_rel},
          {"s_max", o.s_max},
          {"delta_switch", o.delta_switch},
          {"max_steps", o.max_steps},
          {"dense_subsamples", o.dense_subsamples},
          {"family_samples", c.family_samples},
          {"fit_tol", c.fit_tol},
          {"max_depth", c.max_depth}};
}

BuildControls controls_from_json(const json& j) {
  return guarded("controls", [&] {
    BuildControls c;
    auto& o = c.ode;
    o.rtol = j.value("rtol", o.rtol);
    o.atol = j.value("atol", o.atol);
    o.eps_sonic = j.value("eps_sonic", o.eps_sonic);
    o.eps_event = j.value("eps_event", o.eps_event);
    o.eps_u = j.value("eps_u", o.eps_u);
    o.rho_vac_rel = j.value("rho_vac_rel", o.rho_vac_rel);
    o.s_max = j.value("s_max", o.s_max);
    o.delta_switch = j.value("delta_switch", o.delta_switch);
    o.max_steps = j.value("max_steps", o.max_steps);
    o.dense_subsamples = j.value("dense_subsamples", o.dense_subsamples);
    c.family_samples = j.value("family_samples", c.family_samples);
    c.fit_tol = j.value("fit_tol", c.fit_tol);
    c.max_depth = j.value("max_depth", c.max_depth);
    return c;
  });
}

json solution_to_json(const WaveSolution& sol) {
  json j;
  j["schema_version"] = kSolutionSchemaVersion;
  j["eos"] = eos_to_json(sol.eos);
  j["data"] = {{"u0", sol.u0}, {"rho0", sol.rho0}};
  j["classification"] = to_string(sol.classification);
  j["case_tags"] = sol.case_tags;
  j["notes"] = sol.notes;
  j["controls"] = controls_to_json(sol.controls);
  j["diagnostics"] = sol.diagnostics;
  json segs = json::array();
  for (const auto& g : sol.segments) {
    json s = {{"kind", to_string(g.kind)}, {"s_range", {g.s_begin, g.s_end}}};
    switch (g.kind) {
      case SegmentKind::SmoothArc: {
        json pts = json::array();
        for (const auto& p : g.samples) pts.push_back({p.s, p.state.u, p.state.rho});
        s["samples"] = std::move(pts);
        break;
      }
      case SegmentKind::ConstantState:
      case SegmentKind::Vacuum:
        s["state"] = state_json(g.state);
        break;
      case SegmentKind::PressurePlateau:
        s["params"] = {{"u", g.plateau.u}, {"rho_start", g.plateau.rho_start}, {"s_start", g.plateau.s_start}};
        break;
    }
    segs.push_back(std::move(s));
  }
  j["segments"] = std::move(segs);
  json shocks = json::array();
  for (const auto& sh : sol.shocks) {
    shocks.push_back({{"s", sh.s},
                      {"sigma", sh.sigma},
                      {"front", state_json(sh.front)},
                      {"back", state_json(sh.back)},
                      {"kind", to_string(sh.kind)},
                      {"entropy_margin", sh.entropy_margin},
                      {"branch_label", sh.branch_label},
                      {"boundary_admissible", sh.boundary_admissible}});
  }
  j["shocks"] = std::move(shocks);
  return j;
}

WaveSolution solution_from_json(const json& j) {
  return guarded("solution", [&] {
    int v = j.at("schema_version").get<int>();
    if (v != kSolutionSchemaVersion) throw ConfigError("unsupported schema_version " + std::to_string(v));
    WaveSolution sol;
    sol.eos = eos_from_json(j.at("eos"));
    sol.u0 = j.at("data").at("u0").get<double>();
    sol.rho0 = j.at("data").at("rho0").get<double>();
    sol.classification = classification_from_string(j.at("classification").get<std::string>());
    sol.case_tags = j.value("case_tags", std::vector<std::string>{});
    sol.notes = j.value("notes", std::vector<std::string>{});
    sol.controls = controls_from_json(j.value("controls", json::object()));
    sol.diagnostics = j.value("diagnostics", std::map<std::string, double>{});
    for (const auto& s : j.at("segments")) {
      Segment g;
      g.kind = segment_kind_from_string(s.at("kind").get<std::string>());
      g.s_begin = s.at("s_range").at(0).get<double>();
      g.s_end = s.at("s_range").at(1).get<double>();
      switch (g.kind) {
        case SegmentKind::SmoothArc:
          for (const auto& p : s.at("samples")) {
            g.samples.push_back({p.at(0).get<double>(), {p.at(1).get<double>(), p.at(2).get<double>()}});
          }
          break;
        case SegmentKind::ConstantState:
        case SegmentKind::Vacuum:
          g.state = state_from(s.at("state"));
          break;
        case SegmentKind::PressurePlateau: {
          const auto& q = s.at("params");
          g.plateau = {q.at("u").get<double>(), q.at("rho_start").get<double>(), q.at("s_start").get<double>()};
          break;
        }
      }
      sol.segments.push_back(std::move(g));
    }
    for (const auto& s : j.at("shocks")) {
      ShockRecord sh;
      sh.s = s.at("s").get<double>();
      sh.sigma = s.at("sigma").get<double>();
      sh.front = state_from(s.at("front"));
      sh.back = state_from(s.at("back"));
      sh.kind = shock_kind_from_string(s.at("kind").get<std::string>());
      sh.entropy_margin = s.value("entropy_margin", 0.0);
      sh.branch_label = s.value("branch_label", std::string("single"));
      sh.boundary_admissible = s.value("boundary_admissible", false);
      sol.shocks.push_back(sh);
    }
    if (sol.segments.empty()) throw ConfigError("solution has no segments");
    return sol;
  });
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

std::pair<double, double> xi_window(const WaveSolution& sol) {
  const auto& segs = sol.segments;
  double xi_hi = std::abs(sol.u0) + sound_speed_rho(sol.eos, sol.rho0);
  if (segs.size() > 1) xi_hi = std::max(xi_hi, 1.0 / segs[1].s_begin);
  return {1.0 / segs.back().s_end, 2.0 * xi_hi};
}

State serialized_state_at(const WaveSolution& sol, double s) {
  for (const auto& g : sol.segments) {
    if (s < g.s_end) {
      double q = std::max(s, g.s_begin);
      if (g.kind != SegmentKind::SmoothArc || !g.dense) return g.state_at(q);
      Segment plain = g;
      plain.dense.reset();
      return plain.state_at(q);
    }
  }
  return sol.segments.back().end_state();
}

std::string profile_csv(const WaveSolution& sol, int n) {
  // Samples only, so a solution read back from JSON renders identically.
  auto [xi_lo, xi_hi] = xi_window(sol);
  std::ostringstream os;
  os << "xi,u,rho,tau,p\n";
  for (int k = 0; k < n; ++k) {
    double xi = xi_lo + (xi_hi - xi_lo) * k / (n - 1);
    State st = serialized_state_at(sol, 1.0 / xi);
    double tau = st.rho > 0 ? 1.0 / st.rho : std::numeric_limits<double>::infinity();
    double p = st.rho > 0 ? sol.eos.p(tau) : 0.0;
    os << num(xi) << ',' << num(st.u) << ',' << num(st.rho) << ',' << num(tau) << ',' << num(p) << '\n';
  }
  return os.str();
}

std::string structure_text(const WaveSolution& sol) {
  std::ostringstream os;
  auto xi = [](double s) { return s > 0 ? num(1.0 / s, 10) : std::string("inf"); };
  os << "classification: " << to_string(sol.classification) << "\n";
  os << "eos: " << (sol.eos.name().empty() ? "unnamed" : sol.eos.name()) << " (" << to_string(sol.eos.kind())
     << ")\n";
  os << "data: u0 = " << num(sol.u0, 10) << ", rho0 = " << num(sol.rho0, 10) << "\n";
  for (const auto& t : sol.case_tags) os << "case: " << t << "\n";
  os << "waves, from the far field inward:\n";
  size_t next_shock = 0;
  for (const auto& g : sol.segments) {
    while (next_shock < sol.shocks.size() && sol.shocks[next_shock].s <= g.s_begin) {
      const auto& sh = sol.shocks[next_shock++];
      os << "  " << to_string(sh.kind) << " shock at xi = " << xi(sh.s) << ", rho " << num(sh.front.rho, 8)
         << " -> " << num(sh.back.rho, 8) << ", u " << num(sh.front.u, 8) << " -> " << num(sh.back.u, 8)
         << ", entropy margin " << num(sh.entropy_margin, 4) << "\n";
    }
    State a = g.begin_state(), b = g.end_state();
    os << "  " << to_string(g.kind) << " on xi in [" << xi(g.s_end) << ", " << xi(g.s_begin) << "]";
    if (g.kind == SegmentKind::ConstantState || g.kind == SegmentKind::Vacuum) {
      os << ": u = " << num(a.u, 8) << ", rho = " << num(a.rho, 8);
    } else {
      os << ": u " << num(a.u, 8) << " -> " << num(b.u, 8) << ", rho " << num(a.rho, 8) << " -> " << num(b.rho, 8);
    }
    os << "\n";
  }
  for (const auto& [k, v] : sol.diagnostics) os << "diagnostic " << k << " = " << num(v, 12) << "\n";
  for (const auto& n : sol.notes) os << "note: " << n << "\n";
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
  if (!out) throw ConfigError("write failed for " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace sphwave
