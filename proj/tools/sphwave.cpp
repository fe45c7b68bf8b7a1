// Command-line front end: solve, critical, verify, plot.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "sphwave/builder.hpp"
#include "sphwave/config.hpp"
#include "sphwave/io.hpp"
#include "sphwave/svg.hpp"
#include "sphwave/verify.hpp"

namespace fs = std::filesystem;
using namespace sphwave;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAuditFailed = 1;
constexpr int kExitConstruction = 2;
constexpr int kExitConfig = 3;

std::string default_output_dir() {
  const char* env = std::getenv("SPHWAVE_OUTPUT_DIR");
  return env && *env ? env : "sphwave_out";
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_solution(const RunConfig& cfg, const WaveSolution& sol, const fs::path& dir) {
  fs::create_directories(dir);
  if (cfg.wants("json")) write_file((dir / "solution.json").string(), dump_json(solution_to_json(sol)));
  if (cfg.wants("csv")) write_file((dir / "profile.csv").string(), profile_csv(sol));
  if (cfg.wants("txt")) write_file((dir / "structure.txt").string(), structure_text(sol));
  if (cfg.wants("svg")) write_file((dir / "profile.svg").string(), profile_svg(sol));
}

struct PointResult {
  bool ok = false;
  std::string classification;
  std::string error;
};

int cmd_solve(const std::string& config, const std::vector<std::string>& sets, const std::string& out_flag) {
  RunConfig cfg = load_config(config, sets);
  fs::path out = !out_flag.empty() ? out_flag : !cfg.output_dir.empty() ? cfg.output_dir : default_output_dir();

  struct Point {
    double u0, rho0;
  };
  std::vector<Point> pts;
  for (double r : cfg.rho0) {
    for (double u : cfg.u0) pts.push_back({u, r});
  }
  const bool single = pts.size() == 1;
  std::vector<PointResult> res(pts.size());
  std::atomic<size_t> next{0};
  std::mutex log_mu;

  auto dir_of = [&](size_t i) {
    if (single) return out;
    char name[32];
    std::snprintf(name, sizeof name, "point_%04zu", i);
    return out / name;
  };
  auto work = [&] {
    for (size_t i = next++; i < pts.size(); i = next++) {
      try {
        WaveSolution sol = solve(cfg.eos, pts[i].u0, pts[i].rho0, cfg.controls);
        write_solution(cfg, sol, dir_of(i));
        res[i] = {true, to_string(sol.classification), ""};
      } catch (const ConstructionFailed& e) {
        std::ostringstream os;
        os << e.what();
        for (const auto& t : e.trace()) os << "\n  " << t;
        res[i] = {false, "", os.str()};
        std::lock_guard<std::mutex> lk(log_mu);
        std::cerr << "u0 = " << num(pts[i].u0) << ", rho0 = " << num(pts[i].rho0) << ": " << os.str() << "\n";
      }
    }
  };
  unsigned nt = cfg.threads > 0 ? unsigned(cfg.threads) : std::max(1u, std::thread::hardware_concurrency());
  nt = std::min<unsigned>(nt, unsigned(pts.size()));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < nt; ++k) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  fs::create_directories(out);
  if (!single) {
    std::ostringstream idx;
    idx << "point,u0,rho0,status,classification\n";
    for (size_t i = 0; i < pts.size(); ++i) {
      idx << dir_of(i).filename().string() << ',' << num(pts[i].u0) << ',' << num(pts[i].rho0) << ','
          << (res[i].ok ? "ok" : "failed") << ',' << res[i].classification << '\n';
    }
    write_file((out / "index.csv").string(), idx.str());
  }
  bool all = std::all_of(res.begin(), res.end(), [](const PointResult& r) { return r.ok; });
  if (single && res[0].ok) std::cout << res[0].classification << "\n";
  return all ? kExitOk : kExitConstruction;
}

int cmd_critical(const std::string& config, const std::vector<std::string>& sets, const std::string& out_flag) {
  RunConfig cfg = load_config(config, sets);
  fs::path out = !out_flag.empty() ? out_flag : !cfg.output_dir.empty() ? cfg.output_dir : default_output_dir();
  const auto& c = cfg.critical;
  CriticalResult r = critical_u0(cfg.eos, cfg.rho0.front(), c.lo, c.hi, c.tol, cfg.controls, c.s_classify);
  nlohmann::json j;
  j["schema_version"] = 1;
  j["rho0"] = cfg.rho0.front();
  j["bracket"] = {c.lo, c.hi};
  j["tol"] = c.tol;
  j["interval"] = {r.lo, r.hi};
  j["iterations"] = r.iterations;
  j["trace"] = nlohmann::json::array();
  for (const auto& st : r.trace) j["trace"].push_back({{"u0", st.u0}, {"event", to_string(st.event)}});
  fs::create_directories(out);
  write_file((out / "critical.json").string(), dump_json(j));
  write_solution(cfg, r.solution, out / "midpoint");
  std::cout << "critical u0 in [" << num(r.lo) << ", " << num(r.hi) << "] after " << r.iterations
            << " iterations\n";
  return kExitOk;
}

int cmd_verify(const std::string& file) {
  if (!fs::exists(file)) throw ConfigError("no such file: " + file);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(file));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("not a JSON document: ") + e.what());
  }
  WaveSolution sol = solution_from_json(j);
  AuditReport rep = audit_all(sol);
  std::cout << rep.to_json().dump(2) << "\n";
  return rep.pass() ? kExitOk : kExitAuditFailed;
}

int cmd_plot(const std::string& file, const std::string& out) {
  if (!fs::exists(file)) throw ConfigError("no such file: " + file);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(file));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("not a JSON document: ") + e.what());
  }
  WaveSolution sol = solution_from_json(j);
  fs::path target = out.empty() ? fs::path(file).replace_filename("profile.svg") : fs::path(out);
  write_file(target.string(), profile_svg(sol));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-similar spherical waves with general pressure laws"};
  app.require_subcommand(1);

  std::string config, out, file;
  std::vector<std::string> sets;

  auto* solve_cmd = app.add_subcommand("solve", "Construct solutions for the data in a config file");
  solve_cmd->add_option("-c,--config", config, "INI config file")->required();
  solve_cmd->add_option("--set", sets, "Override a config value, section.key=value");
  solve_cmd->add_option("-o,--output", out, "Output directory (default $SPHWAVE_OUTPUT_DIR or sphwave_out)");

  auto* crit_cmd = app.add_subcommand("critical", "Bisect u0 between a quiet and a vacuum terminal");
  crit_cmd->add_option("-c,--config", config, "INI config file")->required();
  crit_cmd->add_option("--set", sets, "Override a config value, section.key=value");
  crit_cmd->add_option("-o,--output", out, "Output directory");

  auto* verify_cmd = app.add_subcommand("verify", "Audit a solution.json; prints a JSON report");
  verify_cmd->add_option("solution", file, "solution.json")->required();

  auto* plot_cmd = app.add_subcommand("plot", "Render a solution.json as SVG");
  plot_cmd->add_option("solution", file, "solution.json")->required();
  plot_cmd->add_option("-o,--output", out, "SVG path (default profile.svg next to the input)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*solve_cmd) return cmd_solve(config, sets, out);
    if (*crit_cmd) return cmd_critical(config, sets, out);
    if (*verify_cmd) return cmd_verify(file);
    if (*plot_cmd) return cmd_plot(file, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BracketInvalid& e) {
    std::cerr << "invalid bracket: " << e.what() << "\n";
    return kExitConstruction;
  } catch (const ConstructionFailed& e) {
    std::cerr << e.what() << "\n";
    for (const auto& t : e.trace()) std::cerr << "  " << t << "\n";
    return kExitConstruction;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAuditFailed;
  }
  return kExitOk;
}
