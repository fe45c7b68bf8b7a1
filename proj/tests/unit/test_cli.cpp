// Config parsing and the serialized formats the command-line tool writes.

#include <gtest/gtest.h>

#include "sphwave/builder.hpp"
#include "sphwave/config.hpp"
#include "sphwave/errors.hpp"
#include "sphwave/io.hpp"
#include "sphwave/svg.hpp"

using namespace sphwave;

TEST(Config, FixtureLoads) {
  auto cfg = load_config(std::string(SPHWAVE_FIXTURES) + "/two_shock.ini", {});
  EXPECT_EQ(cfg.eos.name(), "plateau_vdw");
  ASSERT_EQ(cfg.u0.size(), 1u);
  EXPECT_DOUBLE_EQ(cfg.u0[0], -0.332);
  EXPECT_DOUBLE_EQ(cfg.rho0[0], 1.0 / 300);
  EXPECT_TRUE(cfg.wants("svg"));
}

TEST(Config, RangesAndOverrides) {
  const char* ini = "[eos]\nbuiltin = convex_power\n[data]\nu0 = -1:1:5\nrho0 = 1\n";
  auto cfg = parse_config(ini, {"controls.s_max=500", "data.rho0=0.5,2"}, ".");
  ASSERT_EQ(cfg.u0.size(), 5u);
  EXPECT_DOUBLE_EQ(cfg.u0[1], -0.5);
  EXPECT_EQ(cfg.rho0.size(), 2u);
  EXPECT_DOUBLE_EQ(cfg.controls.ode.s_max, 500.0);
  EXPECT_EQ(cfg.formats, (std::vector<std::string>{"json", "csv", "txt"}));
}

TEST(Config, Rejections) {
  const std::string base = "[eos]\nbuiltin = convex_power\n[data]\nu0 = 1\nrho0 = 1\n";
  EXPECT_THROW(parse_config(base + "[bogus]\nx = 1\n", {}, "."), ConfigError);
  EXPECT_THROW(parse_config(base, {"controls.rtol=abc"}, "."), ConfigError);
  EXPECT_THROW(parse_config(base, {"controls.rtol=-1"}, "."), ConfigError);
  EXPECT_THROW(parse_config(base, {"output.formats=pdf"}, "."), ConfigError);
  EXPECT_THROW(parse_config(base, {"nodot=1"}, "."), ConfigError);
  EXPECT_THROW(parse_config("[eos]\nbuiltin = nope\n[data]\nu0 = 1\nrho0 = 1\n", {}, "."), ConfigError);
  EXPECT_THROW(parse_config("[eos]\nbuiltin = convex_power\n[data]\nrho0 = 1\n", {}, "."), ConfigError);
}

TEST(Io, SolutionJsonRoundTrip) {
  auto sol = solve(builtin::plateau_vdw(), -0.332, 1.0 / 300);
  std::string a = dump_json(solution_to_json(sol));
  auto back = solution_from_json(nlohmann::json::parse(a));
  EXPECT_EQ(dump_json(solution_to_json(back)), a);
  EXPECT_EQ(back.classification, sol.classification);
  EXPECT_EQ(nlohmann::json::parse(a).at("schema_version").get<int>(), kSolutionSchemaVersion);
}

TEST(Io, MalformedJsonIsConfigError) {
  EXPECT_THROW(solution_from_json(nlohmann::json::parse(R"({"schema_version": 1})")), ConfigError);
  EXPECT_THROW(solution_from_json(nlohmann::json::parse("[1, 2]")), ConfigError);
}

TEST(Io, TextFormats) {
  auto sol = solve(builtin::convex_power(), -1.0, 1.0);
  std::string csv = profile_csv(sol);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "xi,u,rho,tau,p");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 402);
  std::string txt = structure_text(sol);
  EXPECT_NE(txt.find("SingleCompressionShock"), std::string::npos);
  std::string svg = profile_svg(sol);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
}
