#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "sphwave/builder.hpp"

namespace sphwave {

constexpr int kSolutionSchemaVersion = 1;

nlohmann::json eos_to_json(const EosSpec& eos);
EosSpec eos_from_json(const nlohmann::json& j);

nlohmann::json controls_to_json(const BuildControls& c);
BuildControls controls_from_json(const nlohmann::json& j);

nlohmann::json solution_to_json(const WaveSolution& sol);
// Throws ConfigError on a malformed document or an unknown schema version.
WaveSolution solution_from_json(const nlohmann::json& j);

// Fixed formatting: 17 significant digits, keys in insertion-independent sorted order.
std::string dump_json(const nlohmann::json& j);

// Plotting window [1/s_max, xi_hi] with xi_hi twice the larger of |u0| + c0 and the
// first junction speed.
std::pair<double, double> xi_window(const WaveSolution& sol);

// State at s from the serialized content only (no dense interpolant).
State serialized_state_at(const WaveSolution& sol, double s);

// Rows xi,u,rho,tau,p at n points uniform in xi from 1/s_max to the largest finite xi
// of interest; tau is written as inf and p as 0 in vacuum.
std::string profile_csv(const WaveSolution& sol, int n = 401);

// Wave diagram summary: classification, case tags, segments and shocks in order of decreasing xi.
std::string structure_text(const WaveSolution& sol);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace sphwave
