#pragma once

#include <string>
#include <vector>

#include "sphwave/builder.hpp"

namespace sphwave {

struct CriticalSettings {
  double lo = 0.01;
  double hi = 3.0;
  double tol = 1e-6;
  double s_classify = 1e9;
};

struct RunConfig {
  EosSpec eos;
  std::vector<double> u0;    // grid axis, at least one value
  std::vector<double> rho0;  // grid axis, at least one value
  BuildControls controls;
  CriticalSettings critical;
  std::string output_dir;            // empty means the caller's default
  std::vector<std::string> formats;  // subset of json, csv, txt, svg
  int threads = 0;                   // 0 picks the hardware concurrency

  bool wants(const std::string& format) const;
};

// INI text with sections [eos], [data], [controls], [critical], [output].
// Each override reads "section.key=value" and replaces the file value.
// Throws ConfigError on unknown keys, malformed values or failed EOS validation.
RunConfig parse_config(const std::string& ini_text, const std::vector<std::string>& overrides = {},
                       const std::string& base_dir = ".");
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

// Built-in law by name: convex_power, inflected_vdw or plateau_vdw.
EosSpec builtin_eos(const std::string& name);

}  // namespace sphwave
