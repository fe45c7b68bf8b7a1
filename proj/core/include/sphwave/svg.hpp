#pragma once

#include <string>

#include "sphwave/builder.hpp"

namespace sphwave {

struct SvgOptions {
  int width = 720;
  int panel_height = 260;
  int samples = 801;
};

// Two stacked panels, u and rho against xi, with dashed vertical lines at the shocks.
std::string profile_svg(const WaveSolution& sol, const SvgOptions& opt = {});

}  // namespace sphwave
