#include "sphwave/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "sphwave/io.hpp"

namespace sphwave {

namespace {

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Panel {
  double x0, y0, w, h;
  double xlo, xhi, ylo, yhi;
  double X(double x) const { return x0 + (x - xlo) / (xhi - xlo) * w; }
  double Y(double y) const { return y0 + h - (y - ylo) / (yhi - ylo) * h; }
};

}  // namespace

std::string profile_svg(const WaveSolution& sol, const SvgOptions& opt) {
  auto [xlo, xhi] = xi_window(sol);
  const int n = std::max(opt.samples, 2);
  std::vector<double> xs(n), us(n), rs(n);
  for (int k = 0; k < n; ++k) {
    xs[k] = xlo + (xhi - xlo) * k / (n - 1);
    State st = serialized_state_at(sol, 1.0 / xs[k]);
    us[k] = st.u;
    rs[k] = st.rho;
  }
  std::vector<double> shock_xi;
  for (const auto& sh : sol.shocks) shock_xi.push_back(1.0 / sh.s);

  const double margin_l = 70, margin_r = 20, margin_t = 30, gap = 40;
  const double pw = opt.width - margin_l - margin_r;
  const double ph = opt.panel_height;
  const double total_h = margin_t + 2 * ph + gap + 40;

  auto range = [](const std::vector<double>& v) {
    auto [a, b] = std::minmax_element(v.begin(), v.end());
    double lo = *a, hi = *b;
    double pad = 0.05 * std::max(hi - lo, 1e-12 * std::max(1.0, std::abs(hi)));
    return std::pair{lo - pad, hi + pad};
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << px(total_h)
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << px(margin_l) << "\" y=\"18\">" << to_string(sol.classification) << "  (u0 = " << label(sol.u0)
     << ", rho0 = " << label(sol.rho0) << ")</text>\n";

  auto draw = [&](const std::vector<double>& ys, double top, const char* name, const char* colour) {
    auto [ylo, yhi] = range(ys);
    Panel p{margin_l, top, pw, ph, xlo, xhi, ylo, yhi};
    os << "<rect x=\"" << px(p.x0) << "\" y=\"" << px(p.y0) << "\" width=\"" << px(p.w) << "\" height=\"" << px(p.h)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"10\" y=\"" << px(top + ph / 2) << "\">" << name << "</text>\n";
    os << "<text x=\"" << px(p.x0 - 5) << "\" y=\"" << px(p.y0 + 12) << "\" text-anchor=\"end\">" << label(yhi)
       << "</text>\n";
    os << "<text x=\"" << px(p.x0 - 5) << "\" y=\"" << px(p.y0 + p.h) << "\" text-anchor=\"end\">" << label(ylo)
       << "</text>\n";
    // One polyline per continuous piece; pieces break at the shocks.
    std::vector<std::vector<int>> pieces(1);
    for (int k = 0; k < n; ++k) {
      if (k > 0) {
        bool cut = std::any_of(shock_xi.begin(), shock_xi.end(),
                               [&](double x) { return x > xs[k - 1] && x <= xs[k]; });
        if (cut) pieces.emplace_back();
      }
      pieces.back().push_back(k);
    }
    for (const auto& piece : pieces) {
      os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
      for (size_t i = 0; i < piece.size(); ++i) {
        int k = piece[i];
        os << (i ? " " : "") << px(p.X(xs[k])) << ',' << px(p.Y(ys[k]));
      }
      os << "\"/>\n";
    }
    for (double x : shock_xi) {
      if (x < xlo || x > xhi) continue;
      os << "<line x1=\"" << px(p.X(x)) << "\" y1=\"" << px(p.y0) << "\" x2=\"" << px(p.X(x)) << "\" y2=\""
         << px(p.y0 + p.h) << "\" stroke=\"gray\" stroke-dasharray=\"5,4\"/>\n";
    }
  };
  draw(us, margin_t, "u", "#1f5fa8");
  draw(rs, margin_t + ph + gap, "rho", "#b03a2e");
  double base = margin_t + 2 * ph + gap;
  os << "<text x=\"" << px(margin_l) << "\" y=\"" << px(base + 16) << "\">" << label(xlo) << "</text>\n";
  os << "<text x=\"" << px(margin_l + pw) << "\" y=\"" << px(base + 16) << "\" text-anchor=\"end\">" << label(xhi)
     << "</text>\n";
  os << "<text x=\"" << px(margin_l + pw / 2) << "\" y=\"" << px(base + 32)
     << "\" text-anchor=\"middle\">xi = x / t</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace sphwave
