#include "beadlab/render.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "beadlab/hex_lattice.hpp"
#include "beadlab/square_lattice.hpp"

namespace beadlab {

namespace {

using Pt = std::array<double, 2>;

// Center of hex face (l, s), unwrapped.
Pt hex_face(int64_t l, int64_t s) {
  return {static_cast<double>(l) * std::sqrt(3.0) / 2.0, static_cast<double>(s) + 0.5 * l};
}

void sort_ccw(std::vector<Pt>& pts) {
  double cx = 0, cy = 0;
  for (const Pt& p : pts) {
    cx += p[0] / pts.size();
    cy += p[1] / pts.size();
  }
  std::sort(pts.begin(), pts.end(), [&](const Pt& a, const Pt& b) {
    return std::atan2(a[1] - cy, a[0] - cx) < std::atan2(b[1] - cy, b[0] - cx);
  });
}

Polygon domino(Point2 a, Point2 b, int kind) {
  const double x0 = std::min(a.x, b.x) - 0.5, x1 = std::max(a.x, b.x) + 0.5;
  const double y0 = std::min(a.y, b.y) - 0.5, y1 = std::max(a.y, b.y) + 0.5;
  return {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, kind};
}

}  // namespace

std::vector<Polygon> tiling_polygons(const TorusBeadConfig& c) {
  const Geometry& g = c.geometry();
  const int L = g.columns(), M = g.positions(), Z = g.zigzag_length();
  std::vector<Polygon> out;
  for (int l = 0; l < L; ++l) {
    for (int p = 0; p < M; ++p) {
      if (!c.bead_edge(l, p)) continue;
      if (g.kind() == LatticeKind::kHex) {
        std::vector<Pt> pts{hex_face(l, p - 1), hex_face(l, p), hex_face(l + 1, p - 1),
                            hex_face(l - 1, p)};
        sort_ccw(pts);
        out.push_back({pts, 0});
      } else {
        out.push_back(domino(square_zigzag_vertex(l, g.right_vertex(p)),
                             square_zigzag_vertex(l - 1, g.left_vertex(p)), 0));
      }
    }
    for (int t = 0; t < Z; ++t) {
      if (!c.zigzag_edge(l, t)) continue;
      if (g.kind() == LatticeKind::kHex) {
        const int j = t / 2;
        std::vector<Pt> pts;
        if (t % 2 == 0)
          pts = {hex_face(l, j - 1), hex_face(l, j), hex_face(l + 1, j - 1), hex_face(l + 1, j - 2)};
        else
          pts = {hex_face(l, j - 1), hex_face(l, j), hex_face(l + 1, j), hex_face(l + 1, j - 1)};
        sort_ccw(pts);
        out.push_back({pts, hex_zigzag_edge(l, t).kind == HexEdge::kNorthWest ? 1 : 2});
      } else {
        out.push_back(domino(square_zigzag_vertex(l, t), square_zigzag_vertex(l, t + 1), 1));
      }
    }
  }
  return out;
}

std::string render_svg(const TorusBeadConfig& c) {
  const std::vector<Polygon> polys = tiling_polygons(c);
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const Polygon& p : polys)
    for (const Pt& q : p.corners) {
      x0 = std::min(x0, q[0]);
      x1 = std::max(x1, q[0]);
      y0 = std::min(y0, q[1]);
      y1 = std::max(y1, q[1]);
    }
  const double scale = 20.0, pad = 1.0;
  const char* hex_fill[3] = {"#d9534f", "#5bc0de", "#f0ad4e"};
  const char* sq_fill[2] = {"#d9534f", "#5bc0de"};
  const bool hex = c.geometry().kind() == LatticeKind::kHex;
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  const double w = (x1 - x0 + 2 * pad) * scale, h = (y1 - y0 + 2 * pad) * scale;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w
     << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
     << "<g stroke=\"#333333\" stroke-width=\"1\">\n";
  for (const Polygon& p : polys) {
    os << "<polygon fill=\"" << (hex ? hex_fill[p.kind] : sq_fill[p.kind]) << "\" points=\"";
    for (size_t i = 0; i < p.corners.size(); ++i) {
      // SVG y grows downward.
      const double x = (p.corners[i][0] - x0 + pad) * scale;
      const double y = (y1 - p.corners[i][1] + pad) * scale;
      os << (i ? " " : "") << x << "," << y;
    }
    os << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace beadlab
