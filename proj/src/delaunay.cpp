// SPDX-License-Identifier: Apache-2.0
#include "fstk/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fstk {

namespace {

// Sign evaluation runs in three stages: plain double with Shewchuk's
// stage-A error filter, long double, then __float128 with a conservative
// snap-to-zero.  Each stage reports 0 when the value sits inside its own
// error bound, which hands the decision to the next stage; the last stage
// treats "inside the bound" as an exact tie.  For the coordinate
// magnitudes handled here, grid-aligned determinants are whole numbers and
// resolve exactly in the long double stage already.

constexpr double kOrientFilter = 3.3306690738754716e-16;
constexpr double kIncircleFilter = 1.1102230246251577e-15;
constexpr long double kOrientFilterLd = 4.0e-19L;
constexpr long double kIncircleFilterLd = 2.0e-18L;
constexpr __float128 kOrientFilterQ = 1.0e-33;
constexpr __float128 kIncircleFilterQ = 4.0e-33;

template <typename T>
int orient2d_stage(T ax, T ay, T bx, T by, T cx, T cy, T filter) {
  const T l = (bx - ax) * (cy - ay);
  const T r = (by - ay) * (cx - ax);
  const T det = l - r;
  const T detsum = (l < T(0) ? -l : l) + (r < T(0) ? -r : r);
  const T bound = filter * detsum;
  if (det > bound) return 1;
  if (det < -bound) return -1;
  return 0;
}

template <typename T>
int incircle_stage(T ax, T ay, T bx, T by, T cx, T cy, T dx, T dy, T filter) {
  const T adx = ax - dx, ady = ay - dy;
  const T bdx = bx - dx, bdy = by - dy;
  const T cdx = cx - dx, cdy = cy - dy;
  const T alift = adx * adx + ady * ady;
  const T blift = bdx * bdx + bdy * bdy;
  const T clift = cdx * cdx + cdy * cdy;
  const T bxcy = bdx * cdy, cxby = cdx * bdy;
  const T cxay = cdx * ady, axcy = adx * cdy;
  const T axby = adx * bdy, bxay = bdx * ady;
  const T det =
      alift * (bxcy - cxby) + blift * (cxay - axcy) + clift * (axby - bxay);
  auto mag = [](T v) { return v < T(0) ? -v : v; };
  const T permanent = (mag(bxcy) + mag(cxby)) * alift +
                      (mag(cxay) + mag(axcy)) * blift +
                      (mag(axby) + mag(bxay)) * clift;
  const T bound = filter * permanent;
  if (det > bound) return 1;
  if (det < -bound) return -1;
  return 0;
}

}  // namespace

int orient2d_sign(double ax, double ay, double bx, double by, double cx,
                  double cy) {
  if (const int s = orient2d_stage<double>(ax, ay, bx, by, cx, cy,
                                           kOrientFilter))
    return s;
  if (const int s = orient2d_stage<long double>(ax, ay, bx, by, cx, cy,
                                                kOrientFilterLd))
    return s;
  return orient2d_stage<__float128>(ax, ay, bx, by, cx, cy, kOrientFilterQ);
}

int incircle_sign(double ax, double ay, double bx, double by, double cx,
                  double cy, double dx, double dy) {
  if (const int s = incircle_stage<double>(ax, ay, bx, by, cx, cy, dx, dy,
                                           kIncircleFilter))
    return s;
  if (const int s = incircle_stage<long double>(ax, ay, bx, by, cx, cy, dx,
                                                dy, kIncircleFilterLd))
    return s;
  return incircle_stage<__float128>(ax, ay, bx, by, cx, cy, dx, dy,
                                    kIncircleFilterQ);
}

namespace {

struct Builder {
  Triangulation t;
  std::vector<int> free_slots;
  std::vector<int> cavity;
  std::vector<char> in_cavity;
  int hint = 0;

  int new_tri(int a, int b, int c) {
    int id;
    if (!free_slots.empty()) {
      id = free_slots.back();
      free_slots.pop_back();
    } else {
      id = static_cast<int>(t.tris.size());
      t.tris.push_back({});
      in_cavity.push_back(0);
    }
    auto& tr = t.tris[id];
    tr.v[0] = a;
    tr.v[1] = b;
    tr.v[2] = c;
    tr.nb[0] = tr.nb[1] = tr.nb[2] = -1;
    tr.alive = true;
    return id;
  }

  int slot_of_neighbor(int tri_id, int nb_id) const {
    for (int k = 0; k < 3; ++k)
      if (t.tris[tri_id].nb[k] == nb_id) return k;
    return -1;
  }

  bool inside_circumcircle(int tri_id, double px, double py) const {
    const auto& tr = t.tris[tri_id];
    return incircle_sign(t.x[tr.v[0]], t.y[tr.v[0]], t.x[tr.v[1]],
                         t.y[tr.v[1]], t.x[tr.v[2]], t.y[tr.v[2]], px,
                         py) > 0;
  }

  void insert(int p) {
    const double px = t.x[p], py = t.y[p];
    const int start = t.locate(px, py, hint);
    if (start < 0) throw contract_error("triangulation: point lost");
    // A point inside (or on an edge of) a triangle lies strictly inside
    // its circumcircle; the only way this fails is a repeated point.
    if (!inside_circumcircle(start, px, py))
      throw contract_error("triangulation: duplicate point");

    cavity.clear();
    cavity.push_back(start);
    in_cavity[start] = 1;
    for (size_t i = 0; i < cavity.size(); ++i) {
      const int id = cavity[i];
      for (int k = 0; k < 3; ++k) {
        const int nb = t.tris[id].nb[k];
        if (nb < 0 || in_cavity[nb]) continue;
        if (inside_circumcircle(nb, px, py)) {
          in_cavity[nb] = 1;
          cavity.push_back(nb);
        }
      }
    }

    // Boundary edges (a, b) with their outside neighbor, collected in
    // deterministic traversal order.
    struct Edge {
      int a, b, outside, outside_slot;
    };
    std::vector<Edge> rim;
    rim.reserve(cavity.size() + 2);
    for (const int id : cavity)
      for (int k = 0; k < 3; ++k) {
        const int nb = t.tris[id].nb[k];
        if (nb >= 0 && in_cavity[nb]) continue;
        rim.push_back({t.tris[id].v[(k + 1) % 3], t.tris[id].v[(k + 2) % 3],
                       nb, nb >= 0 ? slot_of_neighbor(nb, id) : -1});
      }

    for (const int id : cavity) {
      t.tris[id].alive = false;
      in_cavity[id] = 0;
      free_slots.push_back(id);
    }

    std::vector<int> fresh(rim.size());
    for (size_t i = 0; i < rim.size(); ++i) {
      fresh[i] = new_tri(p, rim[i].a, rim[i].b);
      t.tris[fresh[i]].nb[0] = rim[i].outside;
      if (rim[i].outside >= 0)
        t.tris[rim[i].outside].nb[rim[i].outside_slot] = fresh[i];
    }
    // Stitch fan neighbors: edge (b, p) of (p, a, b) meets the fan triangle
    // starting at b; edge (p, a) meets the one ending at a.
    for (size_t i = 0; i < rim.size(); ++i)
      for (size_t j = 0; j < rim.size(); ++j) {
        if (rim[j].b == rim[i].a) t.tris[fresh[i]].nb[2] = fresh[j];
        if (rim[j].a == rim[i].b) t.tris[fresh[i]].nb[1] = fresh[j];
      }
    hint = fresh[0];
  }
};

}  // namespace

Triangulation Triangulation::build(const std::vector<double>& xs,
                                   const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw contract_error("triangulation: coordinate arrays differ in length");
  const int n = static_cast<int>(xs.size());
  if (n < 3) throw contract_error("triangulation: need at least 3 points");

  Builder b;
  b.t.real_count = n;
  b.t.x = xs;
  b.t.y = ys;

  double lo_x = xs[0], hi_x = xs[0], lo_y = ys[0], hi_y = ys[0];
  for (int i = 1; i < n; ++i) {
    lo_x = std::min(lo_x, xs[i]);
    hi_x = std::max(hi_x, xs[i]);
    lo_y = std::min(lo_y, ys[i]);
    hi_y = std::max(hi_y, ys[i]);
  }
  const double cx = (lo_x + hi_x) / 2.0, cy = (lo_y + hi_y) / 2.0;
  const double m = std::max({hi_x - lo_x, hi_y - lo_y, 1.0});
  // Outer vertices far enough out that circumcircles of well-shaped real
  // triangles stay clear of them, small enough that the predicates stay
  // decisive.
  b.t.x.push_back(cx - 3.0e5 * m);
  b.t.y.push_back(cy - 2.0e5 * m);
  b.t.x.push_back(cx + 3.0e5 * m);
  b.t.y.push_back(cy - 2.0e5 * m);
  b.t.x.push_back(cx);
  b.t.y.push_back(cy + 4.0e5 * m);

  b.new_tri(n, n + 1, n + 2);
  for (int i = 0; i < n; ++i) b.insert(i);
  return std::move(b.t);
}

int Triangulation::locate(double px, double py, int hint) const {
  int t = hint;
  if (t < 0 || t >= static_cast<int>(tris.size()) || !tris[t].alive) {
    t = -1;
    for (size_t i = 0; i < tris.size(); ++i)
      if (tris[i].alive) {
        t = static_cast<int>(i);
        break;
      }
    if (t < 0) return -1;
  }
  const long cap = 4 * static_cast<long>(tris.size()) + 64;
  for (long step = 0; step < cap; ++step) {
    bool moved = false;
    // The probe edge rotates with the step count so repeated
    // configurations pick different exits and cycles break.
    for (int i = 0; i < 3 && !moved; ++i) {
      const int k = static_cast<int>((step + i) % 3);
      const int a = tris[t].v[(k + 1) % 3];
      const int bb = tris[t].v[(k + 2) % 3];
      if (orient2d_sign(x[a], y[a], x[bb], y[bb], px, py) < 0) {
        const int nb = tris[t].nb[k];
        if (nb < 0) continue;
        t = nb;
        moved = true;
      }
    }
    if (!moved) return t;
  }
  // Exhaustive fallback; the walk above should always terminate first.
  for (size_t i = 0; i < tris.size(); ++i) {
    if (!tris[i].alive) continue;
    bool inside = true;
    for (int k = 0; k < 3 && inside; ++k) {
      const int a = tris[i].v[(k + 1) % 3];
      const int bb = tris[i].v[(k + 2) % 3];
      inside = orient2d_sign(x[a], y[a], x[bb], y[bb], px, py) >= 0;
    }
    if (inside) return static_cast<int>(i);
  }
  return -1;
}

LocateResult locate_and_weigh(const Triangulation& tr, double px, double py,
                              int hint) {
  LocateResult res;
  res.tri = tr.locate(px, py, hint);
  if (res.tri < 0) {
    res.outside = true;
    return res;
  }
  const auto& t = tr.tris[res.tri];

  if (tr.all_real(res.tri)) {
    const double ax = tr.x[t.v[0]], ay = tr.y[t.v[0]];
    const double bx = tr.x[t.v[1]], by = tr.y[t.v[1]];
    const double cx = tr.x[t.v[2]], cy = tr.y[t.v[2]];
    if (orient2d_sign(ax, ay, bx, by, cx, cy) == 0) {
      res.degenerate = true;
      return res;
    }
    const double total = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    const double w0 = ((bx - px) * (cy - py) - (by - py) * (cx - px)) / total;
    const double w1 = ((cx - px) * (ay - py) - (cy - py) * (ax - px)) / total;
    res.w[0] = w0;
    res.w[1] = w1;
    res.w[2] = 1.0 - w0 - w1;
    return res;
  }

  // Hull-exterior triangle.  The query still counts as inside when it
  // coincides with a hull vertex or sits exactly on this triangle's real
  // edge; the hull boundary belongs to the hull.
  for (int k = 0; k < 3; ++k) {
    const int v = t.v[k];
    if (!tr.is_real_vertex(v)) continue;
    if (px == tr.x[v] && py == tr.y[v]) {
      res.on_hull_edge = true;
      res.edge_a = v;
      res.edge_b = v;
      res.edge_t = 0.0;
      return res;
    }
  }
  for (int k = 0; k < 3; ++k) {
    const int a = t.v[(k + 1) % 3];
    const int b = t.v[(k + 2) % 3];
    if (!tr.is_real_vertex(a) || !tr.is_real_vertex(b)) continue;
    if (orient2d_sign(tr.x[a], tr.y[a], tr.x[b], tr.y[b], px, py) != 0)
      continue;
    const double dx = tr.x[b] - tr.x[a], dy = tr.y[b] - tr.y[a];
    const double len2 = dx * dx + dy * dy;
    if (len2 == 0.0) continue;
    const double s = ((px - tr.x[a]) * dx + (py - tr.y[a]) * dy) / len2;
    if (s < 0.0 || s > 1.0) continue;
    res.on_hull_edge = true;
    res.edge_a = a;
    res.edge_b = b;
    res.edge_t = s;
    return res;
  }
  res.outside = true;
  return res;
}

}  // namespace fstk
