// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "fstk/types.hpp"

namespace fstk {

/// Sign of the orientation determinant of (a, b, c): +1 if c lies left of
/// the directed line a->b, -1 if right, 0 if exactly collinear.  Evaluated
/// with escalating precision so that decisions are exact for the coordinate
/// magnitudes handled here (grid-aligned inputs included).
int orient2d_sign(double ax, double ay, double bx, double by, double cx,
                  double cy);

/// Sign of the incircle determinant: +1 if d lies strictly inside the
/// circumcircle of the counter-clockwise triangle (a, b, c), -1 if strictly
/// outside, 0 if cocircular.
int incircle_sign(double ax, double ay, double bx, double by, double cx,
                  double cy, double dx, double dy);

/// Incremental Delaunay triangulation (Bowyer-Watson) over an enclosing
/// outer triangle.  The three synthetic outer vertices are appended after
/// the real points; triangles touching them stand in for the hull
/// exterior.  Cocircular ties keep the existing diagonal, so degenerate
/// inputs (regular grids, collinear runs) triangulate without perturbation.
struct Triangulation {
  struct Tri {
    int v[3];   // vertex ids, counter-clockwise
    int nb[3];  // neighbor across the edge opposite v[k]; -1 if none
    bool alive;
  };

  std::vector<double> x, y;  // real points, then 3 synthetic outer vertices
  int real_count = 0;
  std::vector<Tri> tris;

  /// Builds from distinct points, inserted in the given order.
  static Triangulation build(const std::vector<double>& xs,
                             const std::vector<double>& ys);

  bool is_real_vertex(int v) const { return v < real_count; }
  bool all_real(int t) const {
    return is_real_vertex(tris[t].v[0]) && is_real_vertex(tris[t].v[1]) &&
           is_real_vertex(tris[t].v[2]);
  }

  /// Walks to the triangle containing (px, py); boundary counts as inside.
  int locate(double px, double py, int hint = -1) const;
};

/// Point-location outcome prepared for interpolation.
struct LocateResult {
  int tri = -1;
  bool outside = false;       // beyond the hull of the real points
  bool on_hull_edge = false;  // exactly on a hull edge
  int edge_a = -1;            // hull edge endpoints (on_hull_edge)
  int edge_b = -1;
  double edge_t = 0.0;        // parameter along edge_a -> edge_b
  bool degenerate = false;    // zero-area triangle; use nearest vertex
  double w[3] = {0, 0, 0};    // barycentric weights (real triangles)
};

LocateResult locate_and_weigh(const Triangulation& tr, double px, double py,
                              int hint = -1);

}  // namespace fstk
