// SPDX-License-Identifier: Apache-2.0
#include "fstk/synthesis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <cstring>
#include <unordered_map>
#include <vector>

#include "fstk/delaunay.hpp"
#include "fstk/parallel.hpp"

namespace fstk {

namespace {

void check_synthesis_config(const SynthesisConfig& cfg) {
  if (!(cfg.alpha >= 0.0) || !(cfg.alpha <= 1.0))
    throw contract_error("synthesis: alpha must lie in [0, 1]");
}

void check_domain(const DisparityMap& d, DisparityDomain expected,
                  const char* where) {
  if (d.domain != expected)
    throw contract_error(std::string(where) +
                         ": disparity domain_tag mismatch (pixel-domain maps "
                         "go through the conventional path, perspective-"
                         "domain maps through the fisheye path)");
}

// ---------------------------------------------------------------------------
// Scattered nodes after exact-coincidence deduplication.

struct Nodes {
  std::vector<double> x, y;  // x = column, y = row
  std::vector<float> value;
};

Nodes dedup_targets(const WarpTargets& t) {
  const Index count = t.row.size();
  struct Key {
    std::uint64_t a, b;
    bool operator==(const Key& o) const { return a == o.a && b == o.b; }
  };
  struct KeyHash {
    size_t operator()(const Key& k) const {
      std::uint64_t h = k.a * 0x9e3779b97f4a7c15ULL;
      h ^= k.b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      return static_cast<size_t>(h);
    }
  };
  auto bits = [](double v) {
    if (v == 0.0) v = 0.0;  // -0 and +0 coincide
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof(u));
    return u;
  };

  Nodes nodes;
  std::unordered_map<Key, int, KeyHash> seen;
  seen.reserve(static_cast<size_t>(count));
  for (Index i = 0; i < count; ++i) {
    const double col = t.col.data()[i];
    const double row = t.row.data()[i];
    if (!std::isfinite(col) || !std::isfinite(row))
      throw contract_error("resample_scattered: non-finite target coordinate");
    const Key key{bits(col), bits(row)};
    const auto [it, fresh] =
        seen.emplace(key, static_cast<int>(nodes.x.size()));
    if (fresh) {
      nodes.x.push_back(col == 0.0 ? 0.0 : col);
      nodes.y.push_back(row == 0.0 ? 0.0 : row);
      nodes.value.push_back(t.value.data()[i]);
    } else {
      nodes.value[it->second] = t.value.data()[i];  // last writer wins
    }
  }
  return nodes;
}

bool has_noncollinear_triple(const Nodes& n) {
  if (n.x.size() < 3) return false;
  const size_t count = n.x.size();
  size_t second = 1;
  while (second < count && n.x[second] == n.x[0] && n.y[second] == n.y[0])
    ++second;
  if (second >= count) return false;
  for (size_t i = second + 1; i < count; ++i)
    if (orient2d_sign(n.x[0], n.y[0], n.x[second], n.y[second], n.x[i],
                      n.y[i]) != 0)
      return true;
  return false;
}

// ---------------------------------------------------------------------------
// Clough-Tocher cubic interpolation over the triangulation.

// Per-vertex gradient by weighted least squares over the one-ring.
std::vector<Eigen::Vector2d> estimate_gradients(const Triangulation& tr,
                                                const std::vector<float>& f) {
  const int n = tr.real_count;
  std::vector<std::vector<int>> ring(n);
  for (const auto& t : tr.tris) {
    if (!t.alive) continue;
    for (int k = 0; k < 3; ++k) {
      const int a = t.v[k], b = t.v[(k + 1) % 3];
      if (a < n && b < n) {
        ring[a].push_back(b);
        ring[b].push_back(a);
      }
    }
  }
  std::vector<Eigen::Vector2d> grad(n, Eigen::Vector2d::Zero());
  for (int v = 0; v < n; ++v) {
    auto& nb = ring[v];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
    for (const int u : nb) {
      const Eigen::Vector2d d(tr.x[u] - tr.x[v], tr.y[u] - tr.y[v]);
      const double len2 = d.squaredNorm();
      if (len2 <= 0.0) continue;
      const double w = 1.0 / len2;
      a += w * d * d.transpose();
      rhs += w * (static_cast<double>(f[u]) - f[v]) * d;
    }
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double scale = a(0, 0) + a(1, 1);
    if (std::abs(det) > 1e-12 * scale * scale) grad[v] = a.inverse() * rhs;
  }
  return grad;
}

// Bezier control net of the centroid-split cubic patch for one macro
// triangle: corner and edge values from Hermite data, b111 per outer edge
// from the linear-cross-derivative condition, inner ring and centre from
// the C1 conditions across the internal edges.
struct CtNet {
  double f[3];
  double p[3][2];  // p[i][0]: toward next vertex; p[i][1]: toward previous
  double e[3];
  double h[3];
  double m[3];
  double c = 0.0;
  bool valid = false;
};

CtNet build_ct_net(const Triangulation& tr, int t_id,
                   const std::vector<float>& f,
                   const std::vector<Eigen::Vector2d>& grad) {
  CtNet net;
  const auto& t = tr.tris[t_id];
  Eigen::Vector2d v[3];
  for (int k = 0; k < 3; ++k) v[k] = {tr.x[t.v[k]], tr.y[t.v[k]]};
  const Eigen::Vector2d vc = (v[0] + v[1] + v[2]) / 3.0;
  for (int k = 0; k < 3; ++k) {
    const int id = t.v[k];
    net.f[k] = f[id];
    net.p[k][0] = f[id] + (v[(k + 1) % 3] - v[k]).dot(grad[id]) / 3.0;
    net.p[k][1] = f[id] + (v[(k + 2) % 3] - v[k]).dot(grad[id]) / 3.0;
    net.e[k] = f[id] + (vc - v[k]).dot(grad[id]) / 3.0;
  }
  for (int k = 0; k < 3; ++k) {
    const int j = (k + 1) % 3;
    const Eigen::Vector2d edge = v[j] - v[k];
    const Eigen::Vector2d n(-edge.y(), edge.x());
    // Direction coordinates of n in the (Vk, Vj, Vc) frame (components sum
    // to zero).
    Eigen::Matrix3d sys;
    sys << v[k].x(), v[j].x(), vc.x(), v[k].y(), v[j].y(), vc.y(), 1, 1, 1;
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(sys);
    if (!lu.isInvertible()) return net;  // degenerate macro triangle
    const Eigen::Vector3d a = lu.solve(Eigen::Vector3d(n.x(), n.y(), 0.0));
    const double q0 = a[0] * net.f[k] + a[1] * net.p[k][0] + a[2] * net.e[k];
    const double q2 = a[0] * net.p[j][1] + a[1] * net.f[j] + a[2] * net.e[j];
    net.h[k] = ((q0 + q2) / 2.0 - a[0] * net.p[k][0] - a[1] * net.p[j][1]) /
               a[2];
  }
  for (int k = 0; k < 3; ++k)
    net.m[k] = (net.h[k] + net.h[(k + 2) % 3] + net.e[k]) / 3.0;
  net.c = (net.m[0] + net.m[1] + net.m[2]) / 3.0;
  net.valid = true;
  return net;
}

double eval_ct(const CtNet& net, const double w[3]) {
  // The smallest barycentric coordinate names the opposite mini triangle.
  int k = 0;
  if (w[1] < w[k]) k = 1;
  if (w[2] < w[k]) k = 2;
  const int i = (k + 1) % 3, j = (k + 2) % 3;
  const double u = w[i] - w[k];
  const double vv = w[j] - w[k];
  const double s = 3.0 * w[k];
  const double b300 = net.f[i], b030 = net.f[j], b003 = net.c;
  const double b210 = net.p[i][0], b120 = net.p[j][1];
  const double b201 = net.e[i], b021 = net.e[j];
  const double b111 = net.h[i], b102 = net.m[i], b012 = net.m[j];
  return b300 * u * u * u + b030 * vv * vv * vv + b003 * s * s * s +
         3.0 * (b210 * u * u * vv + b201 * u * u * s + b120 * u * vv * vv +
                b021 * vv * vv * s + b102 * u * s * s + b012 * vv * s * s) +
         6.0 * b111 * u * vv * s;
}

double eval_ct_hull_edge(const Triangulation& tr, int a, int b, double s,
                         const std::vector<float>& f,
                         const std::vector<Eigen::Vector2d>& grad) {
  if (a == b) return f[a];
  const Eigen::Vector2d va(tr.x[a], tr.y[a]), vb(tr.x[b], tr.y[b]);
  const double pa = f[a] + (vb - va).dot(grad[a]) / 3.0;
  const double pb = f[b] + (va - vb).dot(grad[b]) / 3.0;
  const double u = 1.0 - s;
  return f[a] * u * u * u + 3.0 * pa * u * u * s + 3.0 * pb * u * s * s +
         f[b] * s * s * s;
}

float nearest_vertex_value(const Triangulation& tr, int t_id, double px,
                           double py, const std::vector<float>& f) {
  const auto& t = tr.tris[t_id];
  double best = std::numeric_limits<double>::infinity();
  float value = 0.0f;
  for (int k = 0; k < 3; ++k) {
    const int v = t.v[k];
    if (!tr.is_real_vertex(v)) continue;
    const double dx = tr.x[v] - px, dy = tr.y[v] - py;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best) {
      best = d2;
      value = f[v];
    }
  }
  return value;
}

}  // namespace

Image resample_scattered(const WarpTargets& targets, Index rows, Index cols,
                         const SynthesisConfig& cfg, int threads) {
  check_synthesis_config(cfg);
  if (targets.row.rows() != targets.col.rows() ||
      targets.row.cols() != targets.col.cols())
    throw contract_error("resample_scattered: coordinate grids differ");
  if (targets.value.rows() != targets.row.rows() ||
      targets.value.cols() != targets.row.cols())
    throw contract_error(
        "resample_scattered: one luminance value per target required");
  if (rows <= 0 || cols <= 0)
    throw contract_error("resample_scattered: empty output raster");

  const Nodes nodes = dedup_targets(targets);
  if (!has_noncollinear_triple(nodes))
    throw contract_error(
        "resample_scattered: need at least 3 non-collinear targets");

  const Triangulation tr = Triangulation::build(nodes.x, nodes.y);

  const bool cubic = cfg.interpolation == ScatterInterp::cubic;
  std::vector<Eigen::Vector2d> grad;
  std::vector<CtNet> nets;
  if (cubic) {
    grad = estimate_gradients(tr, nodes.value);
    nets.resize(tr.tris.size());
    parallel_for(0, static_cast<Index>(tr.tris.size()), threads,
                 [&](Index t_id) {
                   const auto& t = tr.tris[t_id];
                   if (t.alive && tr.all_real(static_cast<int>(t_id)))
                     nets[t_id] = build_ct_net(tr, static_cast<int>(t_id),
                                               nodes.value, grad);
                 });
  }

  Image out(rows, cols);
  parallel_for(0, rows, threads, [&](Index r) {
    int hint = -1;
    for (Index c = 0; c < cols; ++c) {
      const LocateResult loc = locate_and_weigh(
          tr, static_cast<double>(c), static_cast<double>(r), hint);
      hint = loc.tri;
      double value = 0.0;
      if (loc.outside) {
        value = 0.0;
      } else if (loc.on_hull_edge) {
        value = cubic ? eval_ct_hull_edge(tr, loc.edge_a, loc.edge_b,
                                          loc.edge_t, nodes.value, grad)
                      : (1.0 - loc.edge_t) * nodes.value[loc.edge_a] +
                            loc.edge_t * nodes.value[loc.edge_b];
      } else if (loc.degenerate ||
                 (cubic && !nets[loc.tri].valid)) {
        value = nearest_vertex_value(tr, loc.tri, static_cast<double>(c),
                                     static_cast<double>(r), nodes.value);
      } else if (cubic) {
        value = eval_ct(nets[loc.tri], loc.w);
      } else {
        const auto& t = tr.tris[loc.tri];
        value = loc.w[0] * nodes.value[t.v[0]] +
                loc.w[1] * nodes.value[t.v[1]] +
                loc.w[2] * nodes.value[t.v[2]];
      }
      out(r, c) = static_cast<float>(std::clamp(value, 0.0, 255.0));
    }
  });
  return out;
}

Image synthesize_conventional(const Image& right, const DisparityMap& disparity,
                              const SynthesisConfig& cfg, int threads) {
  check_synthesis_config(cfg);
  check_domain(disparity, DisparityDomain::pixel_horizontal,
               "synthesize_conventional");
  if (disparity.values.rows() != right.rows() ||
      disparity.values.cols() != right.cols())
    throw contract_error("synthesize_conventional: dimensions differ");

  const Index rows = right.rows(), cols = right.cols();
  WarpTargets targets;
  targets.row.resize(rows, cols);
  targets.col.resize(rows, cols);
  targets.value = right;
  parallel_for(0, rows, threads, [&](Index m) {
    for (Index n = 0; n < cols; ++n) {
      targets.row(m, n) = static_cast<double>(m);
      targets.col(m, n) = static_cast<double>(n) +
                          cfg.alpha * static_cast<double>(disparity.values(m, n));
    }
  });
  return resample_scattered(targets, rows, cols, cfg, threads);
}

WarpTargets compute_fisheye_warp_targets(const DisparityMap& disparity,
                                         const SynthesisConfig& cfg,
                                         const CameraModel& cam, int threads) {
  check_synthesis_config(cfg);
  check_domain(disparity, DisparityDomain::perspective_horizontal,
               "compute_fisheye_warp_targets");
  validate(cam);
  const Index rows = disparity.values.rows(), cols = disparity.values.cols();
  WarpTargets targets;
  targets.row.resize(rows, cols);
  targets.col.resize(rows, cols);
  const RadialMap map(cam);
  parallel_for(0, rows, threads, [&](Index m) {
    for (Index n = 0; n < cols; ++n) {
      const double offset =
          cfg.alpha * static_cast<double>(disparity.values(m, n));
      const PixelCoord src{static_cast<double>(m), static_cast<double>(n)};
      const PixelCoord dst = shift_in_perspective(src, offset, cam, map);
      targets.row(m, n) = dst.row;
      targets.col(m, n) = dst.col;
    }
  });
  return targets;
}

Image synthesize_fisheye(const Image& right, const DisparityMap& disparity,
                         const SynthesisConfig& cfg, const CameraModel& cam,
                         int threads) {
  if (disparity.values.rows() != right.rows() ||
      disparity.values.cols() != right.cols())
    throw contract_error("synthesize_fisheye: dimensions differ");
  WarpTargets targets =
      compute_fisheye_warp_targets(disparity, cfg, cam, threads);
  targets.value = right;
  return resample_scattered(targets, right.rows(), right.cols(), cfg, threads);
}

}  // namespace fstk
