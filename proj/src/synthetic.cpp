// SPDX-License-Identifier: Apache-2.0
#include "fstk/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "fstk/io.hpp"
#include "fstk/parallel.hpp"

namespace fstk {

namespace {

constexpr double kPi = std::numbers::pi;

// The plane texture is a sum of sinusoid packs confined to concentric
// zones of the plane.  Pixels near the field-of-view rim look at the plane
// almost tangentially, so one global band limit would either blur the
// centre or undersample the rim; per-zone limits keep every frequency
// sampled finely wherever its zone is visible, while the zone windows form
// a partition of unity so the packs blend without overshoot.
struct SineTexture {
  struct Wave {
    double u, v, phase, amp;
    int zone;
  };
  std::vector<Wave> waves;
  std::vector<double> zone_edge;   // outer radius of zones 0..2 on the plane
  std::vector<double> zone_fade;   // crossfade width at each edge
  double offset = 127.5;

  // Rising smoothstep of the crossfade at zone edge i.
  double fade_up(double rho, size_t i) const {
    const double t =
        std::clamp((rho - zone_edge[i]) / zone_fade[i] + 0.5, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
  }

  double zone_weight(double rho, int zone) const {
    double w = 1.0;
    for (int i = 0; i < zone; ++i) w *= fade_up(rho, i);
    if (zone < static_cast<int>(zone_edge.size()))
      w *= 1.0 - fade_up(rho, zone);
    return w;
  }

  double eval(double x, double y) const {
    double value = offset;
    if (waves.empty()) return value;
    const double rho = std::hypot(x, y);
    double weight[4];
    for (int z = 0; z < 4; ++z) weight[z] = zone_weight(rho, z);
    for (const Wave& w : waves)
      value += weight[w.zone] * w.amp *
               std::sin(2.0 * kPi * (w.u * x + w.v * y) + w.phase);
    return value;
  }
};

// Portable uniform in [0, 1): 24 high bits of the engine output.
double uniform01(std::mt19937& rng) {
  return static_cast<double>(rng() >> 8) * 0x1p-24;
}

// Plane-coordinate step caused by a one-pixel move for a ray at incident
// angle theta.
double ground_sample_distance(double depth, double f, double theta) {
  const double t = std::tan(theta);
  return depth * (1.0 + t * t) / (f * std::cos(theta / 2.0));
}

// Largest incident angle that actually reaches rendered content.
double max_view_theta(const SceneSpec& scene) {
  const CameraModel& cam = scene.camera;
  const double corner_m = std::max(
      cam.center_row, static_cast<double>(scene.rows - 1) - cam.center_row);
  const double corner_n = std::max(
      cam.center_col, static_cast<double>(scene.cols - 1) - cam.center_col);
  const double r_corner = std::hypot(corner_m, corner_n);
  const double half_fov = std::min(cam.fov_deg * kPi / 360.0, kPi);
  const double r_mask = equisolid_project(half_fov, cam);
  const double f = cam.focal_length_px;
  const double r_eff = std::min({r_corner, r_mask, 2.0 * f});
  return 2.0 * std::asin(std::min(r_eff / (2.0 * f), 1.0));
}

SineTexture make_texture(const SceneSpec& scene, const PlaneSpec& plane) {
  // Zone boundaries in incident angle, then in plane radius.
  const double zone_theta[4] = {40.0 * kPi / 180.0, 60.0 * kPi / 180.0,
                                75.0 * kPi / 180.0, 88.0 * kPi / 180.0};
  const double f = scene.camera.focal_length_px;
  const double view_cap = std::min(max_view_theta(scene) + 2.0 * kPi / 180.0,
                                   88.0 * kPi / 180.0);

  SineTexture tex;
  for (int z = 0; z < 3; ++z) {
    const double rho = plane.depth * std::tan(zone_theta[z]);
    tex.zone_edge.push_back(rho);
    tex.zone_fade.push_back(0.24 * rho);
  }

  // Per-zone frequency ladder: amplitudes shrink as frequencies approach
  // the zone's sampling limit, which keeps the bilinear interpolation
  // error of a render below ~2 luminance levels RMS.
  const double freq_scale[4] = {0.8, 0.45, 0.25, 0.14};
  const double amp_share[4] = {0.03, 0.09, 0.28, 0.60};

  std::mt19937 rng(plane.seed);
  const int count = std::clamp(plane.waves, 0, 16);
  for (int z = 0; z < 4; ++z) {
    // Band limit at the farthest visible point of this zone (crossfade
    // included: zone z stays audible out to 1.12x its edge radius).
    const double reach =
        z < 3 ? std::atan(1.12 * std::tan(zone_theta[z])) : zone_theta[z];
    const double eval_theta = std::min(reach, view_cap);
    const double gsd = ground_sample_distance(plane.depth, f, eval_theta);
    const double freq_cap = 1.0 / (4.0 * gsd);
    for (int k = 0; k < 4; ++k) {
      const double direction = 2.0 * kPi * uniform01(rng);
      const double phase = 2.0 * kPi * uniform01(rng);
      if (z * 4 + k >= count) continue;
      SineTexture::Wave w;
      const double freq = freq_cap * freq_scale[k];
      w.u = freq * std::cos(direction);
      w.v = freq * std::sin(direction);
      w.phase = phase;
      w.amp = 90.0 * amp_share[k];
      w.zone = z;
      tex.waves.push_back(w);
    }
  }
  return tex;
}

struct PlaneHit {
  bool hit = false;
  double depth = 0.0;
  double value = 0.0;
};

// Planes and textures paired and sorted near-to-far.
struct PreparedScene {
  const SceneSpec* scene;
  std::vector<const PlaneSpec*> planes;
  std::vector<SineTexture> textures;
  double mask_radius2;

  explicit PreparedScene(const SceneSpec& s) : scene(&s) {
    validate(s);
    for (const PlaneSpec& p : s.planes) planes.push_back(&p);
    std::stable_sort(planes.begin(), planes.end(),
                     [](const PlaneSpec* a, const PlaneSpec* b) {
                       return a->depth < b->depth;
                     });
    for (const PlaneSpec* p : planes)
      textures.push_back(make_texture(s, *p));
    const double half_fov =
        std::min(s.camera.fov_deg * kPi / 360.0, kPi);
    const double radius = equisolid_project(half_fov, s.camera);
    mask_radius2 = radius * radius;
  }

  // Casts the ray of pixel (m, n) from a camera at `offset` and returns
  // the nearest plane intersection.
  PlaneHit trace(double m, double n, double offset) const {
    const CameraModel& cam = scene->camera;
    const double dm = m - cam.center_row;
    const double dn = n - cam.center_col;
    const double r2 = dm * dm + dn * dn;
    if (r2 > mask_radius2) return {};
    const double r = std::sqrt(r2);
    const double phi = r == 0.0 ? 0.0 : std::atan2(-dm, dn);
    const double theta =
        2.0 * std::asin(std::min(r / (2.0 * cam.focal_length_px), 1.0));
    const double cos_theta = std::cos(theta);
    if (cos_theta <= 1e-12) return {};  // sideways or behind: no plane hit
    const double radial = std::tan(theta);
    for (size_t i = 0; i < planes.size(); ++i) {
      const PlaneSpec& p = *planes[i];
      const double x = offset + p.depth * radial * std::cos(phi);
      const double y = p.depth * radial * std::sin(phi);
      if (std::abs(x - p.center_x) > p.width / 2.0 ||
          std::abs(y - p.center_y) > p.height / 2.0)
        continue;
      PlaneHit hit;
      hit.hit = true;
      hit.depth = p.depth;
      hit.value = std::clamp(textures[i].eval(x, y), 0.0, 255.0);
      return hit;
    }
    return {};
  }
};

}  // namespace

void validate(const SceneSpec& scene) {
  validate(scene.camera);
  if (scene.rows <= 0 || scene.cols <= 0)
    throw contract_error("scene: image dimensions must be positive");
  if (!(scene.baseline > 0.0))
    throw contract_error("scene: baseline must be positive");
  if (scene.planes.empty())
    throw contract_error("scene: at least one plane required");
  for (const PlaneSpec& p : scene.planes) {
    if (!(p.depth > 0.0)) throw contract_error("scene: plane depth must be positive");
    if (!(p.width > 0.0) || !(p.height > 0.0))
      throw contract_error("scene: plane extent must be positive");
  }
}

SceneSpec load_scene(const std::string& path) {
  const KeyValueMap kv = read_key_value_file(path);
  SceneSpec scene;
  scene.rows = static_cast<Index>(get_double(kv, "height"));
  scene.cols = static_cast<Index>(get_double(kv, "width"));
  if (scene.rows <= 0 || scene.cols <= 0)
    throw io_error("'" + path + "': width and height must be positive");
  scene.camera = make_camera(kv, scene.rows, scene.cols);
  scene.baseline = get_double(kv, "baseline");

  std::set<std::string> known = {"height",        "width",      "baseline",
                                 "focal_length_px", "center_row", "center_col",
                                 "fov_deg",       "theta_lim_deg"};
  for (int k = 1;; ++k) {
    const std::string prefix = "plane" + std::to_string(k) + "_";
    if (!kv.count(prefix + "depth")) break;
    PlaneSpec plane;
    plane.depth = get_double(kv, prefix + "depth");
    plane.seed =
        static_cast<std::uint32_t>(get_double_or(kv, prefix + "seed", k));
    plane.center_x = get_double_or(kv, prefix + "center_x", 0.0);
    plane.center_y = get_double_or(kv, prefix + "center_y", 0.0);
    plane.width = get_double_or(kv, prefix + "width",
                                std::numeric_limits<double>::infinity());
    plane.height = get_double_or(kv, prefix + "height",
                                 std::numeric_limits<double>::infinity());
    plane.waves = static_cast<int>(get_double_or(kv, prefix + "waves", 16.0));
    scene.planes.push_back(plane);
    for (const char* suffix :
         {"depth", "seed", "center_x", "center_y", "width", "height", "waves"})
      known.insert(prefix + suffix);
  }
  for (const auto& [key, value] : kv)
    if (!known.count(key))
      throw io_error("'" + path + "': unknown scene key '" + key + "'");
  validate(scene);
  return scene;
}

Image render_fisheye_view(const SceneSpec& scene, double camera_offset,
                          int threads) {
  const PreparedScene prepared(scene);
  Image out(scene.rows, scene.cols);
  parallel_for(0, scene.rows, threads, [&](Index m) {
    for (Index n = 0; n < scene.cols; ++n) {
      const PlaneHit hit = prepared.trace(static_cast<double>(m),
                                          static_cast<double>(n),
                                          camera_offset);
      out(m, n) = hit.hit ? static_cast<float>(hit.value) : 0.0f;
    }
  });
  return out;
}

DisparityMap ground_truth_disparity(const SceneSpec& scene, int threads) {
  const PreparedScene prepared(scene);
  DisparityMap map;
  map.domain = DisparityDomain::perspective_horizontal;
  map.values.resize(scene.rows, scene.cols);
  const double f = scene.camera.focal_length_px;
  parallel_for(0, scene.rows, threads, [&](Index m) {
    for (Index n = 0; n < scene.cols; ++n) {
      const PlaneHit hit = prepared.trace(static_cast<double>(m),
                                          static_cast<double>(n),
                                          scene.baseline);
      map.values(m, n) =
          hit.hit ? static_cast<float>(f * scene.baseline / hit.depth) : 0.0f;
    }
  });
  return map;
}

}  // namespace fstk
