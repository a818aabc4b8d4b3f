// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <doctest.h>
#include <random>

#include "fstk/camera.hpp"
#include "fstk/synthesis.hpp"

using namespace fstk;

namespace {

Image noise_image(Index rows, Index cols, unsigned seed) {
  std::mt19937 rng(seed);
  Image img(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c)
      img(r, c) = static_cast<float>(rng() % 256);
  return img;
}

// Loose targets helper: a flat list of points laid out as a 1-row raster.
WarpTargets point_targets(const std::vector<double>& rows,
                          const std::vector<double>& cols,
                          const std::vector<float>& values) {
  WarpTargets t;
  const Index n = static_cast<Index>(rows.size());
  t.row.resize(1, n);
  t.col.resize(1, n);
  t.value.resize(1, n);
  for (Index i = 0; i < n; ++i) {
    t.row(0, i) = rows[i];
    t.col(0, i) = cols[i];
    t.value(0, i) = values[i];
  }
  return t;
}

DisparityMap constant_map(Index rows, Index cols, float d,
                          DisparityDomain domain) {
  DisparityMap map;
  map.domain = domain;
  map.values = Image::Constant(rows, cols, d);
  return map;
}

CameraModel camera_for(Index rows, Index cols, double f) {
  CameraModel cam;
  cam.focal_length_px = f;
  cam.center_row = (static_cast<double>(rows) - 1.0) / 2.0;
  cam.center_col = (static_cast<double>(cols) - 1.0) / 2.0;
  return cam;
}

}  // namespace

TEST_CASE("grid-aligned targets reproduce their values exactly") {
  const Image img = noise_image(9, 11, 4);
  WarpTargets t;
  t.row.resize(9, 11);
  t.col.resize(9, 11);
  for (Index r = 0; r < 9; ++r)
    for (Index c = 0; c < 11; ++c) {
      t.row(r, c) = static_cast<double>(r);
      t.col(r, c) = static_cast<double>(c);
    }
  t.value = img;
  const Image out = resample_scattered(t, 9, 11, SynthesisConfig{});
  CHECK((out == img).all());
}

TEST_CASE("barycentric symmetry at a triangle centroid") {
  const WarpTargets t =
      point_targets({0.0, 0.0, 3.0}, {0.0, 3.0, 0.0}, {0.0f, 30.0f, 60.0f});
  const Image out = resample_scattered(t, 4, 4, SynthesisConfig{});
  CHECK(out(1, 1) == 30.0f);  // centroid of the triangle
  CHECK(out(0, 0) == 0.0f);
  CHECK(out(0, 3) == 30.0f);
  CHECK(out(3, 0) == 60.0f);
  CHECK(out(3, 3) == 0.0f);  // outside the hull
}

TEST_CASE("coincident targets keep the last written value") {
  const WarpTargets t = point_targets({0, 0, 3, 0}, {0, 3, 0, 0},
                                      {10.0f, 30.0f, 60.0f, 200.0f});
  const Image out = resample_scattered(t, 4, 4, SynthesisConfig{});
  CHECK(out(0, 0) == 200.0f);
}

TEST_CASE("degenerate target sets are rejected") {
  CHECK_THROWS_AS(resample_scattered(point_targets({0, 1}, {0, 1}, {1, 2}), 2,
                                     2, SynthesisConfig{}),
                  contract_error);
  CHECK_THROWS_AS(
      resample_scattered(
          point_targets({0, 1, 2, 3, 4}, {0, 1, 2, 3, 4}, {1, 2, 3, 4, 5}), 5,
          5, SynthesisConfig{}),
      contract_error);
  WarpTargets bad = point_targets({0, 0, 3}, {0, 3, 0}, {1, 2, 3});
  bad.row(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(resample_scattered(bad, 4, 4, SynthesisConfig{}),
                  contract_error);
}

TEST_CASE("conventional synthesis identities") {
  const Image right = noise_image(14, 18, 6);
  SynthesisConfig cfg;

  const DisparityMap zero =
      constant_map(14, 18, 0.0f, DisparityDomain::pixel_horizontal);
  CHECK((synthesize_conventional(right, zero, cfg) == right).all());

  const DisparityMap four =
      constant_map(14, 18, 4.0f, DisparityDomain::pixel_horizontal);
  cfg.alpha = 0.0;
  CHECK((synthesize_conventional(right, four, cfg) == right).all());
}

TEST_CASE("conventional synthesis shifts by alpha times the disparity") {
  const Image right = noise_image(14, 20, 7);
  SynthesisConfig cfg;
  cfg.alpha = 0.5;
  const DisparityMap four =
      constant_map(14, 20, 4.0f, DisparityDomain::pixel_horizontal);
  const Image out = synthesize_conventional(right, four, cfg);
  for (Index m = 0; m < 14; ++m) {
    for (Index n = 2; n < 20; ++n)
      CHECK(std::abs(out(m, n) - right(m, n - 2)) < 1e-6f);
    CHECK(out(m, 0) == 0.0f);  // left of every warped sample
  }
}

TEST_CASE("synthesis rejects maps from the other domain") {
  const Image right = noise_image(10, 12, 8);
  const CameraModel cam = camera_for(10, 12, 50.0);
  const DisparityMap pixel =
      constant_map(10, 12, 1.0f, DisparityDomain::pixel_horizontal);
  const DisparityMap persp =
      constant_map(10, 12, 1.0f, DisparityDomain::perspective_horizontal);
  CHECK_THROWS_AS(synthesize_conventional(right, persp, SynthesisConfig{}),
                  contract_error);
  CHECK_THROWS_AS(
      synthesize_fisheye(right, pixel, SynthesisConfig{}, cam),
      contract_error);
  SynthesisConfig bad;
  bad.alpha = 1.5;
  CHECK_THROWS_AS(synthesize_conventional(right, pixel, bad), contract_error);
}

TEST_CASE("fisheye warp targets") {
  const Index rows = 33, cols = 33;
  const CameraModel cam = camera_for(rows, cols, 100.0);

  SUBCASE("zero disparity and zero alpha are exact identities") {
    const DisparityMap zero =
        constant_map(rows, cols, 0.0f, DisparityDomain::perspective_horizontal);
    SynthesisConfig cfg;
    const WarpTargets t = compute_fisheye_warp_targets(zero, cfg, cam);
    for (Index m = 0; m < rows; ++m)
      for (Index n = 0; n < cols; ++n) {
        CHECK(t.row(m, n) == static_cast<double>(m));
        CHECK(t.col(m, n) == static_cast<double>(n));
      }
    const DisparityMap big =
        constant_map(rows, cols, 9.0f, DisparityDomain::perspective_horizontal);
    cfg.alpha = 0.0;
    const WarpTargets t0 = compute_fisheye_warp_targets(big, cfg, cam);
    CHECK(t0.row(5, 7) == 5.0);
    CHECK(t0.col(5, 7) == 7.0);
  }

  SUBCASE("principal point moves by the re-projected half disparity") {
    DisparityMap map =
        constant_map(rows, cols, 20.0f, DisparityDomain::perspective_horizontal);
    SynthesisConfig cfg;
    cfg.alpha = 0.5;
    const WarpTargets t = compute_fisheye_warp_targets(map, cfg, cam);
    CHECK(t.row(16, 16) == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(t.col(16, 16) - 16.0 == doctest::Approx(9.96275).epsilon(1e-4));
  }

  SUBCASE("perspective column is affine in alpha") {
    std::mt19937 rng(3);
    DisparityMap map =
        constant_map(rows, cols, 0.0f, DisparityDomain::perspective_horizontal);
    for (Index i = 0; i < map.values.size(); ++i)
      map.values.data()[i] = static_cast<float>(rng() % 12);
    SynthesisConfig c0, c25, c50;
    c0.alpha = 0.0;
    c25.alpha = 0.25;
    c50.alpha = 0.5;
    const WarpTargets t0 = compute_fisheye_warp_targets(map, c0, cam);
    const WarpTargets t25 = compute_fisheye_warp_targets(map, c25, cam);
    const WarpTargets t50 = compute_fisheye_warp_targets(map, c50, cam);
    const RadialMap radial(cam);
    auto persp_col = [&](double row, double col) {
      const PolarFisheye pf = pixel_to_polar(PixelCoord{row, col}, cam);
      return radial.to_perspective(pf.radius_px) * std::cos(pf.phi);
    };
    for (Index m = 1; m < rows; m += 5)
      for (Index n = 1; n < cols; n += 5) {
        const double a = persp_col(t0.row(m, n), t0.col(m, n));
        const double b = persp_col(t25.row(m, n), t25.col(m, n));
        const double c = persp_col(t50.row(m, n), t50.col(m, n));
        CHECK(b - a == doctest::Approx((c - a) / 2.0).epsilon(1e-9));
      }
  }
}

TEST_CASE("fisheye synthesis with zero disparity is the identity") {
  const Index rows = 21, cols = 21;
  const Image right = noise_image(rows, cols, 12);
  const CameraModel cam = camera_for(rows, cols, 80.0);
  const DisparityMap zero =
      constant_map(rows, cols, 0.0f, DisparityDomain::perspective_horizontal);
  const Image out = synthesize_fisheye(right, zero, SynthesisConfig{}, cam);
  CHECK((out == right).all());
}

TEST_CASE("output stays in range and is deterministic across workers") {
  const Index rows = 40, cols = 40;
  const Image right = noise_image(rows, cols, 17);
  const CameraModel cam = camera_for(rows, cols, 60.0);
  DisparityMap map =
      constant_map(rows, cols, 0.0f, DisparityDomain::perspective_horizontal);
  std::mt19937 rng(9);
  for (Index i = 0; i < map.values.size(); ++i)
    map.values.data()[i] = static_cast<float>(rng() % 10);

  for (ScatterInterp interp : {ScatterInterp::linear, ScatterInterp::cubic}) {
    SynthesisConfig cfg;
    cfg.interpolation = interp;
    const Image one = synthesize_fisheye(right, map, cfg, cam, 1);
    const Image two = synthesize_fisheye(right, map, cfg, cam, 2);
    const Image eight = synthesize_fisheye(right, map, cfg, cam, 8);
    CHECK((one == two).all());
    CHECK((one == eight).all());
    CHECK((one >= 0.0f).all());
    CHECK((one <= 255.0f).all());
  }
}

TEST_CASE("cubic resampling reproduces nodes and linear fields") {
  std::mt19937 rng(31);
  auto u = [&] { return (rng() >> 8) * 0x1p-24; };
  const int n = 60;
  std::vector<double> rows_v, cols_v;
  std::vector<float> affine_v;
  for (int i = 0; i < n; ++i) {
    const double r = u() * 19.0, c = u() * 19.0;
    rows_v.push_back(r);
    cols_v.push_back(c);
    affine_v.push_back(static_cast<float>(40.0 + 3.0 * c - 2.0 * r));
  }
  // Pin the corners so the whole grid is interior.
  const double corners[4][2] = {{0, 0}, {0, 19}, {19, 0}, {19, 19}};
  for (const auto& corner : corners) {
    rows_v.push_back(corner[0]);
    cols_v.push_back(corner[1]);
    affine_v.push_back(
        static_cast<float>(40.0 + 3.0 * corner[1] - 2.0 * corner[0]));
  }
  const WarpTargets targets = point_targets(rows_v, cols_v, affine_v);

  SynthesisConfig cubic;
  cubic.interpolation = ScatterInterp::cubic;
  const Image out = resample_scattered(targets, 20, 20, cubic);
  for (Index r = 0; r < 20; ++r)
    for (Index c = 0; c < 20; ++c)
      CHECK(out(r, c) ==
            doctest::Approx(40.0 + 3.0 * c - 2.0 * r).epsilon(1e-6));
}

TEST_CASE("cubic beats linear on a smooth field") {
  std::mt19937 rng(77);
  auto u = [&] { return (rng() >> 8) * 0x1p-24; };
  auto field = [](double r, double c) {
    return 100.0 + 60.0 * std::sin(0.11 * c) * std::cos(0.09 * r);
  };
  std::vector<double> rows_v, cols_v;
  std::vector<float> vals;
  for (int i = 0; i < 240; ++i) {
    const double r = u() * 39.0, c = u() * 39.0;
    rows_v.push_back(r);
    cols_v.push_back(c);
    vals.push_back(static_cast<float>(field(r, c)));
  }
  const double corners[4][2] = {{0, 0}, {0, 39}, {39, 0}, {39, 39}};
  for (const auto& corner : corners) {
    rows_v.push_back(corner[0]);
    cols_v.push_back(corner[1]);
    vals.push_back(static_cast<float>(field(corner[0], corner[1])));
  }
  const WarpTargets targets = point_targets(rows_v, cols_v, vals);

  SynthesisConfig linear, cubic;
  cubic.interpolation = ScatterInterp::cubic;
  const Image lin = resample_scattered(targets, 40, 40, linear);
  const Image cub = resample_scattered(targets, 40, 40, cubic);
  double lin_err = 0.0, cub_err = 0.0;
  for (Index r = 0; r < 40; ++r)
    for (Index c = 0; c < 40; ++c) {
      const double want = field(r, c);
      lin_err += (lin(r, c) - want) * (lin(r, c) - want);
      cub_err += (cub(r, c) - want) * (cub(r, c) - want);
    }
  CHECK(cub_err < lin_err);
}
