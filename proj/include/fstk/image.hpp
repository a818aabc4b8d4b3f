// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>

#include "fstk/camera.hpp"
#include "fstk/types.hpp"

namespace fstk {

/// Bilinear lookup with clamp-to-border semantics: coordinates outside
/// [0, H-1] x [0, W-1] are clamped before interpolation, so every query
/// returns a value.  Integer coordinates reproduce stored samples exactly.
inline float sample_bilinear(const Image& img, double row, double col) {
  const double max_r = static_cast<double>(img.rows() - 1);
  const double max_c = static_cast<double>(img.cols() - 1);
  const double r = std::clamp(row, 0.0, max_r);
  const double c = std::clamp(col, 0.0, max_c);
  const Index r0 = static_cast<Index>(r);
  const Index c0 = static_cast<Index>(c);
  const Index r1 = std::min(r0 + 1, img.rows() - 1);
  const Index c1 = std::min(c0 + 1, img.cols() - 1);
  const double fr = r - static_cast<double>(r0);
  const double fc = c - static_cast<double>(c0);
  const double top = (1.0 - fc) * img(r0, c0) + fc * img(r0, c1);
  const double bot = (1.0 - fc) * img(r1, c0) + fc * img(r1, c1);
  return static_cast<float>((1.0 - fr) * top + fr * bot);
}

inline float sample_bilinear(const Image& img, const PixelCoord& at) {
  return sample_bilinear(img, at.row, at.col);
}

/// Replicates the border of `img` by `margin` pixels on every side.
inline Image pad_replicate(const Image& img, Index margin) {
  const Index h = img.rows(), w = img.cols();
  Image out(h + 2 * margin, w + 2 * margin);
  for (Index r = 0; r < out.rows(); ++r) {
    const Index sr = std::clamp<Index>(r - margin, 0, h - 1);
    for (Index c = 0; c < out.cols(); ++c) {
      const Index sc = std::clamp<Index>(c - margin, 0, w - 1);
      out(r, c) = img(sr, sc);
    }
  }
  return out;
}

}  // namespace fstk
