// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>

#include "fstk/camera.hpp"
#include "fstk/matching.hpp"
#include "fstk/types.hpp"

namespace fstk {

/// Binary 8-bit grayscale PGM (P5, maxval 255).  Values are rounded
/// half-away-from-zero and clamped to [0, 255] on write; reads are exact
/// for integer-valued images, so write(read(x)) is byte-identical.
Image read_image(const std::string& path);
void write_image(const std::string& path, const Image& img);

/// Single-channel 32-bit float PFM ("Pf", negative scale = little endian,
/// rows stored bottom-up).  Float bit patterns survive a round trip.
Image read_pfm(const std::string& path);
void write_pfm(const std::string& path, const Image& img);

/// Optional metadata carried next to a disparity map.
struct DisparitySidecar {
  std::optional<int> support_width;
  std::optional<int> search_range;
  std::optional<CameraModel> camera;
};

/// Disparity maps are PFM rasters plus a required key=value sidecar
/// (`<path>.meta`) recording the disparity domain and, when known, the
/// matching parameters and camera.  A missing sidecar is an error: the map
/// alone does not say what its offsets mean.
void write_disparity(const std::string& path, const DisparityMap& map,
                     const DisparitySidecar& meta = {});
std::pair<DisparityMap, DisparitySidecar> read_disparity(
    const std::string& path);

/// Plain `key = value` file with '#' comments and blank lines.
using KeyValueMap = std::map<std::string, std::string>;
KeyValueMap read_key_value_file(const std::string& path);

double get_double(const KeyValueMap& kv, const std::string& key);
double get_double_or(const KeyValueMap& kv, const std::string& key,
                     double fallback);

/// Binds a camera parameter file to an image size.  Recognised keys:
/// focal_length_px (required), center_row, center_col (default: image
/// centre), fov_deg (default 185), theta_lim_deg (default 85).
CameraModel make_camera(const KeyValueMap& kv, Index rows, Index cols);
CameraModel load_camera(const std::string& path, Index rows, Index cols);

/// Writes via a temp file in the same directory plus an atomic rename, so
/// the destination is either complete or absent.
void write_file_atomic(const std::string& path, const std::string& bytes);

}  // namespace fstk
