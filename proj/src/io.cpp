// SPDX-License-Identifier: Apache-2.0
#include "fstk/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fstk {

namespace {

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Skips PGM-style whitespace and '#' comments, then parses a nonnegative
// integer token.  `pos` advances past the token.
long parse_header_int(const std::string& bytes, size_t& pos,
                      const std::string& path) {
  while (pos < bytes.size()) {
    const char ch = bytes[pos];
    if (ch == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      ++pos;
    } else {
      break;
    }
  }
  if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos])))
    throw io_error("'" + path + "': malformed header at byte offset " +
                   std::to_string(pos));
  long value = 0;
  while (pos < bytes.size() &&
         std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
    value = value * 10 + (bytes[pos] - '0');
    ++pos;
    if (value > 1'000'000'000L)
      throw io_error("'" + path + "': header value out of range");
  }
  return value;
}

}  // namespace

Image read_image(const std::string& path) {
  const std::string bytes = read_all(path);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw io_error("'" + path + "': not a binary PGM (missing P5 magic)");
  size_t pos = 2;
  const long width = parse_header_int(bytes, pos, path);
  const long height = parse_header_int(bytes, pos, path);
  const long maxval = parse_header_int(bytes, pos, path);
  if (width <= 0 || height <= 0)
    throw io_error("'" + path + "': dimensions must be positive");
  if (maxval != 255)
    throw io_error("'" + path + "': maxval " + std::to_string(maxval) +
                   " unsupported (must be 255)");
  if (pos >= bytes.size() ||
      !std::isspace(static_cast<unsigned char>(bytes[pos])))
    throw io_error("'" + path + "': malformed header at byte offset " +
                   std::to_string(pos));
  ++pos;  // single whitespace byte before the raster
  const size_t expected = static_cast<size_t>(width) * height;
  const size_t available = bytes.size() - pos;
  if (available < expected)
    throw io_error("'" + path + "': truncated payload, expected " +
                   std::to_string(expected) + " bytes but found " +
                   std::to_string(available));
  Image img(height, width);
  const auto* raster = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  for (Index r = 0; r < img.rows(); ++r)
    for (Index c = 0; c < img.cols(); ++c)
      img(r, c) = static_cast<float>(raster[r * width + c]);
  return img;
}

void write_image(const std::string& path, const Image& img) {
  if (img.rows() <= 0 || img.cols() <= 0)
    throw contract_error("write_image: empty image");
  std::string out;
  out += "P5\n" + std::to_string(img.cols()) + " " +
         std::to_string(img.rows()) + "\n255\n";
  out.reserve(out.size() + static_cast<size_t>(img.size()));
  for (Index r = 0; r < img.rows(); ++r)
    for (Index c = 0; c < img.cols(); ++c) {
      const long v = std::lround(static_cast<double>(img(r, c)));
      out += static_cast<char>(std::clamp(v, 0L, 255L));
    }
  write_file_atomic(path, out);
}

Image read_pfm(const std::string& path) {
  const std::string bytes = read_all(path);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != 'f')
    throw io_error("'" + path +
                   "': not a grayscale PFM (missing Pf magic; color PF is "
                   "unsupported)");
  size_t pos = 2;
  const long width = parse_header_int(bytes, pos, path);
  const long height = parse_header_int(bytes, pos, path);
  while (pos < bytes.size() &&
         std::isspace(static_cast<unsigned char>(bytes[pos])))
    ++pos;
  size_t scale_end = pos;
  while (scale_end < bytes.size() &&
         !std::isspace(static_cast<unsigned char>(bytes[scale_end])))
    ++scale_end;
  double scale = 0.0;
  try {
    scale = std::stod(bytes.substr(pos, scale_end - pos));
  } catch (const std::exception&) {
    throw io_error("'" + path + "': malformed scale at byte offset " +
                   std::to_string(pos));
  }
  if (scale >= 0.0)
    throw io_error("'" + path + "': big-endian PFM payloads are unsupported");
  pos = scale_end;
  if (pos >= bytes.size() ||
      !std::isspace(static_cast<unsigned char>(bytes[pos])))
    throw io_error("'" + path + "': malformed header at byte offset " +
                   std::to_string(pos));
  ++pos;
  if (width <= 0 || height <= 0)
    throw io_error("'" + path + "': dimensions must be positive");
  const size_t expected = static_cast<size_t>(width) * height * sizeof(float);
  const size_t available = bytes.size() - pos;
  if (available < expected)
    throw io_error("'" + path + "': truncated payload, expected " +
                   std::to_string(expected) + " bytes but found " +
                   std::to_string(available));
  Image img(height, width);
  // PFM rasters run bottom-to-top.
  for (Index r = 0; r < img.rows(); ++r) {
    const size_t src = pos + static_cast<size_t>(height - 1 - r) * width *
                                 sizeof(float);
    std::memcpy(img.data() + r * width, bytes.data() + src,
                static_cast<size_t>(width) * sizeof(float));
  }
  return img;
}

void write_pfm(const std::string& path, const Image& img) {
  if (img.rows() <= 0 || img.cols() <= 0)
    throw contract_error("write_pfm: empty image");
  std::string out;
  out += "Pf\n" + std::to_string(img.cols()) + " " +
         std::to_string(img.rows()) + "\n-1.0\n";
  const size_t header = out.size();
  out.resize(header + static_cast<size_t>(img.size()) * sizeof(float));
  for (Index r = 0; r < img.rows(); ++r) {
    const size_t dst =
        header +
        static_cast<size_t>(img.rows() - 1 - r) * img.cols() * sizeof(float);
    std::memcpy(out.data() + dst, img.data() + r * img.cols(),
                static_cast<size_t>(img.cols()) * sizeof(float));
  }
  write_file_atomic(path, out);
}

namespace {

const char* domain_name(DisparityDomain d) {
  return d == DisparityDomain::pixel_horizontal ? "pixel_horizontal"
                                                : "perspective_horizontal";
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

void write_disparity(const std::string& path, const DisparityMap& map,
                     const DisparitySidecar& meta) {
  write_pfm(path, map.values);
  std::ostringstream side;
  side << "domain_tag=" << domain_name(map.domain) << "\n";
  if (meta.support_width)
    side << "support_width=" << *meta.support_width << "\n";
  if (meta.search_range) side << "search_range=" << *meta.search_range << "\n";
  if (meta.camera) {
    const CameraModel& cam = *meta.camera;
    side << "focal_length_px=" << format_double(cam.focal_length_px) << "\n"
         << "center_row=" << format_double(cam.center_row) << "\n"
         << "center_col=" << format_double(cam.center_col) << "\n"
         << "fov_deg=" << format_double(cam.fov_deg) << "\n"
         << "theta_lim_deg="
         << format_double(cam.theta_lim_rad * 180.0 /
                          3.14159265358979323846)
         << "\n";
  }
  write_file_atomic(path + ".meta", side.str());
}

std::pair<DisparityMap, DisparitySidecar> read_disparity(
    const std::string& path) {
  Image values = read_pfm(path);
  const std::string meta_path = path + ".meta";
  if (!std::filesystem::exists(meta_path))
    throw io_error("'" + meta_path +
                   "': disparity sidecar missing; regenerate the map with "
                   "`fstk estimate` (or `fstk render --gt-disparity`)");
  const KeyValueMap kv = read_key_value_file(meta_path);
  const auto tag = kv.find("domain_tag");
  if (tag == kv.end())
    throw io_error("'" + meta_path + "': missing domain_tag");
  DisparityMap map;
  if (tag->second == "pixel_horizontal")
    map.domain = DisparityDomain::pixel_horizontal;
  else if (tag->second == "perspective_horizontal")
    map.domain = DisparityDomain::perspective_horizontal;
  else
    throw io_error("'" + meta_path + "': unknown domain_tag '" + tag->second +
                   "'");
  for (Index i = 0; i < values.size(); ++i) {
    const float v = values.data()[i];
    if (!std::isfinite(v) || v < 0.0f)
      throw io_error("'" + path + "': disparity entries must be finite and "
                     "nonnegative");
  }
  map.values = std::move(values);

  DisparitySidecar meta;
  if (kv.count("support_width"))
    meta.support_width = static_cast<int>(get_double(kv, "support_width"));
  if (kv.count("search_range"))
    meta.search_range = static_cast<int>(get_double(kv, "search_range"));
  if (kv.count("focal_length_px"))
    meta.camera = make_camera(kv, map.values.rows(), map.values.cols());
  return {std::move(map), std::move(meta)};
}

KeyValueMap read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  KeyValueMap kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    if (strip(line).empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw io_error("'" + path + "' line " + std::to_string(line_no) +
                     ": expected key=value");
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key.empty())
      throw io_error("'" + path + "' line " + std::to_string(line_no) +
                     ": empty key");
    kv[key] = value;
  }
  return kv;
}

double get_double(const KeyValueMap& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw io_error("missing required key '" + key + "'");
  try {
    size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw io_error("key '" + key + "': cannot parse '" + it->second +
                   "' as a number");
  }
}

double get_double_or(const KeyValueMap& kv, const std::string& key,
                     double fallback) {
  return kv.count(key) ? get_double(kv, key) : fallback;
}

CameraModel make_camera(const KeyValueMap& kv, Index rows, Index cols) {
  CameraModel cam;
  cam.focal_length_px = get_double(kv, "focal_length_px");
  cam.center_row =
      get_double_or(kv, "center_row", (static_cast<double>(rows) - 1.0) / 2.0);
  cam.center_col =
      get_double_or(kv, "center_col", (static_cast<double>(cols) - 1.0) / 2.0);
  cam.fov_deg = get_double_or(kv, "fov_deg", 185.0);
  cam.theta_lim_rad = get_double_or(kv, "theta_lim_deg", 85.0) *
                      3.14159265358979323846 / 180.0;
  validate(cam);
  return cam;
}

CameraModel load_camera(const std::string& path, Index rows, Index cols) {
  return make_camera(read_key_value_file(path), rows, cols);
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp-" + std::to_string(
                       std::hash<std::string>{}(path + "\n" +
                                                std::to_string(bytes.size())) &
                       0xffffff);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw io_error("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw io_error("cannot move '" + tmp.string() + "' to '" + path +
                   "': " + ec.message());
  }
}

}  // namespace fstk
