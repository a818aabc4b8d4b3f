// SPDX-License-Identifier: Apache-2.0
//
// fstk: fisheye stereo toolkit command line.
//
// Subcommands: estimate, synthesize, evaluate, render, pipeline.
// Exit codes: 0 success, 1 usage, 2 I/O or file format, 3 contract
// violations (dimension or domain-tag mismatches, invalid parameters).

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "fstk/evaluation.hpp"
#include "fstk/io.hpp"
#include "fstk/matching.hpp"
#include "fstk/synthesis.hpp"
#include "fstk/synthetic.hpp"
#include "fstk/types.hpp"

namespace {

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int threads_from(const std::optional<int>& flag) {
  if (flag) {
    if (*flag < 0) throw usage_error("--threads must be >= 0");
    return *flag;
  }
  if (const char* env = std::getenv("FSTK_THREADS")) {
    try {
      size_t used = 0;
      const int value = std::stoi(env, &used);
      if (used != std::string(env).size() || value < 0)
        throw std::invalid_argument("range");
      return value;
    } catch (const std::exception&) {
      throw usage_error(std::string("FSTK_THREADS='") + env +
                        "' is not a valid worker count");
    }
  }
  return 0;
}

std::string format_psnr(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

fstk::ScatterInterp parse_interp(const std::string& name) {
  return name == "cubic" ? fstk::ScatterInterp::cubic
                         : fstk::ScatterInterp::linear;
}

fstk::CameraModel camera_for(const std::optional<std::string>& camera_path,
                             const std::optional<fstk::CameraModel>& fallback,
                             fstk::Index rows, fstk::Index cols,
                             const char* why) {
  if (camera_path) return fstk::load_camera(*camera_path, rows, cols);
  if (fallback) return *fallback;
  throw usage_error(std::string("--camera is required ") + why);
}

// ---------------------------------------------------------------------------

void run_estimate(const std::string& left_path, const std::string& right_path,
                  const std::string& mode,
                  const std::optional<std::string>& camera_path, int w, int s,
                  const std::optional<int>& threads_flag,
                  const std::string& out_path) {
  const int threads = threads_from(threads_flag);
  const fstk::Image left = fstk::read_image(left_path);
  const fstk::Image right = fstk::read_image(right_path);
  fstk::MatchConfig cfg;
  cfg.support_width = w;
  cfg.search_range = s;
  fstk::DisparitySidecar meta;
  meta.support_width = w;
  meta.search_range = s;
  fstk::DisparityMap map;
  if (mode == "horizontal") {
    map = fstk::estimate_disparity_horizontal(left, right, cfg, threads);
  } else {
    const fstk::CameraModel cam = camera_for(
        camera_path, std::nullopt, right.rows(), right.cols(),
        "for fisheye-mode estimation");
    map = fstk::estimate_disparity_fisheye(left, right, cfg, cam, threads);
    meta.camera = cam;
  }
  fstk::write_disparity(out_path, map, meta);
}

void run_synthesize(const std::string& right_path,
                    const std::string& disparity_path, const std::string& mode,
                    double alpha, const std::string& interp,
                    const std::optional<std::string>& camera_path,
                    const std::optional<int>& threads_flag,
                    const std::string& out_path) {
  const int threads = threads_from(threads_flag);
  const fstk::Image right = fstk::read_image(right_path);
  auto [map, meta] = fstk::read_disparity(disparity_path);
  fstk::SynthesisConfig cfg;
  cfg.alpha = alpha;
  cfg.interpolation = parse_interp(interp);
  fstk::Image out;
  if (mode == "horizontal") {
    out = fstk::synthesize_conventional(right, map, cfg, threads);
  } else {
    const fstk::CameraModel cam =
        camera_for(camera_path, meta.camera, right.rows(), right.cols(),
                   "for fisheye-mode synthesis (none found in the disparity "
                   "sidecar either)");
    out = fstk::synthesize_fisheye(right, map, cfg, cam, threads);
  }
  fstk::write_image(out_path, out);
}

void run_evaluate(const std::optional<std::string>& test_path,
                  const std::optional<std::string>& ref_path,
                  const std::optional<std::string>& camera_path, bool no_mask,
                  const std::optional<std::string>& pairs_path,
                  const std::optional<std::string>& csv_path) {
  auto psnr_of = [&](const std::string& a, const std::string& b) {
    const fstk::Image test = fstk::read_image(a);
    const fstk::Image ref = fstk::read_image(b);
    fstk::Mask mask;
    if (no_mask) {
      mask = fstk::Mask::Constant(test.rows(), test.cols(), true);
    } else {
      const fstk::CameraModel cam =
          camera_for(camera_path, std::nullopt, test.rows(), test.cols(),
                     "to build the field-of-view mask (or pass --no-mask)");
      mask = fstk::build_fov_mask(cam, test.rows(), test.cols());
    }
    return fstk::psnr_masked(test, ref, mask);
  };

  if (pairs_path) {
    std::ifstream in(*pairs_path);
    if (!in) throw fstk::io_error("cannot open '" + *pairs_path + "'");
    std::ostringstream csv;
    csv << "pair_id,psnr_db\n";
    double total = 0.0;
    long finite = 0, skipped = 0;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      std::istringstream row(line);
      std::string id, a, b;
      if (!std::getline(row, id, ',') || !std::getline(row, a, ',') ||
          !std::getline(row, b, ','))
        throw fstk::io_error("'" + *pairs_path + "' line " +
                             std::to_string(line_no) +
                             ": expected pair_id,test_path,ref_path");
      const double psnr = psnr_of(a, b);
      csv << id << "," << format_psnr(psnr) << "\n";
      if (std::isinf(psnr)) {
        ++skipped;
        std::cerr << "warning: pair '" << id
                  << "' is infinite and excluded from the average\n";
      } else {
        total += psnr;
        ++finite;
      }
    }
    if (csv_path)
      fstk::write_file_atomic(*csv_path, csv.str());
    else
      std::cout << csv.str();
    if (finite > 0)
      std::cout << "PSNR_dB=" << format_psnr(total / finite) << "\n";
    else
      std::cout << "PSNR_dB=" << (skipped > 0 ? "inf" : "nan") << "\n";
    return;
  }

  if (!test_path || !ref_path)
    throw usage_error("evaluate needs --test and --ref (or --pairs)");
  std::cout << "PSNR_dB=" << format_psnr(psnr_of(*test_path, *ref_path))
            << "\n";
}

void run_render(const std::string& scene_path, double offset,
                bool gt_disparity, const std::optional<int>& threads_flag,
                const std::string& out_path) {
  const int threads = threads_from(threads_flag);
  const fstk::SceneSpec scene = fstk::load_scene(scene_path);
  if (gt_disparity) {
    const fstk::DisparityMap map = fstk::ground_truth_disparity(scene, threads);
    fstk::DisparitySidecar meta;
    meta.camera = scene.camera;
    fstk::write_disparity(out_path, map, meta);
    return;
  }
  fstk::write_image(out_path, fstk::render_fisheye_view(scene, offset, threads));
}

void run_pipeline(const std::string& scene_path, int w, int s, double alpha,
                  const std::string& interp,
                  const std::optional<int>& threads_flag,
                  const std::optional<std::string>& workdir) {
  const int threads = threads_from(threads_flag);
  const fstk::SceneSpec scene = fstk::load_scene(scene_path);
  fstk::MatchConfig mcfg;
  mcfg.support_width = w;
  mcfg.search_range = s;
  fstk::SynthesisConfig scfg;
  scfg.alpha = alpha;
  scfg.interpolation = parse_interp(interp);

  const fstk::Image left = fstk::render_fisheye_view(scene, 0.0, threads);
  const fstk::Image right =
      fstk::render_fisheye_view(scene, scene.baseline, threads);
  const fstk::Image middle = fstk::render_fisheye_view(
      scene, alpha * scene.baseline, threads);
  const fstk::Mask mask =
      fstk::build_fov_mask(scene.camera, scene.rows, scene.cols);

  const fstk::DisparityMap d_h =
      fstk::estimate_disparity_horizontal(left, right, mcfg, threads);
  const fstk::Image i_h = fstk::synthesize_conventional(right, d_h, scfg,
                                                        threads);
  const double psnr_h = fstk::psnr_masked(i_h, middle, mask);

  const fstk::DisparityMap d_f = fstk::estimate_disparity_fisheye(
      left, right, mcfg, scene.camera, threads);
  const fstk::Image i_f =
      fstk::synthesize_fisheye(right, d_f, scfg, scene.camera, threads);
  const double psnr_f = fstk::psnr_masked(i_f, middle, mask);

  if (workdir) {
    namespace fs = std::filesystem;
    fs::create_directories(*workdir);
    const fs::path dir(*workdir);
    fstk::write_image((dir / "left.pgm").string(), left);
    fstk::write_image((dir / "right.pgm").string(), right);
    fstk::write_image((dir / "middle.pgm").string(), middle);
    fstk::DisparitySidecar meta;
    meta.support_width = w;
    meta.search_range = s;
    fstk::write_disparity((dir / "disparity_horizontal.pfm").string(), d_h,
                          meta);
    meta.camera = scene.camera;
    fstk::write_disparity((dir / "disparity_fisheye.pfm").string(), d_f, meta);
    fstk::write_image((dir / "synth_horizontal.pgm").string(), i_h);
    fstk::write_image((dir / "synth_fisheye.pgm").string(), i_f);
  }

  std::cout << "mode=horizontal PSNR_dB=" << format_psnr(psnr_h) << "\n";
  std::cout << "mode=fisheye PSNR_dB=" << format_psnr(psnr_f) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fisheye stereo toolkit: projection-aware disparity "
               "estimation, intermediate view synthesis, and masked-PSNR "
               "evaluation"};
  app.require_subcommand(1);

  // estimate ----------------------------------------------------------------
  auto* estimate = app.add_subcommand(
      "estimate", "Estimate a dense right-to-left disparity map");
  std::string est_left, est_right, est_mode, est_out;
  std::optional<std::string> est_camera;
  std::optional<int> est_threads;
  int est_w = 8, est_s = 256;
  estimate->add_option("--left", est_left, "Left view (PGM)")->required();
  estimate->add_option("--right", est_right, "Right view (PGM)")->required();
  estimate->add_option("--mode", est_mode, "horizontal or fisheye")
      ->required()
      ->check(CLI::IsMember({"horizontal", "fisheye"}));
  estimate->add_option("-w,--support-width", est_w,
                       "Support width w; block size is 2w+1 (default 8)");
  estimate->add_option("-s,--search-range", est_s,
                       "Candidates span [0, s] (default 256)");
  estimate->add_option("--camera", est_camera,
                       "Camera parameter file (fisheye mode)");
  estimate->add_option("--threads", est_threads,
                       "Worker count; 0 = all cores (FSTK_THREADS fallback)");
  estimate->add_option("--out", est_out, "Output disparity (PFM + .meta)")
      ->required();
  estimate->callback([&] {
    run_estimate(est_left, est_right, est_mode, est_camera, est_w, est_s,
                 est_threads, est_out);
  });

  // synthesize ----------------------------------------------------------------
  auto* synthesize = app.add_subcommand(
      "synthesize", "Warp the right view along a disparity map");
  std::string syn_right, syn_disparity, syn_mode, syn_out;
  std::string syn_interp = "linear";
  std::optional<std::string> syn_camera;
  std::optional<int> syn_threads;
  double syn_alpha = 0.5;
  synthesize->add_option("--right", syn_right, "Right view (PGM)")->required();
  synthesize->add_option("--disparity", syn_disparity,
                         "Disparity map (PFM with .meta sidecar)")
      ->required();
  synthesize->add_option("--mode", syn_mode, "horizontal or fisheye")
      ->required()
      ->check(CLI::IsMember({"horizontal", "fisheye"}));
  synthesize->add_option("--alpha", syn_alpha,
                         "Fraction of the disparity applied (default 0.5)");
  synthesize->add_option("--interp", syn_interp, "linear or cubic")
      ->check(CLI::IsMember({"linear", "cubic"}));
  synthesize->add_option("--camera", syn_camera,
                         "Camera parameter file (fisheye mode; defaults to "
                         "the sidecar camera)");
  synthesize->add_option("--threads", syn_threads,
                         "Worker count; 0 = all cores");
  synthesize->add_option("--out", syn_out, "Output view (PGM)")->required();
  synthesize->callback([&] {
    run_synthesize(syn_right, syn_disparity, syn_mode, syn_alpha, syn_interp,
                   syn_camera, syn_threads, syn_out);
  });

  // evaluate ----------------------------------------------------------------
  auto* evaluate = app.add_subcommand(
      "evaluate", "Masked luminance PSNR between two views");
  std::optional<std::string> eva_test, eva_ref, eva_camera, eva_pairs, eva_csv;
  bool eva_no_mask = false;
  evaluate->add_option("--test", eva_test, "View under test (PGM)");
  evaluate->add_option("--ref", eva_ref, "Reference view (PGM)");
  evaluate->add_option("--camera", eva_camera,
                       "Camera parameter file for the FOV mask");
  evaluate->add_flag("--no-mask", eva_no_mask,
                     "Evaluate over the full image instead of the FOV circle");
  evaluate->add_option("--pairs", eva_pairs,
                       "Pair list: lines of pair_id,test_path,ref_path");
  evaluate->add_option("--csv", eva_csv, "Write per-pair CSV here");
  evaluate->callback([&] {
    run_evaluate(eva_test, eva_ref, eva_camera, eva_no_mask, eva_pairs,
                 eva_csv);
  });

  // render --------------------------------------------------------------------
  auto* render = app.add_subcommand(
      "render", "Render a synthetic fisheye view or its exact disparity");
  std::string ren_scene, ren_out;
  double ren_offset = 0.0;
  bool ren_gt = false;
  std::optional<int> ren_threads;
  render->add_option("--scene", ren_scene, "Scene description file")
      ->required();
  render->add_option("--offset", ren_offset,
                     "Camera offset along +columns, scene units (default 0)");
  render->add_flag("--gt-disparity", ren_gt,
                   "Emit the exact right-view disparity map instead");
  render->add_option("--threads", ren_threads, "Worker count; 0 = all cores");
  render->add_option("--out", ren_out, "Output path")->required();
  render->callback(
      [&] { run_render(ren_scene, ren_offset, ren_gt, ren_threads, ren_out); });

  // pipeline ----------------------------------------------------------------
  auto* pipeline = app.add_subcommand(
      "pipeline",
      "render -> estimate -> synthesize -> evaluate, both modes");
  std::string pip_scene;
  std::string pip_interp = "linear";
  int pip_w = 8, pip_s = 256;
  double pip_alpha = 0.5;
  std::optional<int> pip_threads;
  std::optional<std::string> pip_workdir;
  pipeline->add_option("--scene", pip_scene, "Scene description file")
      ->required();
  pipeline->add_option("-w,--support-width", pip_w, "Support width (default 8)");
  pipeline->add_option("-s,--search-range", pip_s,
                       "Search range (default 256)");
  pipeline->add_option("--alpha", pip_alpha,
                       "Disparity fraction (default 0.5)");
  pipeline->add_option("--interp", pip_interp, "linear or cubic")
      ->check(CLI::IsMember({"linear", "cubic"}));
  pipeline->add_option("--threads", pip_threads, "Worker count; 0 = all cores");
  pipeline->add_option("--workdir", pip_workdir,
                       "Keep intermediate artifacts in this directory");
  pipeline->callback([&] {
    run_pipeline(pip_scene, pip_w, pip_s, pip_alpha, pip_interp, pip_threads,
                 pip_workdir);
  });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const fstk::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fstk::contract_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
