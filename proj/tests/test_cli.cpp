// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the installed command line: exit codes, output
// formats, and determinism across worker counts.

#include <cstdlib>
#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "fstk/io.hpp"

using namespace fstk;
namespace fs = std::filesystem;

namespace {

struct CliSandbox {
  fs::path dir;
  CliSandbox() {
    dir = fs::temp_directory_path() /
          ("fstk-cli-" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
  }
  ~CliSandbox() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string operator/(const std::string& name) const {
    return (dir / name).string();
  }
};

struct CliResult {
  int exit_code;
  std::string out;
};

CliResult run_cli(const CliSandbox& box, const std::string& args,
                  const std::string& env = "") {
  const std::string out_path = box / "cli-stdout.txt";
  const std::string command = env + (env.empty() ? "" : " ") + FSTK_CLI_PATH +
                              " " + args + " > " + out_path + " 2>&1";
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_path);
  result.out.assign(std::istreambuf_iterator<char>(in), {});
  return result;
}

void write_scene(const std::string& path) {
  // Small inscribed-FOV single-plane scene: d_true = 6 px.
  write_file_atomic(path,
                    "width=96\nheight=96\nfocal_length_px=32\n"
                    "baseline=0.375\nplane1_depth=2.0\nplane1_seed=11\n");
}

}  // namespace

TEST_CASE("full workflow through the command line") {
  CliSandbox box;
  write_scene(box / "scene.cfg");
  write_file_atomic(box / "camera.cfg", "focal_length_px=32\n");

  CHECK(run_cli(box, "render --scene " + (box / "scene.cfg") +
                         " --offset 0 --out " + (box / "left.pgm"))
            .exit_code == 0);
  CHECK(run_cli(box, "render --scene " + (box / "scene.cfg") +
                         " --offset 0.375 --out " + (box / "right.pgm"))
            .exit_code == 0);
  CHECK(run_cli(box, "render --scene " + (box / "scene.cfg") +
                         " --offset 0.1875 --out " + (box / "middle.pgm"))
            .exit_code == 0);
  CHECK(run_cli(box, "render --scene " + (box / "scene.cfg") +
                         " --gt-disparity --out " + (box / "gt.pfm"))
            .exit_code == 0);
  CHECK(fs::exists(box / "gt.pfm.meta"));

  const std::string estimate_args =
      "estimate --left " + (box / "left.pgm") + " --right " +
      (box / "right.pgm") + " -w 3 -s 10 --camera " + (box / "camera.cfg");
  CHECK(run_cli(box, estimate_args + " --mode horizontal --out " +
                         (box / "dh.pfm"))
            .exit_code == 0);
  CHECK(run_cli(box, estimate_args + " --mode fisheye --out " +
                         (box / "df.pfm"))
            .exit_code == 0);

  // Fisheye synthesis picks the camera up from the sidecar.
  CHECK(run_cli(box, "synthesize --right " + (box / "right.pgm") +
                         " --disparity " + (box / "df.pfm") +
                         " --mode fisheye --alpha 0.5 --out " +
                         (box / "sf.pgm"))
            .exit_code == 0);
  CHECK(run_cli(box, "synthesize --right " + (box / "right.pgm") +
                         " --disparity " + (box / "dh.pfm") +
                         " --mode horizontal --alpha 0.5 --interp cubic "
                         "--out " +
                         (box / "sh.pgm"))
            .exit_code == 0);

  const CliResult eval = run_cli(
      box, "evaluate --test " + (box / "sf.pgm") + " --ref " +
               (box / "middle.pgm") + " --camera " + (box / "camera.cfg"));
  CHECK(eval.exit_code == 0);
  CHECK(eval.out.find("PSNR_dB=") != std::string::npos);
  CHECK(eval.out.find("inf") == std::string::npos);
}

TEST_CASE("evaluate reports the infinite sentinel for identical inputs") {
  CliSandbox box;
  write_scene(box / "scene.cfg");
  write_file_atomic(box / "camera.cfg", "focal_length_px=32\n");
  REQUIRE(run_cli(box, "render --scene " + (box / "scene.cfg") +
                           " --offset 0 --out " + (box / "a.pgm"))
              .exit_code == 0);
  const CliResult same = run_cli(
      box, "evaluate --test " + (box / "a.pgm") + " --ref " + (box / "a.pgm") +
               " --camera " + (box / "camera.cfg"));
  CHECK(same.exit_code == 0);
  CHECK(same.out.find("PSNR_dB=inf") != std::string::npos);

  const CliResult no_mask = run_cli(
      box, "evaluate --test " + (box / "a.pgm") + " --ref " + (box / "a.pgm") +
               " --no-mask");
  CHECK(no_mask.exit_code == 0);
  CHECK(no_mask.out.find("PSNR_dB=inf") != std::string::npos);
}

TEST_CASE("usage problems exit with code 1") {
  CliSandbox box;
  CHECK(run_cli(box, "").exit_code == 1);
  CHECK(run_cli(box, "estimate --bogus-flag 3").exit_code == 1);
  CHECK(run_cli(box, "evaluate").exit_code == 1);  // neither pair nor files
  write_scene(box / "scene.cfg");
  // Fisheye estimation without a camera file.
  REQUIRE(run_cli(box, "render --scene " + (box / "scene.cfg") +
                           " --offset 0 --out " + (box / "a.pgm"))
              .exit_code == 0);
  CHECK(run_cli(box, "estimate --left " + (box / "a.pgm") + " --right " +
                         (box / "a.pgm") +
                         " --mode fisheye -w 2 -s 4 --out " + (box / "d.pfm"))
            .exit_code == 1);
  CHECK(run_cli(box, "estimate --left " + (box / "a.pgm") + " --right " +
                         (box / "a.pgm") + " --mode horizontal -w 2 -s 4 "
                         "--threads -3 --out " + (box / "d.pfm"))
            .exit_code == 1);
}

TEST_CASE("io problems exit with code 2") {
  CliSandbox box;
  write_scene(box / "scene.cfg");
  CHECK(run_cli(box, "render --scene " + (box / "missing.cfg") +
                         " --offset 0 --out " + (box / "a.pgm"))
            .exit_code == 2);
  REQUIRE(run_cli(box, "render --scene " + (box / "scene.cfg") +
                           " --offset 0 --out " + (box / "a.pgm"))
              .exit_code == 0);
  CHECK(run_cli(box, "estimate --left " + (box / "a.pgm") + " --right " +
                         (box / "absent.pgm") +
                         " --mode horizontal -w 2 -s 4 --out " +
                         (box / "d.pfm"))
            .exit_code == 2);

  // Disparity without its sidecar.
  REQUIRE(run_cli(box, "render --scene " + (box / "scene.cfg") +
                           " --gt-disparity --out " + (box / "gt.pfm"))
              .exit_code == 0);
  fs::remove(box / "gt.pfm.meta");
  CHECK(run_cli(box, "synthesize --right " + (box / "a.pgm") +
                         " --disparity " + (box / "gt.pfm") +
                         " --mode fisheye --out " + (box / "s.pgm"))
            .exit_code == 2);
}

TEST_CASE("contract violations exit with code 3") {
  CliSandbox box;
  write_scene(box / "scene.cfg");
  REQUIRE(run_cli(box, "render --scene " + (box / "scene.cfg") +
                           " --offset 0 --out " + (box / "a.pgm"))
              .exit_code == 0);
  // Mismatched dimensions.
  write_file_atomic(box / "small.pgm",
                    std::string("P5\n4 4\n255\n") + std::string(16, 'x'));
  CHECK(run_cli(box, "estimate --left " + (box / "small.pgm") + " --right " +
                         (box / "a.pgm") + " --mode horizontal -w 2 -s 4 "
                         "--out " + (box / "d.pfm"))
            .exit_code == 3);

  // Domain tag mismatch: perspective map into the conventional path.
  REQUIRE(run_cli(box, "render --scene " + (box / "scene.cfg") +
                           " --gt-disparity --out " + (box / "gt.pfm"))
              .exit_code == 0);
  const CliResult mismatch = run_cli(
      box, "synthesize --right " + (box / "a.pgm") + " --disparity " +
               (box / "gt.pfm") + " --mode horizontal --out " +
               (box / "s.pgm"));
  CHECK(mismatch.exit_code == 3);
  CHECK(mismatch.out.find("domain_tag") != std::string::npos);
}

TEST_CASE("pipeline prints both modes and favors the fisheye path") {
  CliSandbox box;
  // Large enough that the projection-aware advantage shows through.
  write_file_atomic(box / "scene.cfg",
                    "width=160\nheight=160\nfocal_length_px=55\n"
                    "baseline=0.21818181818181817\nplane1_depth=2.0\n"
                    "plane1_seed=11\n");
  const CliResult result = run_cli(
      box, "pipeline --scene " + (box / "scene.cfg") +
               " -w 4 -s 10 --workdir " + (box / "work"));
  REQUIRE(result.exit_code == 0);
  const auto h_pos = result.out.find("mode=horizontal PSNR_dB=");
  const auto f_pos = result.out.find("mode=fisheye PSNR_dB=");
  REQUIRE(h_pos != std::string::npos);
  REQUIRE(f_pos != std::string::npos);
  const double h = std::stod(result.out.substr(h_pos + 24));
  const double f = std::stod(result.out.substr(f_pos + 21));
  CHECK(f >= h);
  CHECK(fs::exists(box / "work/disparity_fisheye.pfm"));
  CHECK(fs::exists(box / "work/synth_horizontal.pgm"));
}

TEST_CASE("worker count does not change results; env variable works") {
  CliSandbox box;
  write_scene(box / "scene.cfg");
  write_file_atomic(box / "camera.cfg", "focal_length_px=32\n");
  REQUIRE(run_cli(box, "render --scene " + (box / "scene.cfg") +
                           " --offset 0 --out " + (box / "l.pgm"))
              .exit_code == 0);
  REQUIRE(run_cli(box, "render --scene " + (box / "scene.cfg") +
                           " --offset 0.375 --out " + (box / "r.pgm"))
              .exit_code == 0);
  const std::string estimate_args =
      "estimate --left " + (box / "l.pgm") + " --right " + (box / "r.pgm") +
      " --mode fisheye -w 2 -s 8 --camera " + (box / "camera.cfg");
  REQUIRE(run_cli(box, estimate_args + " --threads 1 --out " +
                           (box / "d1.pfm"))
              .exit_code == 0);
  REQUIRE(run_cli(box, estimate_args + " --threads 8 --out " +
                           (box / "d8.pfm"))
              .exit_code == 0);
  REQUIRE(run_cli(box, estimate_args + " --out " + (box / "denv.pfm"),
                  "FSTK_THREADS=2")
              .exit_code == 0);

  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  CHECK(slurp(box / "d1.pfm") == slurp(box / "d8.pfm"));
  CHECK(slurp(box / "d1.pfm") == slurp(box / "denv.pfm"));

  CHECK(run_cli(box, estimate_args + " --out " + (box / "dx.pfm"),
                "FSTK_THREADS=junk")
            .exit_code == 1);
}

TEST_CASE("per-pair evaluation writes a csv and averages finite pairs") {
  CliSandbox box;
  write_scene(box / "scene.cfg");
  REQUIRE(run_cli(box, "render --scene " + (box / "scene.cfg") +
                           " --offset 0 --out " + (box / "a.pgm"))
              .exit_code == 0);
  REQUIRE(run_cli(box, "render --scene " + (box / "scene.cfg") +
                           " --offset 0.375 --out " + (box / "b.pgm"))
              .exit_code == 0);
  write_file_atomic(box / "pairs.txt",
                    "ab," + (box / "a.pgm") + "," + (box / "b.pgm") + "\n" +
                        "aa," + (box / "a.pgm") + "," + (box / "a.pgm") +
                        "\n");
  const CliResult result = run_cli(
      box, "evaluate --pairs " + (box / "pairs.txt") + " --no-mask --csv " +
               (box / "out.csv"));
  REQUIRE(result.exit_code == 0);
  std::ifstream csv(box / "out.csv");
  std::string header, row1, row2;
  std::getline(csv, header);
  std::getline(csv, row1);
  std::getline(csv, row2);
  CHECK(header == "pair_id,psnr_db");
  CHECK(row1.substr(0, 3) == "ab,");
  CHECK(row2 == "aa,inf");
  CHECK(result.out.find("PSNR_dB=") != std::string::npos);
  CHECK(result.out.find("excluded from the average") != std::string::npos);
}
