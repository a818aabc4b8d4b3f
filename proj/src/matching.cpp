// SPDX-License-Identifier: Apache-2.0
#include "fstk/matching.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fstk/image.hpp"
#include "fstk/parallel.hpp"

namespace fstk {

namespace {

void check_pair(const Image& left, const Image& right, const MatchConfig& cfg) {
  if (left.rows() != right.rows() || left.cols() != right.cols()) {
    std::ostringstream msg;
    msg << "estimate_disparity: view dimensions differ (" << left.rows() << "x"
        << left.cols() << " vs " << right.rows() << "x" << right.cols() << ")";
    throw contract_error(msg.str());
  }
  if (cfg.support_width < 0 || cfg.search_range < 0)
    throw contract_error("estimate_disparity: w and s must be nonnegative");
  const Index b = cfg.block_size();
  if (b > right.rows() || b > right.cols()) {
    std::ostringstream msg;
    msg << "estimate_disparity: block size " << b << " exceeds image "
        << right.rows() << "x" << right.cols();
    throw contract_error(msg.str());
  }
  if (b + cfg.search_range > right.cols()) {
    std::ostringstream msg;
    msg << "estimate_disparity: block size " << b << " plus search range "
        << cfg.search_range << " exceeds image width " << right.cols();
    throw contract_error(msg.str());
  }
}

// Scans one candidate: updates per-pixel best cost / offset.  Blocks are
// read out of replicate-padded arrays so the inner loops stay branch-free;
// the summation order (window rows, then columns) is the canonical one the
// tests recompute.
void scan_candidate(const Image& right_pad, const Image& cand_pad, int offset,
                    int w, Grid& best_cost, Image& best_offset, int threads) {
  const Index rows = best_cost.rows();
  const Index cols = best_cost.cols();
  const int b = 2 * w + 1;
  parallel_for(0, rows, threads, [&](Index m) {
    for (Index n = 0; n < cols; ++n) {
      double cost = 0.0;
      for (int i = 0; i < b; ++i) {
        const float* a = &right_pad(m + i, n);
        const float* g = &cand_pad(m + i, n);
        for (int j = 0; j < b; ++j) {
          const double diff =
              static_cast<double>(a[j]) - static_cast<double>(g[j]);
          cost += diff * diff;
        }
      }
      if (cost < best_cost(m, n)) {
        best_cost(m, n) = cost;
        best_offset(m, n) = static_cast<float>(offset);
      }
    }
  });
}

}  // namespace

double ssd_cost(const Image& block_a, const Image& block_b) {
  if (block_a.rows() != block_b.rows() || block_a.cols() != block_b.cols())
    throw contract_error("ssd_cost: block shapes differ");
  double cost = 0.0;
  for (Index i = 0; i < block_a.rows(); ++i)
    for (Index j = 0; j < block_a.cols(); ++j) {
      const double diff = static_cast<double>(block_a(i, j)) -
                          static_cast<double>(block_b(i, j));
      cost += diff * diff;
    }
  return cost;
}

WarpGrid build_candidate_warp_grid(int offset, const CameraModel& cam,
                                   Index rows, Index cols, int threads) {
  validate(cam);
  WarpGrid grid;
  grid.row.resize(rows, cols);
  grid.col.resize(rows, cols);
  const RadialMap map(cam);
  parallel_for(0, rows, threads, [&](Index m) {
    for (Index n = 0; n < cols; ++n) {
      const PixelCoord src{static_cast<double>(m), static_cast<double>(n)};
      const PixelCoord dst =
          shift_in_perspective(src, static_cast<double>(offset), cam, map);
      grid.row(m, n) = dst.row;
      grid.col(m, n) = dst.col;
    }
  });
  return grid;
}

DisparityMap estimate_disparity_horizontal(const Image& left,
                                           const Image& right,
                                           const MatchConfig& cfg,
                                           int threads) {
  check_pair(left, right, cfg);
  const Index rows = right.rows(), cols = right.cols();
  const int w = cfg.support_width;

  const Image right_pad = pad_replicate(right, w);
  Grid best_cost = Grid::Constant(rows, cols,
                                  std::numeric_limits<double>::infinity());
  Image best_offset = Image::Zero(rows, cols);

  Image cand_pad(rows + 2 * w, cols + 2 * w);
  for (int d = 0; d <= cfg.search_range; ++d) {
    // cand_pad(r, c) = left(clamp(r - w), clamp(c - w + d)): the candidate
    // block column is shifted before clamping, exactly as a block centred
    // at n + d would read the view.
    for (Index r = 0; r < cand_pad.rows(); ++r) {
      const Index sr = std::clamp<Index>(r - w, 0, rows - 1);
      for (Index c = 0; c < cand_pad.cols(); ++c) {
        const Index sc = std::clamp<Index>(c - w + d, 0, cols - 1);
        cand_pad(r, c) = left(sr, sc);
      }
    }
    scan_candidate(right_pad, cand_pad, d, w, best_cost, best_offset, threads);
  }
  return DisparityMap{std::move(best_offset), DisparityDomain::pixel_horizontal};
}

DisparityMap estimate_disparity_fisheye(const Image& left, const Image& right,
                                        const MatchConfig& cfg,
                                        const CameraModel& cam, int threads) {
  check_pair(left, right, cfg);
  validate(cam);
  const Index rows = right.rows(), cols = right.cols();
  const int w = cfg.support_width;

  const Image right_pad = pad_replicate(right, w);
  Grid best_cost = Grid::Constant(rows, cols,
                                  std::numeric_limits<double>::infinity());
  Image best_offset = Image::Zero(rows, cols);

  const RadialMap map(cam);
  Image warped(rows, cols);
  for (int d = 0; d <= cfg.search_range; ++d) {
    // Gather the reference view once per candidate; the sampling grid is
    // identical for every block at this offset.
    parallel_for(0, rows, threads, [&](Index m) {
      for (Index n = 0; n < cols; ++n) {
        const PixelCoord src{static_cast<double>(m), static_cast<double>(n)};
        const PixelCoord dst =
            shift_in_perspective(src, static_cast<double>(d), cam, map);
        warped(m, n) = sample_bilinear(left, dst.row, dst.col);
      }
    });
    const Image cand_pad = pad_replicate(warped, w);
    scan_candidate(right_pad, cand_pad, d, w, best_cost, best_offset, threads);
  }
  return DisparityMap{std::move(best_offset),
                      DisparityDomain::perspective_horizontal};
}

}  // namespace fstk
