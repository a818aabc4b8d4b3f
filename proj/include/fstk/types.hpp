// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <stdexcept>

namespace fstk {

using Index = Eigen::Index;

/// Dense raster of scalars in raster (row-major) memory order.
template <typename Scalar>
using ImageT = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Luminance raster, values in [0, 255].
using Image = ImageT<float>;

/// Double-precision raster, used for coordinates and costs.
using Grid = ImageT<double>;

/// Boolean raster (e.g. field-of-view masks).
using Mask = ImageT<bool>;

/// File or format problem (CLI exit code 2).
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Violated precondition or invariant (CLI exit code 3).
struct contract_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fstk
