#pragma once

#include "sgrbm/image.hpp"
#include "sgrbm/regularizer.hpp"

namespace sgrbm {

struct TileGridOptions {
  int tile_rows = 0;  // shape each column vector is reshaped to (row-major)
  int tile_cols = 0;
  int grid_cols = 0;  // tiles per grid row; 0 = group size with a grouping, else ~sqrt(count)
  const Grouping* grouping = nullptr;  // members of a group stay adjacent
};

/// One tile per matrix column, each tile min-max normalized to [0, 255]
/// (constant tiles map to mid-gray 128), 1-pixel separators between tiles,
/// no outer border. With a grouping, each grid row holds one group.
GrayImage render_filter_grid(const Matrix& columns, const TileGridOptions& options);

/// Same layout but absolute scaling: values are clamped to [0, 1] and mapped
/// to [0, 255]. Used for sampled visible probabilities.
GrayImage render_value_grid(const Matrix& columns, const TileGridOptions& options);

}  // namespace sgrbm
