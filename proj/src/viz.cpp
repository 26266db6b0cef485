#include "sgrbm/viz.hpp"

#include <cmath>

#include "sgrbm/errors.hpp"

namespace sgrbm {

namespace {

struct Layout {
  std::vector<std::pair<int, int>> slots;  // tile index -> (grid row, grid col)
  int grid_rows = 0;
  int grid_cols = 0;
};

// Tiles are placed left to right; a group never straddles a row boundary.
Layout plan_layout(Eigen::Index count, const TileGridOptions& options) {
  Layout layout;
  layout.slots.resize(static_cast<std::size_t>(count));

  if (options.grouping != nullptr) {
    const Grouping& grouping = *options.grouping;
    if (grouping.num_units() != count) {
      throw DimensionError("tile grid: grouping does not cover the filter count");
    }
    int max_group = 0;
    for (const auto& members : grouping.groups) {
      max_group = std::max(max_group, static_cast<int>(members.size()));
    }
    int per_row = std::max(options.grid_cols, max_group);
    per_row -= per_row % max_group;  // whole groups per row
    int row = 0, col = 0;
    for (const auto& members : grouping.groups) {
      if (col + static_cast<int>(members.size()) > per_row) {
        ++row;
        col = 0;
      }
      for (int j : members) {
        layout.slots[static_cast<std::size_t>(j)] = {row, col++};
      }
    }
    layout.grid_rows = row + 1;
    layout.grid_cols = per_row;
    return layout;
  }

  int per_row = options.grid_cols;
  if (per_row <= 0) {
    per_row = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  }
  for (Eigen::Index t = 0; t < count; ++t) {
    layout.slots[static_cast<std::size_t>(t)] = {static_cast<int>(t / per_row),
                                                 static_cast<int>(t % per_row)};
  }
  layout.grid_rows = static_cast<int>((count + per_row - 1) / per_row);
  layout.grid_cols = per_row;
  return layout;
}

GrayImage render_grid(const Matrix& columns, const TileGridOptions& options, bool min_max) {
  if (options.tile_rows <= 0 || options.tile_cols <= 0 ||
      static_cast<Eigen::Index>(options.tile_rows) * options.tile_cols != columns.rows()) {
    throw ParameterError("tile grid: tile_rows x tile_cols must equal the vector length " +
                         std::to_string(columns.rows()));
  }
  if (columns.cols() == 0) throw ParameterError("tile grid: nothing to render");

  const Layout layout = plan_layout(columns.cols(), options);
  const int th = options.tile_rows;
  const int tw = options.tile_cols;

  GrayImage image;
  image.height = layout.grid_rows * th + (layout.grid_rows - 1);
  image.width = layout.grid_cols * tw + (layout.grid_cols - 1);
  image.pixels.assign(static_cast<std::size_t>(image.height) * image.width, 0);

  for (Eigen::Index t = 0; t < columns.cols(); ++t) {
    const auto [grow, gcol] = layout.slots[static_cast<std::size_t>(t)];
    const int top = grow * (th + 1);
    const int left = gcol * (tw + 1);

    double lo = 0.0, span = 1.0;
    bool constant = false;
    if (min_max) {
      lo = columns.col(t).minCoeff();
      const double hi = columns.col(t).maxCoeff();
      constant = hi == lo;
      span = hi - lo;
    }
    for (int r = 0; r < th; ++r) {
      for (int c = 0; c < tw; ++c) {
        const double v = columns(static_cast<Eigen::Index>(r) * tw + c, t);
        std::uint8_t byte;
        if (min_max) {
          byte = constant ? 128
                          : static_cast<std::uint8_t>(std::lround((v - lo) / span * 255.0));
        } else {
          byte = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
        }
        image.pixels[static_cast<std::size_t>(top + r) * image.width + (left + c)] = byte;
      }
    }
  }
  return image;
}

}  // namespace

GrayImage render_filter_grid(const Matrix& columns, const TileGridOptions& options) {
  return render_grid(columns, options, true);
}

GrayImage render_value_grid(const Matrix& columns, const TileGridOptions& options) {
  return render_grid(columns, options, false);
}

}  // namespace sgrbm
