#pragma once

#include <vector>

#include "rawrestore/hqs.hpp"
#include "rawrestore/psf_grid.hpp"

namespace rawrestore {

// Tiles of a fixed size placed every `stride` pixels from the top-left
// corner. Blending weights ramp with a raised cosine across each overlap and
// are flat elsewhere; tiles on the image border do not ramp on their outer
// side, so the weights of all tiles sum to one at every pixel.
class TileLayout {
 public:
  // Smallest grid covering the image. Requires overlap <= tile_size / 2 so
  // that at most two tiles overlap along each axis.
  TileLayout(TileGeometry geometry, int image_height, int image_width);
  TileLayout(TileGeometry geometry, int rows, int cols, int image_height, int image_width);

  const TileGeometry& geometry() const noexcept { return geometry_; }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int image_height() const noexcept { return height_; }
  int image_width() const noexcept { return width_; }
  int origin_row(int row) const noexcept { return row * geometry_.stride(); }
  int origin_col(int col) const noexcept { return col * geometry_.stride(); }

  // 1-D weight at offset t of tile `index` out of `count` along one axis.
  double axis_weight(int index, int count, int t) const;
  // tile_size x tile_size window of tile (row, col).
  ImagePlane window(int row, int col) const;

 private:
  TileGeometry geometry_;
  int rows_;
  int cols_;
  int height_;
  int width_;
};

struct PsfRestoreOptions {
  NoiseParams noise;
  ScheduleParams schedule;
  std::string prior = "tv";
  int tv_iterations = 20;
  ColorBasis basis = ColorBasis::Opponent;
  int workers = 1;
};

// Restores each tile of `raw` with its local kernel and blends the results.
// Tiles are read with a margin of real neighbouring pixels (mirrored at the
// image border), edge-tapered inside that margin, restored with the joint
// solver from a bilinear init, and cropped back before blending.
RgbImage psf_restore(const RawImage& raw, const PsfGrid& grid, const PsfRestoreOptions& options);

// Single pass over the whole image with one kernel; the reference the tiled
// path is compared against.
RgbImage whole_image_restore(const RawImage& raw, const RgbKernel& kernel, const PsfRestoreOptions& options);

// Margin width used around each tile: the kernel extent rounded up to even.
int tile_margin(const RgbKernel& kernel);

// Copies a window of `raw` starting at (row, col), mirroring (reflect-101)
// outside the image; row and col must be even to keep the CFA phase.
RawImage extract_raw(const RawImage& raw, int row, int col, int height, int width);

}  // namespace rawrestore
