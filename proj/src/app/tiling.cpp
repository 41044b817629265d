#include "rawrestore/tiling.hpp"

#include <cmath>
#include <numbers>

#include "rawrestore/convolution.hpp"
#include "rawrestore/error.hpp"
#include "rawrestore/parallel.hpp"

namespace rawrestore {
namespace {

int reflect(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n - 2;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

std::unique_ptr<ProxOperator> prox_for(const PsfRestoreOptions& o) {
  return make_prox(o.prior, o.tv_iterations, o.basis);
}

RgbImage restore_tile(const RawImage& tile, const RgbKernel& kernel, const PsfRestoreOptions& options) {
  // Taper the margin band towards its blurred version so the periodic model
  // sees no hard seam where the tile wraps around.
  const RgbImage tapered = edge_taper(demosaic_bilinear(tile), kernel);
  RawImage y = mosaic(tapered, tile.cfa());
  y.set_noise(tile.noise());
  JointProblem problem{y, kernel, make_schedule(tile.noise(), options.schedule)};
  const auto prox = prox_for(options);
  return hqs_restore_joint(problem, *prox, demosaic_bilinear(y)).x;
}

}  // namespace

TileLayout::TileLayout(TileGeometry geometry, int image_height, int image_width)
    : TileLayout(geometry, 0, 0, image_height, image_width) {}

TileLayout::TileLayout(TileGeometry geometry, int rows, int cols, int image_height, int image_width)
    : geometry_(geometry), rows_(rows), cols_(cols), height_(image_height), width_(image_width) {
  geometry_.validate();
  require(2 * geometry_.overlap <= geometry_.tile_size, ErrorCode::InvalidArgument,
          "tile overlap must not exceed half the tile size");
  require(image_height >= 1 && image_width >= 1, ErrorCode::InvalidArgument, "empty image");
  auto needed = [&](int extent) {
    if (extent <= geometry_.tile_size) return 1;
    const int s = geometry_.stride();
    return 1 + (extent - geometry_.tile_size + s - 1) / s;
  };
  if (rows_ == 0) rows_ = needed(image_height);
  if (cols_ == 0) cols_ = needed(image_width);
  require(rows_ >= needed(image_height) && cols_ >= needed(image_width), ErrorCode::DimensionMismatch,
          "tile grid does not cover the image");
}

double TileLayout::axis_weight(int index, int count, int t) const {
  const int ov = geometry_.overlap;
  if (ov == 0) return 1.0;
  auto ramp_up = [ov](int u) {
    const double s = std::sin(std::numbers::pi * (u + 0.5) / (2.0 * ov));
    return s * s;
  };
  if (index > 0 && t < ov) return ramp_up(t);
  if (index + 1 < count && t >= geometry_.stride()) return 1.0 - ramp_up(t - geometry_.stride());
  return 1.0;
}

ImagePlane TileLayout::window(int row, int col) const {
  const int n = geometry_.tile_size;
  ImagePlane w(n, n);
  for (int r = 0; r < n; ++r) {
    const double wr = axis_weight(row, rows_, r);
    for (int c = 0; c < n; ++c) w(r, c) = wr * axis_weight(col, cols_, c);
  }
  return w;
}

int tile_margin(const RgbKernel& kernel) {
  const int k = std::max(kernel.height(), kernel.width());
  return k + (k & 1);
}

RawImage extract_raw(const RawImage& raw, int row, int col, int height, int width) {
  require(row % 2 == 0 && col % 2 == 0 && height % 2 == 0 && width % 2 == 0, ErrorCode::InvalidArgument,
          "raw windows must be aligned to the 2x2 CFA tile");
  ImagePlane out(height, width);
  const ImagePlane& p = raw.plane();
  for (int r = 0; r < height; ++r) {
    const int sr = reflect(row + r, p.height());
    for (int c = 0; c < width; ++c) out(r, c) = p(sr, reflect(col + c, p.width()));
  }
  return RawImage(std::move(out), raw.cfa(), raw.noise());
}

RgbImage psf_restore(const RawImage& raw, const PsfGrid& grid, const PsfRestoreOptions& options) {
  grid.validate();
  const TileLayout layout(grid.geometry, grid.rows, grid.cols, raw.height(), raw.width());
  const int n = grid.geometry.tile_size;
  const int count = grid.rows * grid.cols;

  std::vector<RgbImage> restored(static_cast<std::size_t>(count), RgbImage(1, 1, ColorSpace::LinRgb));
  parallel_for(static_cast<std::size_t>(count), options.workers, [&](std::size_t i) {
    const int tr = static_cast<int>(i) / grid.cols, tc = static_cast<int>(i) % grid.cols;
    const RgbKernel& k = grid.at(tr, tc);
    const int m = tile_margin(k);
    const RawImage tile = extract_raw(raw, layout.origin_row(tr) - m, layout.origin_col(tc) - m, n + 2 * m, n + 2 * m);
    restored[i] = crop(restore_tile(tile, k, options), m, m, n, n);
  });

  RgbImage out(raw.height(), raw.width(), ColorSpace::LinRgb);
  ImagePlane weight_sum(raw.height(), raw.width());
  for (int i = 0; i < count; ++i) {
    const int tr = i / grid.cols, tc = i % grid.cols;
    const ImagePlane w = layout.window(tr, tc);
    const int r0 = layout.origin_row(tr), c0 = layout.origin_col(tc);
    for (int r = 0; r < n && r0 + r < raw.height(); ++r)
      for (int c = 0; c < n && c0 + c < raw.width(); ++c) {
        weight_sum(r0 + r, c0 + c) += w(r, c);
        for (int ch = 0; ch < 3; ++ch) out[ch](r0 + r, c0 + c) += w(r, c) * restored[i][ch](r, c);
      }
  }
  for (int ch = 0; ch < 3; ++ch)
    for (std::size_t p = 0; p < weight_sum.size(); ++p) out[ch].data()[p] /= weight_sum.data()[p];
  return out;
}

RgbImage whole_image_restore(const RawImage& raw, const RgbKernel& kernel, const PsfRestoreOptions& options) {
  JointProblem problem{raw, kernel, make_schedule(raw.noise(), options.schedule)};
  const auto prox = prox_for(options);
  return hqs_restore_joint(problem, *prox, demosaic_bilinear(raw)).x;
}

}  // namespace rawrestore
