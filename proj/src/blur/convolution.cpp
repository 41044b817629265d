#include "rawrestore/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rawrestore/error.hpp"
#include "rawrestore/fft.hpp"

namespace rawrestore {

ImagePlane convolve_circular(const ImagePlane& plane, const Kernel2D& kernel) {
  require(kernel.height() <= plane.height() && kernel.width() <= plane.width(), ErrorCode::DimensionMismatch,
          "kernel is larger than the image");
  // Identity kernel: copy, so a delta blur is exact rather than FFT-rounded.
  if (kernel(kernel.radius_rows(), kernel.radius_cols()) == 1.0) return plane;
  fft::Spectrum s = fft::forward(plane);
  const fft::Spectrum otf =
      fft::transfer_function(kernel.height(), kernel.width(), kernel.taps(), plane.height(), plane.width());
  for (std::size_t i = 0; i < s.size(); ++i) s.values()[i] *= otf.values()[i];
  return fft::inverse_real(std::move(s));
}

RgbImage blur_rgb(const RgbImage& img, const RgbKernel& kernel) {
  return RgbImage({convolve_circular(img[0], kernel[0]), convolve_circular(img[1], kernel[1]),
                   convolve_circular(img[2], kernel[2])},
                  img.color_space());
}

ImagePlane convolve_direct(const ImagePlane& plane, const Kernel2D& kernel, Boundary boundary, bool adjoint) {
  const int h = plane.height();
  const int w = plane.width();
  const int cr = kernel.radius_rows();
  const int cc = kernel.radius_cols();
  ImagePlane out(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = 0; i < kernel.height(); ++i)
        for (int j = 0; j < kernel.width(); ++j) {
          const double tap = kernel(i, j);
          if (tap == 0.0) continue;
          // out(p) = sum_q k(q) in(p - q); the adjoint uses in(p + q).
          const int dr = adjoint ? (i - cr) : -(i - cr);
          const int dc = adjoint ? (j - cc) : -(j - cc);
          acc += tap * (boundary == Boundary::Periodic ? plane.wrapped(r + dr, c + dc)
                                                       : plane.clamped(r + dr, c + dc));
        }
      out(r, c) = acc;
    }
  return out;
}

namespace {

// 0 on the outermost pixel, rising to 1 at `band` pixels from the edge.
double taper_weight(int position, int extent, int band) {
  if (band <= 0) return 1.0;
  const int d = std::min(position, extent - 1 - position);
  if (d >= band) return 1.0;
  return 0.5 - 0.5 * std::cos(std::numbers::pi * (d + 1) / (band + 1));
}

}  // namespace

ImagePlane edge_taper(const ImagePlane& plane, const Kernel2D& kernel) {
  const int band_r = kernel.radius_rows();
  const int band_c = kernel.radius_cols();
  if (band_r == 0 && band_c == 0) return plane;
  const ImagePlane blurred = convolve_circular(plane, kernel);
  ImagePlane out = plane;
  for (int r = 0; r < plane.height(); ++r) {
    const double wr = taper_weight(r, plane.height(), band_r);
    for (int c = 0; c < plane.width(); ++c) {
      const double wgt = wr * taper_weight(c, plane.width(), band_c);
      if (wgt < 1.0) out(r, c) = wgt * plane(r, c) + (1.0 - wgt) * blurred(r, c);
    }
  }
  return out;
}

RgbImage edge_taper(const RgbImage& img, const RgbKernel& kernel) {
  return RgbImage({edge_taper(img[0], kernel[0]), edge_taper(img[1], kernel[1]), edge_taper(img[2], kernel[2])},
                  img.color_space());
}

}  // namespace rawrestore
