#include "rawrestore/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rawrestore/error.hpp"

namespace rawrestore {
namespace {

void check_pair(const RgbImage& a, const RgbImage& b, int crop) {
  require(a.same_shape(b), ErrorCode::DimensionMismatch, "metric inputs differ in size");
  require(a.color_space() == b.color_space(), ErrorCode::ColorSpace,
          "metric inputs are tagged with different color spaces");
  require(crop >= 0 && 2 * crop < a.height() && 2 * crop < a.width(), ErrorCode::InvalidArgument,
          "border crop " + std::to_string(crop) + " leaves no pixels");
}

std::vector<double> gaussian_window(const SsimWindow& w) {
  std::vector<double> g(static_cast<std::size_t>(w.size));
  const int half = w.size / 2;
  double sum = 0.0;
  for (int i = 0; i < w.size; ++i) {
    const double d = i - half;
    g[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * w.sigma * w.sigma));
    sum += g[static_cast<std::size_t>(i)];
  }
  for (double& v : g) v /= sum;
  return g;
}

// Separable valid-mode filtering of the crop region of `src`.
std::vector<double> filter_valid(const std::vector<double>& src, int h, int w,
                                 const std::vector<double>& g) {
  const int k = static_cast<int>(g.size());
  const int oh = h - k + 1;
  const int ow = w - k + 1;
  std::vector<double> tmp(static_cast<std::size_t>(h) * ow);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < ow; ++c) {
      double s = 0.0;
      for (int t = 0; t < k; ++t) s += g[static_cast<std::size_t>(t)] * src[static_cast<std::size_t>(r) * w + c + t];
      tmp[static_cast<std::size_t>(r) * ow + c] = s;
    }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int r = 0; r < oh; ++r)
    for (int c = 0; c < ow; ++c) {
      double s = 0.0;
      for (int t = 0; t < k; ++t) s += g[static_cast<std::size_t>(t)] * tmp[static_cast<std::size_t>(r + t) * ow + c];
      out[static_cast<std::size_t>(r) * ow + c] = s;
    }
  return out;
}

double ssim_plane(const ImagePlane& a, const ImagePlane& b, int crop, const std::vector<double>& g) {
  const int h = a.height() - 2 * crop;
  const int w = a.width() - 2 * crop;
  const std::size_t n = static_cast<std::size_t>(h) * w;
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      x[i] = a(r + crop, c + crop);
      y[i] = b(r + crop, c + crop);
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
  const auto mx = filter_valid(x, h, w, g);
  const auto my = filter_valid(y, h, w, g);
  const auto mxx = filter_valid(xx, h, w, g);
  const auto myy = filter_valid(yy, h, w, g);
  const auto mxy = filter_valid(xy, h, w, g);

  constexpr double c1 = 0.01 * 0.01;
  constexpr double c2 = 0.03 * 0.03;
  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double vx = mxx[i] - mx[i] * mx[i];
    const double vy = myy[i] - my[i] * my[i];
    const double cov = mxy[i] - mx[i] * my[i];
    total += ((2 * mx[i] * my[i] + c1) * (2 * cov + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(mx.size());
}

}  // namespace

double psnr(const RgbImage& a, const RgbImage& b, int crop) {
  check_pair(a, b, crop);
  double sum = 0.0;
  std::size_t count = 0;
  for (int ch = 0; ch < 3; ++ch)
    for (int r = crop; r < a.height() - crop; ++r)
      for (int c = crop; c < a.width() - crop; ++c) {
        const double d = a[ch](r, c) - b[ch](r, c);
        sum += d * d;
        ++count;
      }
  const double mse = sum / static_cast<double>(count);
  if (mse <= 0.0) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 10.0 * std::log10(1.0 / mse));
}

double ssim(const RgbImage& a, const RgbImage& b, int crop, SsimWindow window) {
  check_pair(a, b, crop);
  require(window.size >= 1 && window.size % 2 == 1 && window.sigma > 0.0, ErrorCode::InvalidArgument,
          "SSIM window must have odd size and positive sigma");
  require(a.height() - 2 * crop >= window.size && a.width() - 2 * crop >= window.size,
          ErrorCode::InvalidArgument, "cropped region is smaller than the SSIM window");
  const auto g = gaussian_window(window);
  double total = 0.0;
  for (int ch = 0; ch < 3; ++ch) total += ssim_plane(a[ch], b[ch], crop, g);
  return total / 3.0;
}

MetricReport evaluate(const RgbImage& restored, const RgbImage& reference, int crop) {
  return {psnr(restored, reference, crop), ssim(restored, reference, crop), crop};
}

}  // namespace rawrestore
