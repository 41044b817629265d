#include "rawrestore/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "rawrestore/error.hpp"

namespace rawrestore {
namespace {

void require_odd_size(int size) {
  require(size >= 1 && size % 2 == 1, ErrorCode::InvalidArgument,
          "kernel size must be a positive odd integer, got " + std::to_string(size));
}

double sample_bilinear(const Kernel2D& k, double row, double col) {
  const int r0 = static_cast<int>(std::floor(row));
  const int c0 = static_cast<int>(std::floor(col));
  const double fr = row - r0;
  const double fc = col - c0;
  auto tap = [&](int r, int c) {
    if (r < 0 || c < 0 || r >= k.height() || c >= k.width()) return 0.0;
    return k(r, c);
  };
  return (1.0 - fr) * (1.0 - fc) * tap(r0, c0) + (1.0 - fr) * fc * tap(r0, c0 + 1) +
         fr * (1.0 - fc) * tap(r0 + 1, c0) + fr * fc * tap(r0 + 1, c0 + 1);
}

}  // namespace

Kernel2D::Kernel2D(int height, int width, std::vector<double> taps)
    : height_(height), width_(width), taps_(std::move(taps)) {
  require_odd_size(height);
  require_odd_size(width);
  require(taps_.size() == static_cast<std::size_t>(height) * width, ErrorCode::DimensionMismatch,
          "kernel tap count does not match its size");
  for (double t : taps_)
    require(t >= 0.0 && std::isfinite(t), ErrorCode::InvalidArgument, "kernel taps must be finite and non-negative");
  require(std::abs(sum() - 1.0) <= kSumTolerance, ErrorCode::InvalidArgument, "kernel taps must sum to one");
}

Kernel2D Kernel2D::normalized(int height, int width, std::vector<double> taps) {
  for (double& t : taps) t = std::max(t, 0.0);
  const double s = std::accumulate(taps.begin(), taps.end(), 0.0);
  require(s > 0.0, ErrorCode::InvalidArgument, "kernel has no positive mass");
  for (double& t : taps) t /= s;
  return Kernel2D(height, width, std::move(taps));
}

Kernel2D Kernel2D::delta(int size) {
  require_odd_size(size);
  std::vector<double> taps(static_cast<std::size_t>(size) * size, 0.0);
  taps[static_cast<std::size_t>(size / 2) * size + size / 2] = 1.0;
  return Kernel2D(size, size, std::move(taps));
}

double Kernel2D::sum() const noexcept { return std::accumulate(taps_.begin(), taps_.end(), 0.0); }

RgbKernel::RgbKernel(std::array<Kernel2D, 3> channels) : channels_(std::move(channels)) {
  for (const auto& k : channels_)
    require(k.height() == channels_[0].height() && k.width() == channels_[0].width(),
            ErrorCode::DimensionMismatch, "RGB kernel channels must share a size");
}

Kernel2D gen_gaussian_kernel(int size, double sigma_major, double sigma_minor, double angle) {
  require_odd_size(size);
  require(sigma_minor > 0.0 && sigma_major >= sigma_minor, ErrorCode::InvalidArgument,
          "Gaussian kernel needs sigma_major >= sigma_minor > 0");
  const double ux = std::cos(angle), uy = std::sin(angle);
  const int center = size / 2;
  std::vector<double> taps(static_cast<std::size_t>(size) * size);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) {
      const double dx = c - center;
      const double dy = r - center;
      const double along = dx * ux + dy * uy;
      const double across = -dx * uy + dy * ux;
      const double q = along * along / (sigma_major * sigma_major) + across * across / (sigma_minor * sigma_minor);
      taps[static_cast<std::size_t>(r) * size + c] = std::exp(-0.5 * q);
    }
  return Kernel2D::normalized(size, size, std::move(taps));
}

Kernel2D random_gaussian_kernel(int size, Rng& rng) {
  const double hi = std::max(0.7, 0.16 * size);
  std::uniform_real_distribution<double> sigma(0.7, hi);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  double a = sigma(rng);
  double b = sigma(rng);
  if (a < b) std::swap(a, b);
  return gen_gaussian_kernel(size, a, b, angle(rng));
}

Kernel2D gen_motion_kernel(int size, double path_length, Rng& rng) {
  require_odd_size(size);
  require(path_length > 0.0, ErrorCode::InvalidArgument, "motion path length must be positive");
  constexpr double kStep = 0.25;
  const int steps = std::max(1, static_cast<int>(std::ceil(path_length / kStep)));
  const double ds = path_length / steps;

  std::uniform_real_distribution<double> heading(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> jitter(0.0, 0.08);
  std::vector<double> xs{0.0}, ys{0.0};
  double theta = heading(rng);
  double turn = 0.0;
  for (int i = 0; i < steps; ++i) {
    turn = 0.95 * turn + jitter(rng);
    theta += turn;
    xs.push_back(xs.back() + ds * std::cos(theta));
    ys.push_back(ys.back() + ds * std::sin(theta));
  }

  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
  double extent = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] -= mx;
    ys[i] -= my;
    extent = std::max({extent, std::abs(xs[i]), std::abs(ys[i])});
  }
  const double limit = std::max(0.0, size / 2 - 1.0);
  const double shrink = extent > limit ? limit / extent : 1.0;

  const int center = size / 2;
  std::vector<double> taps(static_cast<std::size_t>(size) * size, 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double col = center + xs[i] * shrink;
    const double row = center + ys[i] * shrink;
    const int r0 = static_cast<int>(std::floor(row));
    const int c0 = static_cast<int>(std::floor(col));
    const double fr = row - r0;
    const double fc = col - c0;
    auto splat = [&](int r, int c, double w) {
      if (w > 0.0 && r >= 0 && c >= 0 && r < size && c < size) taps[static_cast<std::size_t>(r) * size + c] += w;
    };
    splat(r0, c0, (1 - fr) * (1 - fc));
    splat(r0, c0 + 1, (1 - fr) * fc);
    splat(r0 + 1, c0, fr * (1 - fc));
    splat(r0 + 1, c0 + 1, fr * fc);
  }
  return Kernel2D::normalized(size, size, std::move(taps));
}

Kernel2D random_kernel(int size, Rng& rng) {
  std::bernoulli_distribution motion(0.5);
  if (motion(rng)) {
    std::uniform_real_distribution<double> length(std::min(5.0, 0.2 * size), 0.8 * size);
    return gen_motion_kernel(size, length(rng), rng);
  }
  return random_gaussian_kernel(size, rng);
}

Kernel2D warp_kernel(const Kernel2D& k, double angle_deg, double scale) {
  require(scale > 0.0, ErrorCode::InvalidArgument, "warp scale must be positive");
  const double a = angle_deg * std::numbers::pi / 180.0;
  const double ca = std::cos(a), sa = std::sin(a);
  const int cr = k.height() / 2;
  const int cc = k.width() / 2;
  std::vector<double> taps(k.taps().size());
  for (int r = 0; r < k.height(); ++r)
    for (int c = 0; c < k.width(); ++c) {
      const double dx = c - cc;
      const double dy = r - cr;
      // Inverse map: rotate back by the angle, then undo the scaling.
      const double sx = (ca * dx + sa * dy) / scale;
      const double sy = (-sa * dx + ca * dy) / scale;
      taps[static_cast<std::size_t>(r) * k.width() + c] = sample_bilinear(k, cr + sy, cc + sx);
    }
  return Kernel2D::normalized(k.height(), k.width(), std::move(taps));
}

RgbKernel make_rgb_kernel(const Kernel2D& gray, double red_angle_deg, double red_scale, double green_angle_deg,
                          double green_scale) {
  return RgbKernel({warp_kernel(gray, red_angle_deg, red_scale), warp_kernel(gray, green_angle_deg, green_scale),
                    Kernel2D::normalized(gray.height(), gray.width(), gray.taps())});
}

RgbKernelDraw make_rgb_kernel(const Kernel2D& gray, Rng& rng, const WarpRanges& ranges) {
  require(ranges.max_angle_deg >= 0.0 && 0.0 < ranges.min_scale && ranges.min_scale <= ranges.max_scale,
          ErrorCode::InvalidArgument, "invalid kernel warp ranges");
  std::uniform_real_distribution<double> angle(-ranges.max_angle_deg, ranges.max_angle_deg);
  std::uniform_real_distribution<double> scale(ranges.min_scale, ranges.max_scale);
  auto draw_angle = [&] { return ranges.max_angle_deg == 0.0 ? 0.0 : angle(rng); };
  auto draw_scale = [&] { return ranges.min_scale == ranges.max_scale ? ranges.min_scale : scale(rng); };

  std::array<double, 2> angles{draw_angle(), 0.0};
  std::array<double, 2> scales{draw_scale(), 0.0};
  if (ranges.independent) {
    angles[1] = draw_angle();
    scales[1] = draw_scale();
  } else {
    angles[1] = angles[0];
    scales[1] = scales[0];
  }
  return {make_rgb_kernel(gray, angles[0], scales[0], angles[1], scales[1]), angles, scales};
}

}  // namespace rawrestore
