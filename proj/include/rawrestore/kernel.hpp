#pragma once

#include <array>
#include <random>
#include <vector>

#include "rawrestore/image.hpp"

namespace rawrestore {

// Odd-sized, non-negative blur kernel whose taps sum to one. The center tap
// sits at (height / 2, width / 2).
class Kernel2D {
 public:
  static constexpr double kSumTolerance = 1e-6;

  // Validates odd size, non-negative taps and unit sum.
  Kernel2D(int height, int width, std::vector<double> taps);

  // Clips negative taps to zero and divides by the sum.
  static Kernel2D normalized(int height, int width, std::vector<double> taps);
  static Kernel2D delta(int size = 1);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int radius_rows() const noexcept { return height_ / 2; }
  int radius_cols() const noexcept { return width_ / 2; }
  double operator()(int row, int col) const noexcept {
    return taps_[static_cast<std::size_t>(row) * width_ + col];
  }
  const std::vector<double>& taps() const noexcept { return taps_; }
  double sum() const noexcept;

  ImagePlane as_plane() const { return ImagePlane(height_, width_, taps_); }

  friend bool operator==(const Kernel2D&, const Kernel2D&) = default;

 private:
  int height_;
  int width_;
  std::vector<double> taps_;
};

// Per-channel kernels (R, G, B) of identical size.
class RgbKernel {
 public:
  explicit RgbKernel(std::array<Kernel2D, 3> channels);
  static RgbKernel uniform(const Kernel2D& k) { return RgbKernel({k, k, k}); }

  const Kernel2D& operator[](int channel) const noexcept { return channels_[static_cast<std::size_t>(channel)]; }
  int height() const noexcept { return channels_[0].height(); }
  int width() const noexcept { return channels_[0].width(); }

  friend bool operator==(const RgbKernel&, const RgbKernel&) = default;

 private:
  std::array<Kernel2D, 3> channels_;
};

using Rng = std::mt19937_64;

// Point-sampled anisotropic Gaussian; `angle` (radians) orients the major axis
// counter-clockwise from the column axis.
Kernel2D gen_gaussian_kernel(int size, double sigma_major, double sigma_minor, double angle);
// Random sigmas in [0.7, 0.16 * size] and a uniform orientation.
Kernel2D random_gaussian_kernel(int size, Rng& rng);

// Smoothed random-walk camera trajectory of the given arc length, centred on
// its centroid and splatted bilinearly. Trajectories that would leave the
// support are shrunk to fit.
Kernel2D gen_motion_kernel(int size, double path_length, Rng& rng);

// Gaussian or motion kernel with equal probability.
Kernel2D random_kernel(int size, Rng& rng);

struct WarpRanges {
  double max_angle_deg = 5.0;
  double min_scale = 0.8;
  double max_scale = 1.0;
  // Red and green draw their own angle and scale; otherwise they share one.
  bool independent = true;
};

struct RgbKernelDraw {
  RgbKernel kernel;
  std::array<double, 2> angles_deg;  // red, green
  std::array<double, 2> scales;      // red, green
};

// Rotates about the center by `angle_deg` and rescales by `scale` with
// bilinear sampling and zero fill, then clips and renormalizes.
Kernel2D warp_kernel(const Kernel2D& k, double angle_deg, double scale);

// Blue is the gray kernel; red and green are small random warps of it.
RgbKernelDraw make_rgb_kernel(const Kernel2D& gray, Rng& rng, const WarpRanges& ranges = {});
RgbKernel make_rgb_kernel(const Kernel2D& gray, double red_angle_deg, double red_scale,
                          double green_angle_deg, double green_scale);

}  // namespace rawrestore
