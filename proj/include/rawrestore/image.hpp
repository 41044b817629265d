#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace rawrestore {

enum class ColorSpace { LinRgb, Srgb };

std::string_view color_space_name(ColorSpace cs);
ColorSpace parse_color_space(std::string_view name);

// Single-channel raster, row-major, double precision. Samples are nominally
// in [0, 1] but intermediate results may leave that range.
class ImagePlane {
 public:
  ImagePlane(int height, int width, double fill = 0.0);
  ImagePlane(int height, int width, std::vector<double> data);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(int row, int col) noexcept { return data_[index(row, col)]; }
  double operator()(int row, int col) const noexcept { return data_[index(row, col)]; }

  // Periodic indexing; any integer coordinates are valid.
  double wrapped(int row, int col) const noexcept;
  // Edge-replicating indexing.
  double clamped(int row, int col) const noexcept;

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool same_shape(const ImagePlane& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

 private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int height_;
  int width_;
  std::vector<double> data_;
};

// Three equally sized planes (R, G, B) tagged with their color space.
class RgbImage {
 public:
  RgbImage(int height, int width, ColorSpace cs, double fill = 0.0);
  RgbImage(std::array<ImagePlane, 3> planes, ColorSpace cs);

  int height() const noexcept { return planes_[0].height(); }
  int width() const noexcept { return planes_[0].width(); }
  ColorSpace color_space() const noexcept { return color_space_; }
  void set_color_space(ColorSpace cs) noexcept { color_space_ = cs; }

  ImagePlane& operator[](int channel) noexcept { return planes_[static_cast<std::size_t>(channel)]; }
  const ImagePlane& operator[](int channel) const noexcept {
    return planes_[static_cast<std::size_t>(channel)];
  }

  bool same_shape(const RgbImage& other) const noexcept { return planes_[0].same_shape(other.planes_[0]); }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::array<ImagePlane, 3> planes_;
  ColorSpace color_space_;
};

// Copies the rectangle [row, row + height) x [col, col + width); coordinates
// outside the source are edge-replicated.
ImagePlane crop(const ImagePlane& plane, int row, int col, int height, int width);
RgbImage crop(const RgbImage& img, int row, int col, int height, int width);

double max_abs_difference(const ImagePlane& a, const ImagePlane& b);
double max_abs_difference(const RgbImage& a, const RgbImage& b);

}  // namespace rawrestore
