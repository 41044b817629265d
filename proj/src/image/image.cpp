#include "rawrestore/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rawrestore/error.hpp"

namespace rawrestore {

std::string_view color_space_name(ColorSpace cs) {
  return cs == ColorSpace::LinRgb ? "linRGB" : "sRGB";
}

ColorSpace parse_color_space(std::string_view name) {
  if (name == "linRGB" || name == "linrgb" || name == "lin") return ColorSpace::LinRgb;
  if (name == "sRGB" || name == "srgb" || name == "s") return ColorSpace::Srgb;
  throw Error(ErrorCode::InvalidArgument, "unknown color space '" + std::string(name) + "'");
}

ImagePlane::ImagePlane(int height, int width, double fill)
    : height_(height), width_(width) {
  require(height >= 1 && width >= 1, ErrorCode::InvalidArgument,
          "image plane dimensions must be positive");
  data_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill);
}

ImagePlane::ImagePlane(int height, int width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
  require(height >= 1 && width >= 1, ErrorCode::InvalidArgument,
          "image plane dimensions must be positive");
  require(data_.size() == static_cast<std::size_t>(height) * static_cast<std::size_t>(width),
          ErrorCode::DimensionMismatch, "image plane data length does not match height x width");
}

double ImagePlane::wrapped(int row, int col) const noexcept {
  int r = row % height_;
  int c = col % width_;
  if (r < 0) r += height_;
  if (c < 0) c += width_;
  return data_[index(r, c)];
}

double ImagePlane::clamped(int row, int col) const noexcept {
  return data_[index(std::clamp(row, 0, height_ - 1), std::clamp(col, 0, width_ - 1))];
}

RgbImage::RgbImage(int height, int width, ColorSpace cs, double fill)
    : planes_{ImagePlane(height, width, fill), ImagePlane(height, width, fill),
              ImagePlane(height, width, fill)},
      color_space_(cs) {}

RgbImage::RgbImage(std::array<ImagePlane, 3> planes, ColorSpace cs)
    : planes_(std::move(planes)), color_space_(cs) {
  require(planes_[0].same_shape(planes_[1]) && planes_[0].same_shape(planes_[2]),
          ErrorCode::DimensionMismatch, "RGB planes must share dimensions");
}

ImagePlane crop(const ImagePlane& plane, int row, int col, int height, int width) {
  ImagePlane out(height, width);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) out(r, c) = plane.clamped(row + r, col + c);
  return out;
}

RgbImage crop(const RgbImage& img, int row, int col, int height, int width) {
  return RgbImage({crop(img[0], row, col, height, width), crop(img[1], row, col, height, width),
                   crop(img[2], row, col, height, width)},
                  img.color_space());
}

double max_abs_difference(const ImagePlane& a, const ImagePlane& b) {
  require(a.same_shape(b), ErrorCode::DimensionMismatch, "plane dimensions differ");
  double m = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) m = std::max(m, std::abs(da[i] - db[i]));
  return m;
}

double max_abs_difference(const RgbImage& a, const RgbImage& b) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c) m = std::max(m, max_abs_difference(a[c], b[c]));
  return m;
}

}  // namespace rawrestore
