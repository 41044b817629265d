#pragma once

#include <complex>
#include <vector>

#include "rawrestore/image.hpp"

namespace rawrestore::fft {

using Complex = std::complex<double>;

// Full complex 2-D spectrum, row-major, unnormalized forward transform.
class Spectrum {
 public:
  Spectrum(int height, int width) : height_(height), width_(width), data_(static_cast<std::size_t>(height) * width) {}

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }

  Complex& operator()(int k, int l) noexcept { return data_[static_cast<std::size_t>(k) * width_ + l]; }
  const Complex& operator()(int k, int l) const noexcept {
    return data_[static_cast<std::size_t>(k) * width_ + l];
  }
  Complex* raw() noexcept { return data_.data(); }
  const Complex* raw() const noexcept { return data_.data(); }
  std::vector<Complex>& values() noexcept { return data_; }
  const std::vector<Complex>& values() const noexcept { return data_; }

 private:
  int height_;
  int width_;
  std::vector<Complex> data_;
};

Spectrum forward(const ImagePlane& plane);
// Inverse transform (scaled by 1/N), real part.
ImagePlane inverse_real(Spectrum spectrum);

// Spectrum of a centered kernel embedded into a height x width periodic
// grid: tap (i, j) lands at ((i - ci) mod height, (j - cj) mod width).
// The kernel must not exceed the grid.
Spectrum transfer_function(int kernel_height, int kernel_width, const std::vector<double>& taps,
                           int height, int width);

}  // namespace rawrestore::fft
