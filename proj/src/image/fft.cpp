#include "rawrestore/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "rawrestore/error.hpp"

namespace rawrestore::fft {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan is. Plans
// are created once per (height, width, sign) and reused on any buffer.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int height, int width, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(height, width, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<Complex> scratch(static_cast<std::size_t>(height) * width);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_2d(height, width, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void execute(Spectrum& s, int sign) {
  fftw_plan plan = PlanCache::instance().get(s.height(), s.width(), sign);
  auto* buf = reinterpret_cast<fftw_complex*>(s.raw());
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace

Spectrum forward(const ImagePlane& plane) {
  Spectrum s(plane.height(), plane.width());
  auto src = plane.data();
  auto& dst = s.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = Complex(src[i], 0.0);
  execute(s, FFTW_FORWARD);
  return s;
}

ImagePlane inverse_real(Spectrum spectrum) {
  execute(spectrum, FFTW_BACKWARD);
  ImagePlane out(spectrum.height(), spectrum.width());
  const double scale = 1.0 / static_cast<double>(spectrum.size());
  auto dst = out.data();
  const auto& src = spectrum.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i].real() * scale;
  return out;
}

Spectrum transfer_function(int kernel_height, int kernel_width, const std::vector<double>& taps,
                           int height, int width) {
  require(kernel_height <= height && kernel_width <= width, ErrorCode::DimensionMismatch,
          "kernel is larger than the image");
  Spectrum s(height, width);
  const int ci = kernel_height / 2;
  const int cj = kernel_width / 2;
  for (int i = 0; i < kernel_height; ++i) {
    const int r = ((i - ci) % height + height) % height;
    for (int j = 0; j < kernel_width; ++j) {
      const int c = ((j - cj) % width + width) % width;
      s(r, c) += taps[static_cast<std::size_t>(i) * kernel_width + j];
    }
  }
  execute(s, FFTW_FORWARD);
  return s;
}

}  // namespace rawrestore::fft
