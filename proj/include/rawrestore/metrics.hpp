#pragma once

#include "rawrestore/image.hpp"

namespace rawrestore {

// Identical images would give an infinite PSNR; reports use this cap instead.
inline constexpr double kPsnrCapDb = 99.0;

struct SsimWindow {
  int size = 11;
  double sigma = 1.5;
};

struct MetricReport {
  double psnr = 0.0;
  double ssim = 0.0;
  int border_crop = 0;
};

// Peak 1.0, mean squared error over all three channels of the region left
// after removing `crop` pixels on every side.
double psnr(const RgbImage& a, const RgbImage& b, int crop);

// Single-scale SSIM with a Gaussian window over the cropped region (valid
// filtering), C1 = 0.01^2, C2 = 0.03^2, averaged over channels.
double ssim(const RgbImage& a, const RgbImage& b, int crop, SsimWindow window = {});

MetricReport evaluate(const RgbImage& restored, const RgbImage& reference, int crop);

}  // namespace rawrestore
