#pragma once

#include <array>
#include <vector>

#include "rawrestore/fft.hpp"
#include "rawrestore/image.hpp"
#include "rawrestore/isp.hpp"
#include "rawrestore/kernel.hpp"

namespace rawrestore {

// Data-fidelity half-step of half-quadratic splitting. All operators are
// periodic; kernels must fit inside the image.

// Per channel, the exact minimizer of ||d_c - K_c z||^2 + beta ||z - x_c||^2:
// z^ = (conj(K^) d^ + beta x^) / (|K^|^2 + beta).
RgbImage zstep_plain_fft(const RgbImage& d, const RgbImage& x, const RgbKernel& kernel, double beta);

struct MosaicZStep {
  RgbImage z;
  // Unrecombined per-site solutions, indexed by CfaSite (R, G1, G2, B).
  std::array<ImagePlane, 4> sites;
};

// Per CFA site c, solves (K_c' D_c' D_c K_c + beta I) z_c = K_c' D_c' y + beta x_c
// in closed form, D_c being the rate-2 decimation at the site's offset. Green
// is recombined from the G1 and G2 solutions (see recombine_green).
MosaicZStep zstep_mosaic_fft_sites(const RawImage& y, const RgbImage& x, const RgbKernel& kernel, double beta);
RgbImage zstep_mosaic_fft(const RawImage& y, const RgbImage& x, const RgbKernel& kernel, double beta);

// Green sites copy their own sub-solution; red and blue sites take the
// average of the two.
ImagePlane recombine_green(const ImagePlane& g1, const ImagePlane& g2, const CfaPattern& cfa);

// Solvers with the observation-dependent spectra precomputed, for repeated
// calls with a changing anchor x and weight beta.
class PlainZSolver {
 public:
  PlainZSolver(const RgbImage& d, const RgbKernel& kernel);
  RgbImage solve(const RgbImage& x, double beta) const;

 private:
  std::vector<fft::Spectrum> otf_;
  std::vector<fft::Spectrum> data_;  // conj(K^) d^
};

class MosaicZSolver {
 public:
  MosaicZSolver(const RawImage& y, const RgbKernel& kernel);
  MosaicZStep solve(const RgbImage& x, double beta) const;

 private:
  struct Site {
    SiteOffset offset;
    int channel;
    fft::Spectrum data;            // conj(K^) times the spectrum of the zero-filled samples
    std::vector<fft::Complex> shift;  // phase of the cyclic shift onto the site
  };

  ImagePlane solve_site(const Site& site, const fft::Spectrum& x_hat, double beta) const;

  int height_;
  int width_;
  CfaPattern cfa_;
  std::vector<fft::Spectrum> otf_;
  std::vector<std::vector<double>> aliased_power_;  // quarter-size grids, per channel
  std::vector<Site> sites_;                         // indexed by CfaSite
};

}  // namespace rawrestore
