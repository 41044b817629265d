#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "rawrestore/image.hpp"

namespace rawrestore {

// ---------------------------------------------------------------- CFA

enum class CfaSite { R = 0, G1 = 1, G2 = 2, B = 3 };
inline constexpr std::array<CfaSite, 4> kAllSites{CfaSite::R, CfaSite::G1, CfaSite::G2, CfaSite::B};

// RGB channel index a site samples (G1 and G2 both sample green).
constexpr int channel_of(CfaSite site) {
  switch (site) {
    case CfaSite::R: return 0;
    case CfaSite::G1:
    case CfaSite::G2: return 1;
    case CfaSite::B: return 2;
  }
  return 1;
}

struct SiteOffset {
  int row;
  int col;
  friend bool operator==(const SiteOffset&, const SiteOffset&) = default;
};

enum class CfaName { RGGB, BGGR, GRBG, GBRG };

// 2x2 Bayer tile geometry. G1 is the green site on the tile's first row.
class CfaPattern {
 public:
  explicit CfaPattern(CfaName name = CfaName::RGGB);
  // Explicit geometry; offsets indexed by CfaSite. Validated to be a
  // permutation of the tile with the two greens diagonally opposite.
  CfaPattern(CfaName name, std::array<SiteOffset, 4> offsets);

  static CfaPattern parse(std::string_view name);

  CfaName name() const noexcept { return name_; }
  std::string_view name_string() const noexcept;
  SiteOffset offset(CfaSite site) const noexcept { return offsets_[static_cast<std::size_t>(site)]; }
  CfaSite site_at(int row, int col) const noexcept {
    return tile_[static_cast<std::size_t>((row & 1) * 2 + (col & 1))];
  }
  int channel_at(int row, int col) const noexcept { return channel_of(site_at(row, col)); }

  // Same tile with the G1/G2 labels exchanged.
  CfaPattern with_swapped_greens() const;

  friend bool operator==(const CfaPattern& a, const CfaPattern& b) { return a.offsets_ == b.offsets_; }

 private:
  void build_tile();

  CfaName name_;
  std::array<SiteOffset, 4> offsets_;
  std::array<CfaSite, 4> tile_{};
};

// ---------------------------------------------------------------- noise

// Per-pixel variance shot * value + read.
struct NoiseParams {
  double shot = 0.0;
  double read = 0.0;

  void validate() const;
  friend bool operator==(const NoiseParams&, const NoiseParams&) = default;
};

struct NoiseSampling {
  double shot_min = 1e-4;
  double shot_max = 3e-3;
  // log(read) = slope * log(shot) + intercept (natural logarithms).
  double log_slope = 2.18;
  double log_intercept = 1.20;
};

double read_noise_for(double shot, const NoiseSampling& sampling = {});

// Shot weight log-uniform in [shot_min, shot_max]; read weight from the
// log-affine relation.
NoiseParams sample_noise_params(std::uint64_t seed, const NoiseSampling& sampling = {});

// ---------------------------------------------------------------- raw

// Mosaicked sensor plane. Dimensions are even so every 2x2 tile is complete.
class RawImage {
 public:
  RawImage(ImagePlane plane, CfaPattern cfa, NoiseParams noise = {});

  const ImagePlane& plane() const noexcept { return plane_; }
  ImagePlane& plane() noexcept { return plane_; }
  const CfaPattern& cfa() const noexcept { return cfa_; }
  const NoiseParams& noise() const noexcept { return noise_; }
  void set_noise(NoiseParams noise);
  int height() const noexcept { return plane_.height(); }
  int width() const noexcept { return plane_.width(); }

 private:
  ImagePlane plane_;
  CfaPattern cfa_;
  NoiseParams noise_;
};

RawImage mosaic(const RgbImage& img, const CfaPattern& cfa);

// Adds independent zero-mean Gaussian noise of variance
// shot * max(value, 0) + read. No clamping.
RawImage apply_noise(const RawImage& raw, const NoiseParams& params, std::uint64_t seed);

// ---------------------------------------------------------------- ISP

using Matrix3 = std::array<std::array<double, 3>, 3>;

inline constexpr Matrix3 kIdentity3{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};

struct IspParams {
  Matrix3 ccm = kIdentity3;
  std::array<double, 3> wb_gains{1.0, 1.0, 1.0};

  void validate() const;
};

double srgb_decode(double v);  // display value -> linear
double srgb_encode(double v);  // linear -> display value

// Inverse transfer, inverse CCM, divide by white-balance gains.
RgbImage srgb_to_linrgb(const RgbImage& img, const IspParams& params = {});
// Multiply by gains, apply CCM, forward transfer, clamp to [0, 1].
RgbImage linrgb_to_srgb(const RgbImage& img, const IspParams& params = {});

// ---------------------------------------------------------------- demosaicking

enum class DemosaicMethod { Bilinear, Classical };

DemosaicMethod parse_demosaic_method(std::string_view name);

// Nearest same-color neighbour averaging over the 3x3 neighbourhood.
RgbImage demosaic_bilinear(const RawImage& raw);
// Gradient-corrected linear interpolation with fixed 5x5 stencils
// (Malvar-He-Cutler). Ignores the noise parameters.
RgbImage demosaic_classical(const RawImage& raw);
RgbImage demosaic(const RawImage& raw, DemosaicMethod method);

}  // namespace rawrestore
