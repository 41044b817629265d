#include "rawrestore/zstep.hpp"

#include <cmath>
#include <numbers>

#include "rawrestore/error.hpp"

namespace rawrestore {
namespace {

using fft::Complex;
using fft::Spectrum;

void check_beta(double beta) {
  require(beta > 0.0 && std::isfinite(beta), ErrorCode::InvalidArgument, "z-step weight beta must be positive");
}

Spectrum channel_otf(const Kernel2D& k, int height, int width) {
  return fft::transfer_function(k.height(), k.width(), k.taps(), height, width);
}

}  // namespace

// ---------------------------------------------------------------- plain

PlainZSolver::PlainZSolver(const RgbImage& d, const RgbKernel& kernel) {
  for (int ch = 0; ch < 3; ++ch) {
    otf_.push_back(channel_otf(kernel[ch], d.height(), d.width()));
    Spectrum dh = fft::forward(d[ch]);
    const auto& otf = otf_.back().values();
    for (std::size_t i = 0; i < dh.size(); ++i) dh.values()[i] *= std::conj(otf[i]);
    data_.push_back(std::move(dh));
  }
}

RgbImage PlainZSolver::solve(const RgbImage& x, double beta) const {
  check_beta(beta);
  require(x.height() == data_[0].height() && x.width() == data_[0].width(), ErrorCode::DimensionMismatch,
          "z-step anchor does not match the observation size");
  std::array<ImagePlane, 3> out{ImagePlane(1, 1), ImagePlane(1, 1), ImagePlane(1, 1)};
  for (int ch = 0; ch < 3; ++ch) {
    Spectrum xh = fft::forward(x[ch]);
    const auto& otf = otf_[static_cast<std::size_t>(ch)].values();
    const auto& data = data_[static_cast<std::size_t>(ch)].values();
    auto& v = xh.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (data[i] + beta * v[i]) / (std::norm(otf[i]) + beta);
    out[static_cast<std::size_t>(ch)] = fft::inverse_real(std::move(xh));
  }
  return RgbImage(std::move(out), x.color_space());
}

RgbImage zstep_plain_fft(const RgbImage& d, const RgbImage& x, const RgbKernel& kernel, double beta) {
  require(d.same_shape(x), ErrorCode::DimensionMismatch, "z-step inputs differ in size");
  return PlainZSolver(d, kernel).solve(x, beta);
}

// ---------------------------------------------------------------- mosaic
//
// With A = D S K (S the cyclic shift bringing the site to the origin, D the
// rate-2 decimation at the origin), Woodbury gives
//   z = (r - A' (beta I + A A')^-1 A r) / beta,   r = A' y + beta x.
// A A' = D K K' D' is diagonalised on the quarter-size grid by the average of
// |K^|^2 over the four aliased frequencies, so the whole solve stays in the
// frequency domain.

MosaicZSolver::MosaicZSolver(const RawImage& y, const RgbKernel& kernel)
    : height_(y.height()), width_(y.width()), cfa_(y.cfa()) {
  const int qh = height_ / 2;
  const int qw = width_ / 2;
  for (int ch = 0; ch < 3; ++ch) {
    otf_.push_back(channel_otf(kernel[ch], height_, width_));
    const Spectrum& otf = otf_.back();
    std::vector<double> power(static_cast<std::size_t>(qh) * qw);
    for (int k = 0; k < qh; ++k)
      for (int l = 0; l < qw; ++l)
        power[static_cast<std::size_t>(k) * qw + l] =
            0.25 * (std::norm(otf(k, l)) + std::norm(otf(k, l + qw)) + std::norm(otf(k + qh, l)) +
                    std::norm(otf(k + qh, l + qw)));
    aliased_power_.push_back(std::move(power));
  }

  for (CfaSite site : kAllSites) {
    const SiteOffset o = cfa_.offset(site);
    const int ch = channel_of(site);
    ImagePlane samples(height_, width_);
    for (int r = o.row; r < height_; r += 2)
      for (int c = o.col; c < width_; c += 2) samples(r, c) = y.plane()(r, c);
    Spectrum data = fft::forward(samples);
    const auto& otf = otf_[static_cast<std::size_t>(ch)].values();
    for (std::size_t i = 0; i < data.size(); ++i) data.values()[i] *= std::conj(otf[i]);

    // (S u)(p) = u(p + o)  <=>  multiply the spectrum by exp(2 pi i k.o / N).
    std::vector<Complex> shift(static_cast<std::size_t>(height_) * width_);
    for (int k = 0; k < height_; ++k)
      for (int l = 0; l < width_; ++l) {
        const double phase = 2.0 * std::numbers::pi *
                             (static_cast<double>(k) * o.row / height_ + static_cast<double>(l) * o.col / width_);
        shift[static_cast<std::size_t>(k) * width_ + l] = std::polar(1.0, phase);
      }
    sites_.push_back(Site{o, ch, std::move(data), std::move(shift)});
  }
}

ImagePlane MosaicZSolver::solve_site(const Site& site, const Spectrum& x_hat, double beta) const {
  const int qh = height_ / 2;
  const int qw = width_ / 2;
  const auto& otf = otf_[static_cast<std::size_t>(site.channel)];
  const auto& power = aliased_power_[static_cast<std::size_t>(site.channel)];
  const std::size_t n = static_cast<std::size_t>(height_) * width_;

  // r^ = conj(K^) y_c^ + beta x^
  Spectrum rhs(height_, width_);
  for (std::size_t i = 0; i < n; ++i) rhs.values()[i] = site.data.values()[i] + beta * x_hat.values()[i];

  // A r on the quarter grid: shift-modulate K^ r^, then fold the four aliases.
  std::vector<Complex> folded(static_cast<std::size_t>(qh) * qw);
  auto ar = [&](int k, int l) {
    const std::size_t i = static_cast<std::size_t>(k) * width_ + l;
    return otf.values()[i] * rhs.values()[i] * site.shift[i];
  };
  for (int k = 0; k < qh; ++k)
    for (int l = 0; l < qw; ++l) {
      const std::size_t q = static_cast<std::size_t>(k) * qw + l;
      folded[q] = 0.25 * (ar(k, l) + ar(k, l + qw) + ar(k + qh, l) + ar(k + qh, l + qw)) / (beta + power[q]);
    }

  // z^ = (r^ - A' w^) / beta, A' = K' S' D' (unfold, unshift, correlate).
  Spectrum z(height_, width_);
  for (int k = 0; k < height_; ++k)
    for (int l = 0; l < width_; ++l) {
      const std::size_t i = static_cast<std::size_t>(k) * width_ + l;
      const Complex w = folded[static_cast<std::size_t>(k % qh) * qw + (l % qw)];
      z.values()[i] = (rhs.values()[i] - std::conj(otf.values()[i]) * std::conj(site.shift[i]) * w) / beta;
    }
  return fft::inverse_real(std::move(z));
}

MosaicZStep MosaicZSolver::solve(const RgbImage& x, double beta) const {
  check_beta(beta);
  require(x.height() == height_ && x.width() == width_, ErrorCode::DimensionMismatch,
          "z-step anchor does not match the raw image size");
  const std::array<Spectrum, 3> x_hat{fft::forward(x[0]), fft::forward(x[1]), fft::forward(x[2])};
  std::array<ImagePlane, 4> sites{ImagePlane(1, 1), ImagePlane(1, 1), ImagePlane(1, 1), ImagePlane(1, 1)};
  for (std::size_t s = 0; s < sites_.size(); ++s)
    sites[s] = solve_site(sites_[s], x_hat[static_cast<std::size_t>(sites_[s].channel)], beta);

  const auto idx = [](CfaSite s) { return static_cast<std::size_t>(s); };
  RgbImage z({sites[idx(CfaSite::R)], recombine_green(sites[idx(CfaSite::G1)], sites[idx(CfaSite::G2)], cfa_),
              sites[idx(CfaSite::B)]},
             ColorSpace::LinRgb);
  return {std::move(z), std::move(sites)};
}

MosaicZStep zstep_mosaic_fft_sites(const RawImage& y, const RgbImage& x, const RgbKernel& kernel, double beta) {
  return MosaicZSolver(y, kernel).solve(x, beta);
}

RgbImage zstep_mosaic_fft(const RawImage& y, const RgbImage& x, const RgbKernel& kernel, double beta) {
  return zstep_mosaic_fft_sites(y, x, kernel, beta).z;
}

ImagePlane recombine_green(const ImagePlane& g1, const ImagePlane& g2, const CfaPattern& cfa) {
  require(g1.same_shape(g2), ErrorCode::DimensionMismatch, "green sub-solutions differ in size");
  ImagePlane out(g1.height(), g1.width());
  for (int r = 0; r < out.height(); ++r)
    for (int c = 0; c < out.width(); ++c) {
      switch (cfa.site_at(r, c)) {
        case CfaSite::G1: out(r, c) = g1(r, c); break;
        case CfaSite::G2: out(r, c) = g2(r, c); break;
        default: out(r, c) = (g1(r, c) + g2(r, c)) / 2.0; break;
      }
    }
  return out;
}

}  // namespace rawrestore
