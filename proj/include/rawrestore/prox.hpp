#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rawrestore/image.hpp"

namespace rawrestore {

// prox(z, gamma) = argmin_x gamma * Omega(x) + 0.5 ||z - x||^2, channel-wise.
class ProxOperator {
 public:
  virtual ~ProxOperator() = default;
  virtual RgbImage evaluate(const RgbImage& z, double gamma) const = 0;
  // Omega(x), for objective tracking.
  virtual double prior(const RgbImage& x) const = 0;
  virtual std::string name() const = 0;
};

// Omega(x) = ||grad x||^2 with periodic forward differences; solved exactly
// by dividing the spectrum by 1 + 2 gamma L^, L the 5-point Laplacian.
class FourierTikhonov final : public ProxOperator {
 public:
  RgbImage evaluate(const RgbImage& z, double gamma) const override;
  double prior(const RgbImage& x) const override;
  std::string name() const override { return "tikhonov"; }
};

// Channels the TV prior is applied to. Opponent is the orthonormal basis
// Y = (R+G+B)/sqrt3, C1 = (R-B)/sqrt2, C2 = (R-2G+B)/sqrt6; since the
// transform is orthogonal the prox is computed exactly in that basis.
enum class ColorBasis { Rgb, Opponent };

std::string_view color_basis_name(ColorBasis b);
ColorBasis parse_color_basis(std::string_view name);

RgbImage to_opponent(const RgbImage& x);
RgbImage from_opponent(const RgbImage& o);

// Anisotropic total variation (Neumann boundary) via a fixed number of fast
// dual projected-gradient steps. The returned iterate is the best one seen,
// so the primal energy never increases with more iterations.
class TvProx final : public ProxOperator {
 public:
  explicit TvProx(int inner_iterations = 20, ColorBasis basis = ColorBasis::Rgb);
  RgbImage evaluate(const RgbImage& z, double gamma) const override;
  double prior(const RgbImage& x) const override;
  std::string name() const override { return "tv"; }
  int inner_iterations() const noexcept { return inner_iterations_; }
  ColorBasis basis() const noexcept { return basis_; }

 private:
  int inner_iterations_;
  ColorBasis basis_;
};

double gradient_energy(const ImagePlane& x);  // periodic ||grad x||^2
double total_variation(const ImagePlane& x);  // anisotropic, Neumann

ImagePlane prox_tikhonov(const ImagePlane& z, double gamma);
RgbImage prox_tikhonov(const RgbImage& z, double gamma);

// `energy_trace`, when given, receives gamma*TV(x) + 0.5||z - x||^2 of the
// kept iterate: first for x = z, then after every inner iteration.
ImagePlane prox_tv(const ImagePlane& z, double gamma, int inner_iterations = 20,
                   std::vector<double>* energy_trace = nullptr);
RgbImage prox_tv(const RgbImage& z, double gamma, int inner_iterations = 20);

std::unique_ptr<ProxOperator> make_prox(std::string_view name, int tv_iterations = 20,
                                        ColorBasis basis = ColorBasis::Rgb);

}  // namespace rawrestore
