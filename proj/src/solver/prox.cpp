#include "rawrestore/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rawrestore/error.hpp"
#include "rawrestore/fft.hpp"

namespace rawrestore {
namespace {

void check_gamma(double gamma) {
  require(gamma >= 0.0 && std::isfinite(gamma), ErrorCode::InvalidArgument, "prox weight gamma must be >= 0");
}

template <typename F>
RgbImage per_channel(const RgbImage& z, F&& f) {
  return RgbImage({f(z[0]), f(z[1]), f(z[2])}, z.color_space());
}

// Forward differences with the last row/column set to zero (Neumann).
struct DualField {
  ImagePlane horizontal;
  ImagePlane vertical;
};

void gradient(const ImagePlane& x, DualField& g) {
  const int h = x.height(), w = x.width();
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      g.horizontal(r, c) = c + 1 < w ? x(r, c + 1) - x(r, c) : 0.0;
      g.vertical(r, c) = r + 1 < h ? x(r + 1, c) - x(r, c) : 0.0;
    }
}

// x = z - gamma * grad' p
void primal_from_dual(const ImagePlane& z, const DualField& p, double gamma, ImagePlane& x) {
  const int h = z.height(), w = z.width();
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      double adj = 0.0;
      if (c > 0) adj += p.horizontal(r, c - 1);
      if (c + 1 < w) adj -= p.horizontal(r, c);
      if (r > 0) adj += p.vertical(r - 1, c);
      if (r + 1 < h) adj -= p.vertical(r, c);
      x(r, c) = z(r, c) - gamma * adj;
    }
}

double tv_energy(const ImagePlane& z, const ImagePlane& x, double gamma) {
  double fidelity = 0.0;
  auto dz = z.data();
  auto dx = x.data();
  for (std::size_t i = 0; i < dz.size(); ++i) fidelity += (dz[i] - dx[i]) * (dz[i] - dx[i]);
  return gamma * total_variation(x) + 0.5 * fidelity;
}

}  // namespace

double gradient_energy(const ImagePlane& x) {
  double s = 0.0;
  for (int r = 0; r < x.height(); ++r)
    for (int c = 0; c < x.width(); ++c) {
      const double dh = x.wrapped(r, c + 1) - x(r, c);
      const double dv = x.wrapped(r + 1, c) - x(r, c);
      s += dh * dh + dv * dv;
    }
  return s;
}

double total_variation(const ImagePlane& x) {
  double s = 0.0;
  for (int r = 0; r < x.height(); ++r)
    for (int c = 0; c < x.width(); ++c) {
      if (c + 1 < x.width()) s += std::abs(x(r, c + 1) - x(r, c));
      if (r + 1 < x.height()) s += std::abs(x(r + 1, c) - x(r, c));
    }
  return s;
}

ImagePlane prox_tikhonov(const ImagePlane& z, double gamma) {
  check_gamma(gamma);
  if (gamma == 0.0) return z;
  fft::Spectrum s = fft::forward(z);
  const int h = z.height(), w = z.width();
  for (int k = 0; k < h; ++k) {
    const double lk = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / h);
    for (int l = 0; l < w; ++l) {
      const double ll = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * l / w);
      s(k, l) /= 1.0 + 2.0 * gamma * (lk + ll);
    }
  }
  return fft::inverse_real(std::move(s));
}

RgbImage prox_tikhonov(const RgbImage& z, double gamma) {
  return per_channel(z, [gamma](const ImagePlane& p) { return prox_tikhonov(p, gamma); });
}

ImagePlane prox_tv(const ImagePlane& z, double gamma, int inner_iterations, std::vector<double>* energy_trace) {
  check_gamma(gamma);
  require(inner_iterations >= 1, ErrorCode::InvalidArgument, "TV prox needs at least one inner iteration");
  ImagePlane best = z;
  double best_energy = gamma * total_variation(z);
  if (energy_trace) energy_trace->assign(1, best_energy);
  if (gamma == 0.0) return best;

  const int h = z.height(), w = z.width();
  DualField p{ImagePlane(h, w), ImagePlane(h, w)};
  DualField p_prev = p;
  DualField q = p;
  DualField g = p;
  ImagePlane x(h, w);
  const double step = 1.0 / (8.0 * gamma);
  double t = 1.0;

  for (int it = 0; it < inner_iterations; ++it) {
    primal_from_dual(z, q, gamma, x);
    gradient(x, g);
    for (std::size_t i = 0; i < x.size(); ++i) {
      p.horizontal.data()[i] = std::clamp(q.horizontal.data()[i] + step * g.horizontal.data()[i], -1.0, 1.0);
      p.vertical.data()[i] = std::clamp(q.vertical.data()[i] + step * g.vertical.data()[i], -1.0, 1.0);
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double momentum = (t - 1.0) / t_next;
    for (std::size_t i = 0; i < x.size(); ++i) {
      q.horizontal.data()[i] =
          p.horizontal.data()[i] + momentum * (p.horizontal.data()[i] - p_prev.horizontal.data()[i]);
      q.vertical.data()[i] = p.vertical.data()[i] + momentum * (p.vertical.data()[i] - p_prev.vertical.data()[i]);
    }
    std::swap(p_prev, p);
    t = t_next;

    primal_from_dual(z, p_prev, gamma, x);
    const double e = tv_energy(z, x, gamma);
    if (e < best_energy) {
      best_energy = e;
      best = x;
    }
    if (energy_trace) energy_trace->push_back(best_energy);
  }
  return best;
}

RgbImage prox_tv(const RgbImage& z, double gamma, int inner_iterations) {
  return per_channel(z, [&](const ImagePlane& p) { return prox_tv(p, gamma, inner_iterations); });
}

RgbImage FourierTikhonov::evaluate(const RgbImage& z, double gamma) const { return prox_tikhonov(z, gamma); }

double FourierTikhonov::prior(const RgbImage& x) const {
  return gradient_energy(x[0]) + gradient_energy(x[1]) + gradient_energy(x[2]);
}

std::string_view color_basis_name(ColorBasis b) { return b == ColorBasis::Rgb ? "rgb" : "opponent"; }

ColorBasis parse_color_basis(std::string_view name) {
  if (name == "rgb") return ColorBasis::Rgb;
  if (name == "opponent") return ColorBasis::Opponent;
  throw Error(ErrorCode::InvalidArgument, "unknown color basis '" + std::string(name) + "'");
}

RgbImage to_opponent(const RgbImage& x) {
  const double a = 1.0 / std::sqrt(3.0), b = 1.0 / std::sqrt(2.0), c = 1.0 / std::sqrt(6.0);
  RgbImage o(x.height(), x.width(), x.color_space());
  for (std::size_t i = 0; i < x[0].size(); ++i) {
    const double r = x[0].data()[i], g = x[1].data()[i], bl = x[2].data()[i];
    o[0].data()[i] = a * (r + g + bl);
    o[1].data()[i] = b * (r - bl);
    o[2].data()[i] = c * (r - 2.0 * g + bl);
  }
  return o;
}

RgbImage from_opponent(const RgbImage& o) {
  const double a = 1.0 / std::sqrt(3.0), b = 1.0 / std::sqrt(2.0), c = 1.0 / std::sqrt(6.0);
  RgbImage x(o.height(), o.width(), o.color_space());
  for (std::size_t i = 0; i < o[0].size(); ++i) {
    const double y = o[0].data()[i], c1 = o[1].data()[i], c2 = o[2].data()[i];
    x[0].data()[i] = a * y + b * c1 + c * c2;
    x[1].data()[i] = a * y - 2.0 * c * c2;
    x[2].data()[i] = a * y - b * c1 + c * c2;
  }
  return x;
}

TvProx::TvProx(int inner_iterations, ColorBasis basis) : inner_iterations_(inner_iterations), basis_(basis) {
  require(inner_iterations >= 1, ErrorCode::InvalidArgument, "TV prox needs at least one inner iteration");
}

RgbImage TvProx::evaluate(const RgbImage& z, double gamma) const {
  // gamma = 0 must return z bit-exactly, which the basis round trip would not.
  if (basis_ == ColorBasis::Rgb || gamma == 0.0) return prox_tv(z, gamma, inner_iterations_);
  return from_opponent(prox_tv(to_opponent(z), gamma, inner_iterations_));
}

double TvProx::prior(const RgbImage& x) const {
  const RgbImage o = basis_ == ColorBasis::Rgb ? x : to_opponent(x);
  return total_variation(o[0]) + total_variation(o[1]) + total_variation(o[2]);
}

std::unique_ptr<ProxOperator> make_prox(std::string_view name, int tv_iterations, ColorBasis basis) {
  if (name == "tikhonov") return std::make_unique<FourierTikhonov>();
  if (name == "tv") return std::make_unique<TvProx>(tv_iterations, basis);
  throw Error(ErrorCode::InvalidArgument, "unknown prior '" + std::string(name) + "'");
}

}  // namespace rawrestore
