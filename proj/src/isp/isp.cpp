#include <algorithm>
#include <cmath>

#include "rawrestore/error.hpp"
#include "rawrestore/isp.hpp"

namespace rawrestore {
namespace {

double determinant(const Matrix3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Matrix3 inverse(const Matrix3& m) {
  const double det = determinant(m);
  Matrix3 inv{};
  inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return inv;
}

bool is_identity(const Matrix3& m) { return m == kIdentity3; }

void apply_matrix(RgbImage& img, const Matrix3& m) {
  if (is_identity(m)) return;
  auto r = img[0].data();
  auto g = img[1].data();
  auto b = img[2].data();
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double v0 = r[i], v1 = g[i], v2 = b[i];
    r[i] = m[0][0] * v0 + m[0][1] * v1 + m[0][2] * v2;
    g[i] = m[1][0] * v0 + m[1][1] * v1 + m[1][2] * v2;
    b[i] = m[2][0] * v0 + m[2][1] * v1 + m[2][2] * v2;
  }
}

}  // namespace

void IspParams::validate() const {
  require(std::abs(determinant(ccm)) > 1e-8, ErrorCode::InvalidArgument, "color-correction matrix is singular");
  for (double g : wb_gains)
    require(g > 0.0, ErrorCode::InvalidArgument, "white-balance gains must be positive");
}

double srgb_decode(double v) {
  if (v <= 0.04045) return v / 12.92;
  return std::pow((v + 0.055) / 1.055, 2.4);
}

double srgb_encode(double v) {
  if (v <= 0.0031308) return 12.92 * v;
  return 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

RgbImage srgb_to_linrgb(const RgbImage& img, const IspParams& params) {
  require(img.color_space() == ColorSpace::Srgb, ErrorCode::ColorSpace, "srgb_to_linrgb expects an sRGB image");
  params.validate();
  RgbImage out = img;
  for (int ch = 0; ch < 3; ++ch)
    for (double& v : out[ch].data()) v = srgb_decode(v);
  apply_matrix(out, inverse(params.ccm));
  for (int ch = 0; ch < 3; ++ch) {
    const double gain = params.wb_gains[static_cast<std::size_t>(ch)];
    if (gain != 1.0)
      for (double& v : out[ch].data()) v /= gain;
  }
  out.set_color_space(ColorSpace::LinRgb);
  return out;
}

RgbImage linrgb_to_srgb(const RgbImage& img, const IspParams& params) {
  require(img.color_space() == ColorSpace::LinRgb, ErrorCode::ColorSpace, "linrgb_to_srgb expects a linRGB image");
  params.validate();
  RgbImage out = img;
  for (int ch = 0; ch < 3; ++ch) {
    const double gain = params.wb_gains[static_cast<std::size_t>(ch)];
    if (gain != 1.0)
      for (double& v : out[ch].data()) v *= gain;
  }
  apply_matrix(out, params.ccm);
  for (int ch = 0; ch < 3; ++ch)
    for (double& v : out[ch].data()) v = std::clamp(srgb_encode(v), 0.0, 1.0);
  out.set_color_space(ColorSpace::Srgb);
  return out;
}

}  // namespace rawrestore
