#include <array>
#include <string>

#include "rawrestore/error.hpp"
#include "rawrestore/isp.hpp"

namespace rawrestore {
namespace {

using Stencil = std::array<std::array<double, 5>, 5>;

// Which interpolation case a missing sample falls into.
enum class Case { GreenAtRedBlue, RowNeighbours, ColumnNeighbours, Diagonal };

struct StencilSet {
  Stencil green_at_rb;
  Stencil row;
  Stencil column;
  Stencil diagonal;

  const Stencil& get(Case c) const {
    switch (c) {
      case Case::GreenAtRedBlue: return green_at_rb;
      case Case::RowNeighbours: return row;
      case Case::ColumnNeighbours: return column;
      case Case::Diagonal: return diagonal;
    }
    return green_at_rb;
  }
};

constexpr StencilSet kBilinear{
    {{{0, 0, 0, 0, 0}, {0, 0, .25, 0, 0}, {0, .25, 0, .25, 0}, {0, 0, .25, 0, 0}, {0, 0, 0, 0, 0}}},
    {{{0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}, {0, .5, 0, .5, 0}, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}}},
    {{{0, 0, 0, 0, 0}, {0, 0, .5, 0, 0}, {0, 0, 0, 0, 0}, {0, 0, .5, 0, 0}, {0, 0, 0, 0, 0}}},
    {{{0, 0, 0, 0, 0}, {0, .25, 0, .25, 0}, {0, 0, 0, 0, 0}, {0, .25, 0, .25, 0}, {0, 0, 0, 0, 0}}},
};

// Malvar, He and Cutler stencils, scaled by 8.
constexpr StencilSet kGradientCorrected{
    {{{0, 0, -1, 0, 0}, {0, 0, 2, 0, 0}, {-1, 2, 4, 2, -1}, {0, 0, 2, 0, 0}, {0, 0, -1, 0, 0}}},
    {{{0, 0, .5, 0, 0}, {0, -1, 0, -1, 0}, {-1, 4, 5, 4, -1}, {0, -1, 0, -1, 0}, {0, 0, .5, 0, 0}}},
    {{{0, 0, -1, 0, 0}, {0, -1, 4, -1, 0}, {.5, 0, 5, 0, .5}, {0, -1, 4, -1, 0}, {0, 0, -1, 0, 0}}},
    {{{0, 0, -1.5, 0, 0}, {0, 2, 0, 2, 0}, {-1.5, 0, 6, 0, -1.5}, {0, 2, 0, 2, 0}, {0, 0, -1.5, 0, 0}}},
};

// Mirror without repeating the edge sample; keeps the CFA phase because the
// dimensions are even.
inline int mirror(int i, int n) {
  const int period = 2 * n - 2;
  i %= period;
  if (i < 0) i += period;
  return i >= n ? period - i : i;
}

Case classify(const CfaPattern& cfa, int row, int col, int channel) {
  if (channel == 1) return Case::GreenAtRedBlue;
  const CfaSite here = cfa.site_at(row, col);
  if (channel_of(here) == 1) {
    return cfa.channel_at(row, col + 1) == channel ? Case::RowNeighbours : Case::ColumnNeighbours;
  }
  return Case::Diagonal;
}

RgbImage interpolate(const RawImage& raw, const StencilSet& stencils, double scale) {
  const ImagePlane& y = raw.plane();
  const CfaPattern& cfa = raw.cfa();
  const int h = y.height();
  const int w = y.width();
  RgbImage out(h, w, ColorSpace::LinRgb);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int sampled = cfa.channel_at(r, c);
      for (int ch = 0; ch < 3; ++ch) {
        if (ch == sampled) {
          out[ch](r, c) = y(r, c);
          continue;
        }
        const Stencil& s = stencils.get(classify(cfa, r, c, ch));
        double acc = 0.0;
        for (int dy = -2; dy <= 2; ++dy) {
          const int rr = mirror(r + dy, h);
          for (int dx = -2; dx <= 2; ++dx) {
            const double wgt = s[static_cast<std::size_t>(dy + 2)][static_cast<std::size_t>(dx + 2)];
            if (wgt != 0.0) acc += wgt * y(rr, mirror(c + dx, w));
          }
        }
        out[ch](r, c) = acc * scale;
      }
    }
  }
  return out;
}

}  // namespace

DemosaicMethod parse_demosaic_method(std::string_view name) {
  if (name == "bilinear") return DemosaicMethod::Bilinear;
  if (name == "classical") return DemosaicMethod::Classical;
  throw Error(ErrorCode::InvalidArgument, "unknown demosaicker '" + std::string(name) + "'");
}

RgbImage demosaic_bilinear(const RawImage& raw) { return interpolate(raw, kBilinear, 1.0); }

RgbImage demosaic_classical(const RawImage& raw) { return interpolate(raw, kGradientCorrected, 0.125); }

RgbImage demosaic(const RawImage& raw, DemosaicMethod method) {
  return method == DemosaicMethod::Bilinear ? demosaic_bilinear(raw) : demosaic_classical(raw);
}

}  // namespace rawrestore
