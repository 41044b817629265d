#include <set>
#include <string>

#include "rawrestore/error.hpp"
#include "rawrestore/isp.hpp"

namespace rawrestore {
namespace {

std::array<SiteOffset, 4> default_offsets(CfaName name) {
  // Indexed R, G1, G2, B.
  switch (name) {
    case CfaName::RGGB: return {{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};
    case CfaName::BGGR: return {{{1, 1}, {0, 1}, {1, 0}, {0, 0}}};
    case CfaName::GRBG: return {{{0, 1}, {0, 0}, {1, 1}, {1, 0}}};
    case CfaName::GBRG: return {{{1, 0}, {0, 0}, {1, 1}, {0, 1}}};
  }
  return {};
}

}  // namespace

CfaPattern::CfaPattern(CfaName name) : name_(name), offsets_(default_offsets(name)) { build_tile(); }

CfaPattern::CfaPattern(CfaName name, std::array<SiteOffset, 4> offsets) : name_(name), offsets_(offsets) {
  std::set<int> cells;
  for (const auto& o : offsets_) {
    require(o.row >= 0 && o.row <= 1 && o.col >= 0 && o.col <= 1, ErrorCode::InvalidArgument,
            "CFA offsets must lie inside the 2x2 tile");
    cells.insert(o.row * 2 + o.col);
  }
  require(cells.size() == 4, ErrorCode::InvalidArgument, "CFA offsets must be a permutation of the tile");
  const auto g1 = offset(CfaSite::G1);
  const auto g2 = offset(CfaSite::G2);
  require(g1.row != g2.row && g1.col != g2.col, ErrorCode::InvalidArgument,
          "green sites must be diagonally opposite");
  build_tile();
}

void CfaPattern::build_tile() {
  for (CfaSite site : kAllSites) {
    const auto o = offset(site);
    tile_[static_cast<std::size_t>(o.row * 2 + o.col)] = site;
  }
}

CfaPattern CfaPattern::parse(std::string_view name) {
  if (name == "RGGB") return CfaPattern(CfaName::RGGB);
  if (name == "BGGR") return CfaPattern(CfaName::BGGR);
  if (name == "GRBG") return CfaPattern(CfaName::GRBG);
  if (name == "GBRG") return CfaPattern(CfaName::GBRG);
  throw Error(ErrorCode::InvalidArgument, "unknown CFA pattern '" + std::string(name) + "'");
}

std::string_view CfaPattern::name_string() const noexcept {
  switch (name_) {
    case CfaName::RGGB: return "RGGB";
    case CfaName::BGGR: return "BGGR";
    case CfaName::GRBG: return "GRBG";
    case CfaName::GBRG: return "GBRG";
  }
  return "RGGB";
}

CfaPattern CfaPattern::with_swapped_greens() const {
  auto swapped = offsets_;
  std::swap(swapped[static_cast<std::size_t>(CfaSite::G1)], swapped[static_cast<std::size_t>(CfaSite::G2)]);
  return CfaPattern(name_, swapped);
}

RawImage::RawImage(ImagePlane plane, CfaPattern cfa, NoiseParams noise)
    : plane_(std::move(plane)), cfa_(cfa), noise_(noise) {
  require(plane_.height() % 2 == 0 && plane_.width() % 2 == 0, ErrorCode::DimensionMismatch,
          "raw image dimensions must be even");
  noise_.validate();
}

void RawImage::set_noise(NoiseParams noise) {
  noise.validate();
  noise_ = noise;
}

RawImage mosaic(const RgbImage& img, const CfaPattern& cfa) {
  require(img.height() % 2 == 0 && img.width() % 2 == 0, ErrorCode::DimensionMismatch,
          "mosaicking requires even image dimensions");
  require(img.color_space() == ColorSpace::LinRgb, ErrorCode::ColorSpace, "mosaic expects a linRGB image");
  ImagePlane plane(img.height(), img.width());
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c) plane(r, c) = img[cfa.channel_at(r, c)](r, c);
  return RawImage(std::move(plane), cfa);
}

}  // namespace rawrestore
