#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "rawrestore/error.hpp"
#include "rawrestore/image_io.hpp"
#include "rawrestore/isp.hpp"
#include "rawrestore/metrics.hpp"

using namespace rawrestore;

namespace {

RgbImage srgb_constant(double v) { return RgbImage(2, 2, ColorSpace::Srgb, v); }

RgbImage affine_ramp(int h, int w) {
  RgbImage img(h, w, ColorSpace::LinRgb);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      img[0](r, c) = 0.1 + 0.01 * r + 0.02 * c;
      img[1](r, c) = 0.5 - 0.005 * r + 0.01 * c;
      img[2](r, c) = 0.3 + 0.015 * r - 0.004 * c;
    }
  return img;
}

const IspParams kMildIsp{{{{1.6, -0.4, -0.2}, {-0.3, 1.5, -0.2}, {0.0, -0.5, 1.5}}}, {2.0, 1.0, 1.6}};

}  // namespace

TEST(Cfa, NamedPatternsAreBijections) {
  for (CfaName n : {CfaName::RGGB, CfaName::BGGR, CfaName::GRBG, CfaName::GBRG}) {
    const CfaPattern p(n);
    std::set<std::pair<int, int>> seen;
    for (CfaSite s : kAllSites) {
      seen.insert({p.offset(s).row, p.offset(s).col});
      EXPECT_EQ(p.site_at(p.offset(s).row, p.offset(s).col), s);
    }
    EXPECT_EQ(seen.size(), 4u);
    const SiteOffset g1 = p.offset(CfaSite::G1), g2 = p.offset(CfaSite::G2);
    EXPECT_NE(g1.row, g2.row);
    EXPECT_NE(g1.col, g2.col);
    EXPECT_EQ(CfaPattern::parse(p.name_string()), p);
  }
}

TEST(Cfa, RggbConvention) {
  const CfaPattern p(CfaName::RGGB);
  EXPECT_EQ(p.offset(CfaSite::R), (SiteOffset{0, 0}));
  EXPECT_EQ(p.offset(CfaSite::G1), (SiteOffset{0, 1}));
  EXPECT_EQ(p.offset(CfaSite::G2), (SiteOffset{1, 0}));
  EXPECT_EQ(p.offset(CfaSite::B), (SiteOffset{1, 1}));
  const CfaPattern swapped = p.with_swapped_greens();
  EXPECT_EQ(swapped.offset(CfaSite::G1), (SiteOffset{1, 0}));
}

TEST(Cfa, RejectsInvalidOffsets) {
  EXPECT_THROW(CfaPattern(CfaName::RGGB, {SiteOffset{0, 0}, {0, 0}, {1, 0}, {1, 1}}), Error);
  // Greens in the same row are not diagonal-opposite.
  EXPECT_THROW(CfaPattern(CfaName::RGGB, {SiteOffset{1, 0}, {0, 0}, {0, 1}, {1, 1}}), Error);
  EXPECT_THROW(CfaPattern::parse("RGBW"), Error);
}

TEST(Srgb, CurveEndpointsAndKnownValues) {
  const RgbImage lo = srgb_to_linrgb(srgb_constant(0.0));
  const RgbImage hi = srgb_to_linrgb(srgb_constant(1.0));
  EXPECT_EQ(lo[0](0, 0), 0.0);
  EXPECT_NEAR(hi[1](0, 0), 1.0, 1e-15);
  EXPECT_EQ(hi.color_space(), ColorSpace::LinRgb);
  EXPECT_NEAR(srgb_to_linrgb(srgb_constant(0.5))[2](1, 1), std::pow((0.5 + 0.055) / 1.055, 2.4), 1e-15);
  EXPECT_NEAR(srgb_to_linrgb(srgb_constant(0.5))[2](1, 1), 0.21404, 1e-5);
  EXPECT_NEAR(srgb_to_linrgb(srgb_constant(0.04045))[0](0, 0), 0.04045 / 12.92, 1e-12);
  EXPECT_NEAR(0.04045 / 12.92, 0.003131, 1e-6);
}

TEST(Srgb, ForwardValuesAndClamp) {
  RgbImage lin(2, 2, ColorSpace::LinRgb, 0.21404);
  EXPECT_NEAR(linrgb_to_srgb(lin)[0](0, 0), 0.5, 1e-5);
  RgbImage bright(2, 2, ColorSpace::LinRgb, 2.0);
  EXPECT_EQ(linrgb_to_srgb(bright)[1](0, 0), 1.0);
  EXPECT_EQ(linrgb_to_srgb(bright).color_space(), ColorSpace::Srgb);
}

TEST(Srgb, WrongTagIsRejected) {
  try {
    srgb_to_linrgb(RgbImage(2, 2, ColorSpace::LinRgb));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ColorSpace);
  }
  EXPECT_THROW(linrgb_to_srgb(RgbImage(2, 2, ColorSpace::Srgb)), Error);
}

TEST(Srgb, RoundTripOnRandomInputs) {
  for (const IspParams& isp : {IspParams{}, kMildIsp}) {
    RgbImage x = oracle::random_rgb(32, 32, 21);
    x.set_color_space(ColorSpace::Srgb);
    EXPECT_LE(max_abs_difference(linrgb_to_srgb(srgb_to_linrgb(x, isp), isp), x), 1e-4);
  }
}

TEST(Srgb, RoundTripOnGrid) {
  // 65 levels per axis, step 1/64.
  RgbImage x(65, 65 * 65, ColorSpace::Srgb);
  for (int r = 0; r < 65; ++r)
    for (int g = 0; g < 65; ++g)
      for (int b = 0; b < 65; ++b) {
        x[0](r, g * 65 + b) = r / 64.0;
        x[1](r, g * 65 + b) = g / 64.0;
        x[2](r, g * 65 + b) = b / 64.0;
      }
  EXPECT_LE(max_abs_difference(linrgb_to_srgb(srgb_to_linrgb(x)), x), 1e-4);
  EXPECT_LE(max_abs_difference(linrgb_to_srgb(srgb_to_linrgb(x, kMildIsp), kMildIsp), x), 1e-4);
}

TEST(IspParams, Validation) {
  IspParams singular;
  singular.ccm = {{{1, 2, 3}, {2, 4, 6}, {0, 0, 1}}};
  EXPECT_THROW(singular.validate(), Error);
  IspParams bad_gain;
  bad_gain.wb_gains = {1.0, 0.0, 1.0};
  EXPECT_THROW(bad_gain.validate(), Error);
  EXPECT_NO_THROW(kMildIsp.validate());
}

TEST(Mosaic, ConstantImage) {
  const RawImage raw = mosaic(RgbImage(4, 6, ColorSpace::LinRgb, 0.37), CfaPattern());
  for (double v : raw.plane().data()) EXPECT_EQ(v, 0.37);
  EXPECT_EQ(raw.noise(), NoiseParams{});
}

TEST(Mosaic, RggbTile) {
  RgbImage img(2, 2, ColorSpace::LinRgb);
  for (double& v : img[0].data()) v = 0.9;
  for (double& v : img[1].data()) v = 0.5;
  for (double& v : img[2].data()) v = 0.1;
  const RawImage raw = mosaic(img, CfaPattern(CfaName::RGGB));
  EXPECT_EQ(raw.plane()(0, 0), 0.9);
  EXPECT_EQ(raw.plane()(0, 1), 0.5);
  EXPECT_EQ(raw.plane()(1, 0), 0.5);
  EXPECT_EQ(raw.plane()(1, 1), 0.1);
}

TEST(Mosaic, OddDimensionsAndWrongTag) {
  EXPECT_THROW(mosaic(RgbImage(3, 4, ColorSpace::LinRgb), CfaPattern()), Error);
  EXPECT_THROW(mosaic(RgbImage(4, 4, ColorSpace::Srgb), CfaPattern()), Error);
  EXPECT_THROW(RawImage(ImagePlane(4, 5), CfaPattern()), Error);
}

TEST(Noise, ZeroParametersLeaveInputUnchanged) {
  const RawImage raw(oracle::random_plane(8, 8, 31), CfaPattern());
  EXPECT_EQ(apply_noise(raw, {0.0, 0.0}, 5).plane(), raw.plane());
}

TEST(Noise, SameSeedIsBitIdentical) {
  const RawImage raw(oracle::random_plane(16, 16, 32), CfaPattern());
  EXPECT_EQ(apply_noise(raw, {1e-3, 1e-5}, 9).plane(), apply_noise(raw, {1e-3, 1e-5}, 9).plane());
  EXPECT_NE(apply_noise(raw, {1e-3, 1e-5}, 9).plane(), apply_noise(raw, {1e-3, 1e-5}, 10).plane());
}

TEST(Noise, FlatPlaneVarianceAndMean) {
  const RawImage raw(ImagePlane(1024, 1024, 0.5), CfaPattern());
  const NoiseParams params{1e-3, 1e-6};
  const RawImage noisy = apply_noise(raw, params, 2024);
  EXPECT_EQ(noisy.noise(), params);
  double sum = 0.0, sq = 0.0;
  const double n = static_cast<double>(noisy.plane().size());
  for (double v : noisy.plane().data()) {
    sum += v - 0.5;
    sq += (v - 0.5) * (v - 0.5);
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  const double expected = 1e-3 * 0.5 + 1e-6;
  EXPECT_NEAR(expected, 5.01e-4, 1e-12);
  EXPECT_LE(std::abs(var - expected) / expected, 0.02);
  EXPECT_LE(std::abs(mean), 3.0 * std::sqrt(expected / n));
}

TEST(Noise, NotClampedAndNegativeValuesUseReadTerm) {
  const RawImage raw(ImagePlane(64, 64, 0.0), CfaPattern());
  const RawImage noisy = apply_noise(raw, {1e-2, 1e-4}, 3);
  EXPECT_LT(*std::min_element(noisy.plane().data().begin(), noisy.plane().data().end()), 0.0);
  EXPECT_THROW(apply_noise(raw, {-1e-3, 0.0}, 1), Error);
}

TEST(NoiseSampling, RangeDeterminismAndEndpoint) {
  double lo = 1.0, hi = 0.0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const NoiseParams p = sample_noise_params(seed);
    ASSERT_GE(p.shot, 1e-4);
    ASSERT_LE(p.shot, 3e-3);
    ASSERT_NEAR(std::log(p.read), 2.18 * std::log(p.shot) + 1.20, 1e-9);
    lo = std::min(lo, p.shot);
    hi = std::max(hi, p.shot);
  }
  EXPECT_EQ(sample_noise_params(77), sample_noise_params(77));
  // With 10^4 log-uniform draws the minimum sits within ~0.05% of the
  // endpoint in expectation.
  EXPECT_LT(lo, 1.01e-4);
  EXPECT_GT(hi, 2.97e-3);
}

TEST(NoiseSampling, ConfigurableRelation) {
  NoiseSampling s;
  s.log_slope = 1.0;
  s.log_intercept = 0.0;
  EXPECT_NEAR(read_noise_for(2e-3, s), 2e-3, 1e-15);
}

class Demosaic : public ::testing::TestWithParam<DemosaicMethod> {};

TEST_P(Demosaic, ConstantRawGivesConstantRgb) {
  for (CfaName n : {CfaName::RGGB, CfaName::GBRG}) {
    const RgbImage out = demosaic(RawImage(ImagePlane(8, 10, 0.42), CfaPattern(n)), GetParam());
    for (int c = 0; c < 3; ++c)
      for (double v : out[c].data()) EXPECT_NEAR(v, 0.42, 1e-15);
  }
}

TEST_P(Demosaic, ReproducesAffineRampInInterior) {
  const RgbImage ramp = affine_ramp(20, 24);
  for (CfaName n : {CfaName::RGGB, CfaName::BGGR, CfaName::GRBG, CfaName::GBRG}) {
    const RgbImage out = demosaic(mosaic(ramp, CfaPattern(n)), GetParam());
    for (int c = 0; c < 3; ++c)
      for (int r = 2; r < 18; ++r)
        for (int col = 2; col < 22; ++col) EXPECT_NEAR(out[c](r, col), ramp[c](r, col), 1e-12);
  }
}

TEST_P(Demosaic, KeepsObservedSamples) {
  const RawImage raw(oracle::random_plane(12, 14, 41), CfaPattern(CfaName::GRBG));
  const RgbImage out = demosaic(raw, GetParam());
  EXPECT_EQ(mosaic(out, raw.cfa()).plane(), raw.plane());
}

TEST_P(Demosaic, WorksOnSmallestImage) {
  const RgbImage out = demosaic(RawImage(ImagePlane(2, 2, 0.25), CfaPattern()), GetParam());
  EXPECT_NEAR(out[1](0, 0), 0.25, 1e-15);
}

INSTANTIATE_TEST_SUITE_P(Methods, Demosaic, ::testing::Values(DemosaicMethod::Bilinear, DemosaicMethod::Classical));

TEST(DemosaicBilinear, HotPixelStencilSupport) {
  ImagePlane p(8, 8);
  p(4, 4) = 1.0;  // R site under RGGB
  const RgbImage out = demosaic_bilinear(RawImage(p, CfaPattern(CfaName::RGGB)));
  EXPECT_EQ(out[0](4, 4), 1.0);
  EXPECT_EQ(out[1](4, 4), 0.0);
  EXPECT_EQ(out[2](4, 4), 0.0);
}

TEST(DemosaicClassical, BeatsBilinearOnFixtures) {
  double bilinear = 0.0, classical = 0.0;
  for (const char* name : {"astronaut", "coffee", "chelsea", "rocket"}) {
    const RgbImage lin = srgb_to_linrgb(load_rgb(std::string(RAWRESTORE_FIXTURES) + "/" + name + ".png"));
    const RawImage raw = mosaic(lin, CfaPattern());
    bilinear += psnr(demosaic_bilinear(raw), lin, 2) / 4.0;
    classical += psnr(demosaic_classical(raw), lin, 2) / 4.0;
  }
  EXPECT_GT(classical, bilinear);
}

TEST(DemosaicMethodNames, Parse) {
  EXPECT_EQ(parse_demosaic_method("bilinear"), DemosaicMethod::Bilinear);
  EXPECT_EQ(parse_demosaic_method("classical"), DemosaicMethod::Classical);
  EXPECT_THROW(parse_demosaic_method("vng"), Error);
}
