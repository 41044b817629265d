#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "rawrestore/error.hpp"
#include "rawrestore/image_io.hpp"
#include "rawrestore/metrics.hpp"

using namespace rawrestore;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("rawrestore_test_image_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

RgbImage constant(int h, int w, double v, ColorSpace cs = ColorSpace::LinRgb) { return RgbImage(h, w, cs, v); }

}  // namespace

TEST(ImagePlane, RejectsEmptyAndMismatchedData) {
  EXPECT_THROW(ImagePlane(0, 3), Error);
  EXPECT_THROW(ImagePlane(3, 0), Error);
  EXPECT_THROW(ImagePlane(2, 2, std::vector<double>(3)), Error);
  ImagePlane p(2, 3);
  EXPECT_EQ(p.size(), 6u);
}

TEST(RgbImage, PlanesMustShareShape) {
  EXPECT_THROW(RgbImage({ImagePlane(2, 2), ImagePlane(2, 2), ImagePlane(2, 3)}, ColorSpace::LinRgb), Error);
}

TEST(ImageIo, Png8FullScaleAndZero) {
  const auto dir = temp_dir("png8");
  ImagePlane p(1, 2);
  p(0, 0) = 1.0;
  p(0, 1) = 0.0;
  save_image(p, dir / "a.png");
  const ImagePlane q = load_plane(dir / "a.png");
  EXPECT_EQ(q(0, 0), 1.0);
  EXPECT_EQ(q(0, 1), 0.0);
}

TEST(ImageIo, Png16Normalization) {
  const auto dir = temp_dir("png16");
  ImagePlane p(1, 1, 32768.0 / 65535.0);
  save_image(p, dir / "a.png", FileFormat::Png16);
  EXPECT_DOUBLE_EQ(load_plane(dir / "a.png")(0, 0), 32768.0 / 65535.0);
  EXPECT_NEAR(32768.0 / 65535.0, 0.50001, 1e-5);
}

TEST(ImageIo, PngQuantizesRoundToNearestAndClamps) {
  EXPECT_EQ(quantize(0.5, 255), 128);
  EXPECT_EQ(quantize(1.7, 255), 255);
  EXPECT_EQ(quantize(-0.2, 255), 0);
  const auto dir = temp_dir("quant");
  RgbImage img(1, 2, ColorSpace::Srgb);
  for (int c = 0; c < 3; ++c) {
    img[c](0, 0) = 0.5;
    img[c](0, 1) = 1.7;
  }
  save_image(img, dir / "a.png");
  const RgbImage back = load_rgb(dir / "a.png");
  EXPECT_DOUBLE_EQ(back[0](0, 0), 128.0 / 255.0);
  EXPECT_NEAR(back[0](0, 0), 0.50196, 1e-5);
  EXPECT_EQ(back[1](0, 1), 1.0);
  EXPECT_EQ(back.color_space(), ColorSpace::Srgb);
}

TEST(ImageIo, PngRoundTripWithinQuantizationStep) {
  const auto dir = temp_dir("pngrt");
  RgbImage img = oracle::random_rgb(9, 7, 4);
  img.set_color_space(ColorSpace::Srgb);
  save_image(img, dir / "a.png", FileFormat::Png16);
  EXPECT_LE(max_abs_difference(load_rgb(dir / "a.png"), img), 0.5 / 65535.0 + 1e-12);
  save_image(img, dir / "b.png", FileFormat::Png8);
  EXPECT_LE(max_abs_difference(load_rgb(dir / "b.png"), img), 0.5 / 255.0 + 1e-12);
}

TEST(ImageIo, PfmRoundTripIsBitIdentical) {
  const auto dir = temp_dir("pfm");
  std::mt19937_64 rng(11);
  std::normal_distribution<float> n(0.0f, 3.0f);
  RgbImage img(5, 6, ColorSpace::LinRgb);
  ImagePlane plane(4, 3);
  for (int c = 0; c < 3; ++c)
    for (double& v : img[c].data()) v = n(rng);
  for (double& v : plane.data()) v = n(rng);
  save_image(img, dir / "a.pfm");
  save_image(plane, dir / "b.pfm");
  EXPECT_EQ(load_rgb(dir / "a.pfm"), img);
  EXPECT_EQ(load_plane(dir / "b.pfm"), plane);
  EXPECT_EQ(load_rgb(dir / "a.pfm").color_space(), ColorSpace::LinRgb);
  EXPECT_EQ(load_rgb(dir / "a.pfm", ColorSpace::Srgb).color_space(), ColorSpace::Srgb);
}

TEST(ImageIo, Errors) {
  const auto dir = temp_dir("err");
  try {
    load_image(dir / "missing.png");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
  {
    std::ofstream(dir / "bad.pfm") << "P6\n1 1\n255\n";
  }
  EXPECT_THROW(load_image(dir / "bad.pfm"), Error);
  EXPECT_THROW(load_plane(dir / "missing.pfm"), Error);
  RgbImage img(2, 2, ColorSpace::LinRgb);
  save_image(img, dir / "rgb.pfm");
  EXPECT_THROW(load_plane(dir / "rgb.pfm"), Error);
}

TEST(Psnr, IdenticalImagesHitTheCap) {
  const RgbImage a = oracle::random_rgb(16, 16, 1);
  EXPECT_EQ(psnr(a, a, 0), kPsnrCapDb);
  EXPECT_EQ(kPsnrCapDb, 99.0);
}

TEST(Psnr, ConstantOffsetGivesTwentyDb) {
  EXPECT_NEAR(psnr(constant(8, 8, 0.3), constant(8, 8, 0.4), 0), 20.0, 1e-9);
}

TEST(Psnr, MatchesBruteForceMseOverCroppedRegion) {
  const RgbImage a = oracle::random_rgb(128, 140, 2);
  const RgbImage b = oracle::random_rgb(128, 140, 3);
  const double mse = oracle::cropped_mse(a, b, 50);
  EXPECT_NEAR(psnr(a, b, 50), 10.0 * std::log10(1.0 / mse), 1e-9);
}

TEST(Psnr, IsSymmetric) {
  const RgbImage a = oracle::random_rgb(20, 20, 4);
  const RgbImage b = oracle::random_rgb(20, 20, 5);
  EXPECT_EQ(psnr(a, b, 3), psnr(b, a, 3));
}

TEST(Psnr, DecreasesWithGrowingNoise) {
  const RgbImage a = oracle::random_rgb(64, 64, 6);
  double previous = kPsnrCapDb + 1.0;
  for (double sigma : {0.01, 0.03, 0.1, 0.3}) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 1.0);
    RgbImage b = a;
    for (int c = 0; c < 3; ++c)
      for (double& v : b[c].data()) v += sigma * n(rng);
    const double p = psnr(a, b, 0);
    EXPECT_LT(p, previous);
    previous = p;
  }
}

TEST(Psnr, Preconditions) {
  const RgbImage a = constant(10, 10, 0.1);
  EXPECT_THROW(psnr(a, constant(10, 12, 0.1), 0), Error);
  EXPECT_THROW(psnr(a, constant(10, 10, 0.1, ColorSpace::Srgb), 0), Error);
  EXPECT_THROW(psnr(a, a, 5), Error);
  EXPECT_THROW(ssim(a, constant(12, 10, 0.1), 0), Error);
}

TEST(Ssim, SelfSimilarityIsOne) {
  const RgbImage a = oracle::random_rgb(32, 32, 8);
  EXPECT_NEAR(ssim(a, a, 0), 1.0, 1e-12);
  EXPECT_NEAR(ssim(constant(16, 16, 0.5), constant(16, 16, 0.5), 0), 1.0, 1e-12);
}

TEST(Ssim, ConstantImagesReduceToLuminanceTerm) {
  const double expected = (2 * 0.2 * 0.8 + 1e-4) / (0.04 + 0.64 + 1e-4);
  EXPECT_NEAR(expected, 0.4707, 1e-4);
  EXPECT_NEAR(ssim(constant(16, 16, 0.2), constant(16, 16, 0.8), 0), expected, 1e-12);
}

TEST(Ssim, StaysInRange) {
  const RgbImage a = oracle::random_rgb(32, 32, 9);
  RgbImage b = a;
  for (int c = 0; c < 3; ++c)
    for (double& v : b[c].data()) v = 1.0 - v;
  const double s = ssim(a, b, 2);
  EXPECT_GE(s, -1.0);
  EXPECT_LE(s, 1.0);
  EXPECT_LT(s, 0.0);
}

TEST(Metrics, EvaluateRecordsCrop) {
  const RgbImage a = oracle::random_rgb(120, 120, 10);
  const RgbImage b = oracle::random_rgb(120, 120, 11);
  const MetricReport m = evaluate(a, b, 50);
  EXPECT_EQ(m.border_crop, 50);
  EXPECT_EQ(m.psnr, psnr(a, b, 50));
  EXPECT_EQ(m.ssim, ssim(a, b, 50));
}
