#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>

#include "oracles.hpp"
#include "rawrestore/convolution.hpp"
#include "rawrestore/error.hpp"
#include "rawrestore/image_io.hpp"
#include "rawrestore/isp.hpp"
#include "rawrestore/psf_grid.hpp"
#include "rawrestore/zstep.hpp"

using namespace rawrestore;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("rawrestore_test_blur_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

void expect_valid(const Kernel2D& k) {
  EXPECT_EQ(k.height() % 2, 1);
  EXPECT_EQ(k.width() % 2, 1);
  EXPECT_NEAR(k.sum(), 1.0, 1e-6);
  for (double t : k.taps()) EXPECT_GE(t, 0.0);
}

double max_relative(const ImagePlane& a, const ImagePlane& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a.data()[i] - b.data()[i]));
    den = std::max(den, std::abs(b.data()[i]));
  }
  return num / den;
}

int support(const Kernel2D& k) {
  int n = 0;
  for (double t : k.taps()) n += t > 1e-12;
  return n;
}

}  // namespace

TEST(Kernel2D, Invariants) {
  EXPECT_THROW(Kernel2D(2, 3, std::vector<double>(6, 1.0 / 6)), Error);
  EXPECT_THROW(Kernel2D(1, 3, {0.5, 0.6, -0.1}), Error);
  EXPECT_THROW(Kernel2D(1, 3, {0.3, 0.3, 0.3}), Error);
  EXPECT_NO_THROW(Kernel2D(1, 3, {0.25, 0.5, 0.25}));
  expect_valid(Kernel2D::delta(5));
  EXPECT_EQ(Kernel2D::delta(5)(2, 2), 1.0);
  EXPECT_THROW(RgbKernel({Kernel2D::delta(3), Kernel2D::delta(3), Kernel2D::delta(5)}), Error);
}

TEST(GaussianKernel, IsotropicIsRotationInvariant) {
  const Kernel2D k = gen_gaussian_kernel(15, 2.0, 2.0, 0.3);
  for (int r = 0; r < 15; ++r)
    for (int c = 0; c < 15; ++c) EXPECT_NEAR(k(r, c), k(c, 14 - r), 1e-10);
}

TEST(GaussianKernel, NormalizedForRandomParameters) {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) expect_valid(random_gaussian_kernel(25, rng));
}

TEST(GaussianKernel, SecondMomentsMatchRotatedCovariance) {
  for (double angle : {0.0, 0.4, 1.1, 2.5}) {
    const double sa = 3.0, sb = 1.5;
    const Kernel2D k = gen_gaussian_kernel(31, sa, sb, angle);
    double xx = 0, yy = 0, xy = 0;
    for (int r = 0; r < 31; ++r)
      for (int c = 0; c < 31; ++c) {
        const double dx = c - 15, dy = r - 15;
        xx += k(r, c) * dx * dx;
        yy += k(r, c) * dy * dy;
        xy += k(r, c) * dx * dy;
      }
    const double co = std::cos(angle), si = std::sin(angle);
    const double exx = sa * sa * co * co + sb * sb * si * si;
    const double eyy = sa * sa * si * si + sb * sb * co * co;
    const double exy = (sa * sa - sb * sb) * si * co;
    const double scale = sa * sa;
    EXPECT_NEAR(xx, exx, 0.05 * scale);
    EXPECT_NEAR(yy, eyy, 0.05 * scale);
    EXPECT_NEAR(xy, exy, 0.05 * scale);
  }
}

TEST(GaussianKernel, DegenerateSigmas) {
  EXPECT_THROW(gen_gaussian_kernel(9, 1.0, 0.0, 0.0), Error);
  EXPECT_THROW(gen_gaussian_kernel(9, 1.0, 2.0, 0.0), Error);
  EXPECT_THROW(gen_gaussian_kernel(8, 2.0, 1.0, 0.0), Error);
}

TEST(MotionKernel, ZeroLengthLimitIsDelta) {
  Rng rng(1);
  const Kernel2D k = gen_motion_kernel(9, 1e-9, rng);
  EXPECT_GE(k(4, 4), 1.0 - 1e-8);
}

TEST(MotionKernel, Deterministic) {
  Rng a(42), b(42);
  EXPECT_EQ(gen_motion_kernel(25, 12.0, a), gen_motion_kernel(25, 12.0, b));
}

TEST(MotionKernel, SupportGrowsWithLength) {
  double previous = 0.0;
  for (double length : {3.0, 8.0, 16.0}) {
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed);
      const Kernel2D k = gen_motion_kernel(25, length, rng);
      expect_valid(k);
      mean += support(k) / 100.0;
    }
    EXPECT_GT(mean, previous);
    previous = mean;
  }
}

TEST(RandomKernel, GeneratedKernelsAreValid) {
  Rng rng(8);
  for (int i = 0; i < 40; ++i) expect_valid(random_kernel(25, rng));
}

TEST(RgbKernel, SizeAndNormalization) {
  Rng rng(3);
  const Kernel2D gray = random_kernel(25, rng);
  const RgbKernelDraw d = make_rgb_kernel(gray, rng);
  EXPECT_EQ(d.kernel.height(), 25);
  EXPECT_EQ(d.kernel.width(), 25);
  for (int c = 0; c < 3; ++c) expect_valid(d.kernel[c]);
  for (std::size_t i = 0; i < gray.taps().size(); ++i) EXPECT_NEAR(d.kernel[2].taps()[i], gray.taps()[i], 1e-15);
  for (int i = 0; i < 2; ++i) {
    EXPECT_LE(std::abs(d.angles_deg[static_cast<std::size_t>(i)]), 5.0);
    EXPECT_GE(d.scales[static_cast<std::size_t>(i)], 0.8);
    EXPECT_LE(d.scales[static_cast<std::size_t>(i)], 1.0);
  }
}

TEST(RgbKernel, RotatedIsotropicGaussianStaysEqual) {
  const Kernel2D gray = gen_gaussian_kernel(25, 3.0, 3.0, 0.0);
  Rng rng(4);
  WarpRanges rotation_only;
  rotation_only.min_scale = rotation_only.max_scale = 1.0;
  const RgbKernel k = make_rgb_kernel(gray, rng, rotation_only).kernel;
  for (int c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < gray.taps().size(); ++i) EXPECT_NEAR(k[c].taps()[i], gray.taps()[i], 1e-3);
}

TEST(RgbKernel, CollapsedRangesGiveIdenticalChannels) {
  Rng rng(6);
  const Kernel2D gray = random_kernel(25, rng);
  WarpRanges none{0.0, 1.0, 1.0, true};
  const RgbKernel k = make_rgb_kernel(gray, rng, none).kernel;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < gray.taps().size(); ++i) EXPECT_NEAR(k[c].taps()[i], gray.taps()[i], 1e-15);
}

TEST(RgbKernel, SharedWarpOption) {
  Rng rng(7);
  WarpRanges shared;
  shared.independent = false;
  const RgbKernelDraw d = make_rgb_kernel(random_kernel(25, rng), rng, shared);
  EXPECT_EQ(d.angles_deg[0], d.angles_deg[1]);
  EXPECT_EQ(d.kernel[0], d.kernel[1]);
}

TEST(ConvolveCircular, DeltaAndConstant) {
  const ImagePlane p = oracle::random_plane(12, 10, 1);
  EXPECT_LE(max_abs_difference(convolve_circular(p, Kernel2D::delta(5)), p), 1e-14);
  const ImagePlane c = convolve_circular(ImagePlane(12, 10, 0.7), oracle::random_kernel(5, 2));
  for (double v : c.data()) EXPECT_NEAR(v, 0.7, 1e-14);
}

TEST(ConvolveCircular, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ImagePlane p = oracle::random_plane(16, 16, seed);
    const Kernel2D k = oracle::random_kernel(5, seed + 100);
    EXPECT_LE(max_relative(convolve_circular(p, k), oracle::circular_convolution(p, k)), 1e-10);
    EXPECT_LE(max_relative(convolve_direct(p, k, Boundary::Periodic), oracle::circular_convolution(p, k)), 1e-12);
  }
  // Non-square kernel on a non-square image.
  const ImagePlane taps = oracle::random_plane(3, 7, 9);
  const Kernel2D k = Kernel2D::normalized(3, 7, std::vector<double>(taps.data().begin(), taps.data().end()));
  const ImagePlane p = oracle::random_plane(11, 14, 10);
  EXPECT_LE(max_relative(convolve_circular(p, k), oracle::circular_convolution(p, k)), 1e-10);
}

TEST(ConvolveCircular, LinearAndShiftEquivariant) {
  const ImagePlane u = oracle::random_plane(16, 16, 3), v = oracle::random_plane(16, 16, 4);
  const Kernel2D k = oracle::random_kernel(5, 5);
  ImagePlane combo(16, 16);
  for (std::size_t i = 0; i < combo.size(); ++i) combo.data()[i] = 2.0 * u.data()[i] - 0.5 * v.data()[i];
  const ImagePlane cu = convolve_circular(u, k), cv = convolve_circular(v, k), cc = convolve_circular(combo, k);
  for (std::size_t i = 0; i < combo.size(); ++i)
    EXPECT_NEAR(cc.data()[i], 2.0 * cu.data()[i] - 0.5 * cv.data()[i], 1e-10);

  ImagePlane shifted(16, 16);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c) shifted(r, c) = u.wrapped(r - 3, c + 5);
  const ImagePlane cs = convolve_circular(shifted, k);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c) EXPECT_NEAR(cs(r, c), cu.wrapped(r - 3, c + 5), 1e-10);
}

TEST(ConvolveCircular, KernelLargerThanImage) {
  EXPECT_THROW(convolve_circular(ImagePlane(4, 4), Kernel2D::delta(5)), Error);
}

TEST(ConvolveDirect, AdjointIsTranspose) {
  const ImagePlane u = oracle::random_plane(10, 12, 11), v = oracle::random_plane(10, 12, 12);
  const Kernel2D k = oracle::random_kernel(5, 13);
  const ImagePlane ku = convolve_direct(u, k, Boundary::Periodic);
  const ImagePlane ktv = convolve_direct(v, k, Boundary::Periodic, true);
  double a = 0, b = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    a += ku.data()[i] * v.data()[i];
    b += u.data()[i] * ktv.data()[i];
  }
  EXPECT_NEAR(a, b, 1e-10);
}

TEST(BlurRgb, ComposesPerChannel) {
  const RgbImage img = oracle::random_rgb(16, 16, 14);
  const RgbKernel k = oracle::random_rgb_kernel(5, 15);
  const RgbImage out = blur_rgb(img, k);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(out[c], convolve_circular(img[c], k[c]));
  EXPECT_LE(max_abs_difference(blur_rgb(img, RgbKernel::uniform(Kernel2D::delta(3))), img), 1e-14);

  RgbImage gray(16, 16, ColorSpace::LinRgb);
  gray[0] = gray[1] = gray[2] = img[0];
  const RgbImage g = blur_rgb(gray, RgbKernel::uniform(k[0]));
  EXPECT_EQ(g[0], g[1]);
  EXPECT_EQ(g[1], g[2]);
}

TEST(EdgeTaper, InteriorUntouchedAndConstantPreserved) {
  const ImagePlane p = oracle::random_plane(32, 30, 16);
  const Kernel2D k = oracle::random_kernel(7, 17);
  const ImagePlane t = edge_taper(p, k);
  for (int r = 3; r < 29; ++r)
    for (int c = 3; c < 27; ++c) EXPECT_EQ(t(r, c), p(r, c));
  const ImagePlane flat = edge_taper(ImagePlane(20, 20, 0.3), k);
  for (double v : flat.data()) EXPECT_NEAR(v, 0.3, 1e-14);
}

TEST(EdgeTaper, ReducesBorderRingingAfterRestoration) {
  // Non-periodic scene: a fixture blurred with replicated borders.
  const RgbImage truth =
      srgb_to_linrgb(load_rgb(std::string(RAWRESTORE_FIXTURES) + "/astronaut.png"));
  const RgbKernel k = RgbKernel::uniform(gen_gaussian_kernel(15, 2.5, 1.5, 0.7));
  RgbImage blurred(truth.height(), truth.width(), ColorSpace::LinRgb);
  for (int c = 0; c < 3; ++c) blurred[c] = convolve_direct(truth[c], k[c], Boundary::Replicate);

  auto restore = [&](const RgbImage& d) { return zstep_plain_fft(d, d, k, 2e-3); };
  const RgbImage plain = restore(blurred);
  const RgbImage tapered = restore(edge_taper(blurred, k));

  auto band_mse = [&](const RgbImage& x) {
    const int band = 14, h = truth.height(), w = truth.width();
    double s = 0;
    long n = 0;
    for (int c = 0; c < 3; ++c)
      for (int r = 0; r < h; ++r)
        for (int col = 0; col < w; ++col)
          if (r < band || col < band || r >= h - band || col >= w - band) {
            const double d = x[c](r, col) - truth[c](r, col);
            s += d * d;
            ++n;
          }
    return s / static_cast<double>(n);
  };
  EXPECT_LT(band_mse(tapered), band_mse(plain));
}

TEST(PsfGrid, SaveLoadRoundTripIsExact) {
  const auto dir = temp_dir("grid");
  PsfGrid g;
  g.geometry = {64, 16};
  g.rows = 2;
  g.cols = 3;
  Rng rng(9);
  for (int i = 0; i < 6; ++i) {
    // Taps representable in float32 so the PFM round trip is exact.
    RgbKernel k = make_rgb_kernel(random_kernel(9, rng), rng).kernel;
    std::array<Kernel2D, 3> ch{k[0], k[1], k[2]};
    for (auto& c : ch) {
      std::vector<double> taps = c.taps();
      for (double& t : taps) t = std::ldexp(std::round(std::ldexp(t, 20)), -20);
      const double rest = 1.0 - std::accumulate(taps.begin(), taps.end(), 0.0);
      taps[taps.size() / 2] += rest;
      c = Kernel2D(9, 9, taps);
    }
    g.kernels.push_back(RgbKernel(ch));
  }
  save_psf_grid(g, dir);
  std::vector<std::string> warnings;
  const PsfGrid back = load_psf_grid(dir, &warnings);
  EXPECT_TRUE(warnings.empty());
  EXPECT_EQ(back.rows, 2);
  EXPECT_EQ(back.cols, 3);
  EXPECT_EQ(back.geometry.tile_size, 64);
  EXPECT_EQ(back.geometry.overlap, 16);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(back.kernels[i], g.kernels[i]);
}

TEST(PsfGrid, MissingTile) {
  const auto dir = temp_dir("missing");
  {
    std::ofstream idx(dir / kPsfGridIndex);
    idx << "tile_size: 64\noverlap: 16\nrows: 3\ncols: 4\ntiles:\n";
    for (int i = 0; i < 11; ++i) idx << "  - {row: " << i / 4 << ", col: " << i % 4 << ", file: t" << i << ".pfm}\n";
  }
  const RgbKernel k = RgbKernel::uniform(Kernel2D::delta(3));
  for (int i = 0; i < 11; ++i) save_rgb_kernel(k, dir / ("t" + std::to_string(i) + ".pfm"));
  try {
    load_psf_grid(dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("missing tile"), std::string::npos);
  }
}

TEST(PsfGrid, RenormalizesWithWarning) {
  const auto dir = temp_dir("renorm");
  RgbImage taps(5, 5, ColorSpace::LinRgb);
  for (int c = 0; c < 3; ++c)
    for (double& t : taps[c].data()) t = 1.02 / 25.0;
  save_image(taps, dir / "k.pfm");
  std::vector<std::string> warnings;
  const RgbKernel k = load_rgb_kernel(dir / "k.pfm", &warnings);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(k[c].sum(), 1.0, 1e-9);
  EXPECT_FALSE(warnings.empty());
}

TEST(PsfGrid, RejectsInconsistentSizesAndMalformedIndex) {
  const auto dir = temp_dir("bad");
  save_rgb_kernel(RgbKernel::uniform(Kernel2D::delta(3)), dir / "a.pfm");
  save_rgb_kernel(RgbKernel::uniform(Kernel2D::delta(5)), dir / "b.pfm");
  {
    std::ofstream(dir / kPsfGridIndex) << "tile_size: 64\noverlap: 16\nrows: 1\ncols: 2\ntiles:\n"
                                          "  - {row: 0, col: 0, file: a.pfm}\n  - {row: 0, col: 1, file: b.pfm}\n";
  }
  EXPECT_THROW(load_psf_grid(dir), Error);
  {
    std::ofstream(dir / kPsfGridIndex) << "tile_size: [oops\n";
  }
  EXPECT_THROW(load_psf_grid(dir), Error);
  {
    std::ofstream(dir / kPsfGridIndex) << "tile_size: 64\noverlap: 64\nrows: 1\ncols: 1\ntiles: []\n";
  }
  EXPECT_THROW(load_psf_grid(dir), Error);
}
