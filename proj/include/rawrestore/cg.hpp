#pragma once

#include <array>
#include <optional>
#include <vector>

#include "rawrestore/image.hpp"
#include "rawrestore/isp.hpp"
#include "rawrestore/kernel.hpp"

namespace rawrestore {

struct CgOptions {
  double tolerance = 1e-10;  // on ||residual|| / ||rhs||
  int max_iterations = 2000;
};

struct CgReport {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  // Quadratic energy 0.5 z'Az - b'z after each iterate (starting point first).
  std::vector<double> energy;
};

struct CgSiteResult {
  ImagePlane z;
  CgReport report;
};

// Matrix-free conjugate gradient on (K' S' S K + beta I) z = K' S' y + beta x.
// K and K' are applied by direct spatial periodic convolution/correlation; S
// selects the samples at `offset` on the 2x2 lattice, or is the identity when
// no offset is given. `observation` is full-size; off-lattice values are ignored.
CgSiteResult cg_solve_site(const ImagePlane& observation, std::optional<SiteOffset> offset, const ImagePlane& x,
                           const Kernel2D& kernel, double beta, const CgOptions& options = {});

struct CgZStep {
  RgbImage z;
  std::vector<ImagePlane> sites;  // per CFA site for the mosaic case, per channel otherwise
  std::vector<CgReport> reports;
  bool converged = true;  // non-convergence is reported, not thrown
};

// Same contracts as zstep_plain_fft / zstep_mosaic_fft, solved iteratively.
CgZStep zstep_cg(const RgbImage& d, const RgbImage& x, const RgbKernel& kernel, double beta,
                 const CgOptions& options = {});
CgZStep zstep_cg(const RawImage& y, const RgbImage& x, const RgbKernel& kernel, double beta,
                 const CgOptions& options = {});

}  // namespace rawrestore
