#include "rawrestore/cg.hpp"

#include <cmath>

#include "rawrestore/convolution.hpp"
#include "rawrestore/error.hpp"
#include "rawrestore/zstep.hpp"

namespace rawrestore {
namespace {

double dot(const ImagePlane& a, const ImagePlane& b) {
  double s = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) s += da[i] * db[i];
  return s;
}

// Zeroes everything off the sampling lattice.
void apply_mask(ImagePlane& p, const std::optional<SiteOffset>& offset) {
  if (!offset) return;
  for (int r = 0; r < p.height(); ++r)
    for (int c = 0; c < p.width(); ++c)
      if ((r & 1) != offset->row || (c & 1) != offset->col) p(r, c) = 0.0;
}

}  // namespace

CgSiteResult cg_solve_site(const ImagePlane& observation, std::optional<SiteOffset> offset, const ImagePlane& x,
                           const Kernel2D& kernel, double beta, const CgOptions& options) {
  require(beta > 0.0, ErrorCode::InvalidArgument, "z-step weight beta must be positive");
  require(observation.same_shape(x), ErrorCode::DimensionMismatch, "CG observation and anchor differ in size");
  if (offset)
    require(x.height() % 2 == 0 && x.width() % 2 == 0, ErrorCode::DimensionMismatch,
            "decimated CG requires even dimensions");

  auto apply_normal = [&](const ImagePlane& v) {
    ImagePlane kv = convolve_direct(v, kernel, Boundary::Periodic);
    apply_mask(kv, offset);
    ImagePlane out = convolve_direct(kv, kernel, Boundary::Periodic, /*adjoint=*/true);
    auto o = out.data();
    auto vv = v.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += beta * vv[i];
    return out;
  };

  ImagePlane samples = observation;
  apply_mask(samples, offset);
  ImagePlane b = convolve_direct(samples, kernel, Boundary::Periodic, /*adjoint=*/true);
  for (std::size_t i = 0; i < b.size(); ++i) b.data()[i] += beta * x.data()[i];

  ImagePlane z = x;
  ImagePlane r = b;
  {
    const ImagePlane az = apply_normal(z);
    for (std::size_t i = 0; i < r.size(); ++i) r.data()[i] -= az.data()[i];
  }
  ImagePlane p = r;
  const double b_norm = std::sqrt(dot(b, b));
  double rr = dot(r, r);

  CgReport report;
  auto energy = [&] { return -0.5 * (dot(z, b) + dot(z, r)); };
  report.energy.push_back(energy());
  report.relative_residual = b_norm > 0.0 ? std::sqrt(rr) / b_norm : 0.0;

  while (report.relative_residual > options.tolerance && report.iterations < options.max_iterations) {
    const ImagePlane ap = apply_normal(p);
    const double alpha = rr / dot(p, ap);
    for (std::size_t i = 0; i < z.size(); ++i) {
      z.data()[i] += alpha * p.data()[i];
      r.data()[i] -= alpha * ap.data()[i];
    }
    const double rr_next = dot(r, r);
    for (std::size_t i = 0; i < p.size(); ++i) p.data()[i] = r.data()[i] + (rr_next / rr) * p.data()[i];
    rr = rr_next;
    ++report.iterations;
    report.relative_residual = b_norm > 0.0 ? std::sqrt(rr) / b_norm : 0.0;
    report.energy.push_back(energy());
  }
  report.converged = report.relative_residual <= options.tolerance;
  return {std::move(z), std::move(report)};
}

CgZStep zstep_cg(const RgbImage& d, const RgbImage& x, const RgbKernel& kernel, double beta,
                 const CgOptions& options) {
  require(d.same_shape(x), ErrorCode::DimensionMismatch, "z-step inputs differ in size");
  CgZStep out{RgbImage(x.height(), x.width(), x.color_space()), {}, {}, true};
  for (int ch = 0; ch < 3; ++ch) {
    CgSiteResult res = cg_solve_site(d[ch], std::nullopt, x[ch], kernel[ch], beta, options);
    out.converged = out.converged && res.report.converged;
    out.z[ch] = res.z;
    out.sites.push_back(std::move(res.z));
    out.reports.push_back(std::move(res.report));
  }
  return out;
}

CgZStep zstep_cg(const RawImage& y, const RgbImage& x, const RgbKernel& kernel, double beta,
                 const CgOptions& options) {
  require(y.height() == x.height() && y.width() == x.width(), ErrorCode::DimensionMismatch,
          "z-step anchor does not match the raw image size");
  CgZStep out{RgbImage(x.height(), x.width(), x.color_space()), {}, {}, true};
  for (CfaSite site : kAllSites) {
    const int ch = channel_of(site);
    CgSiteResult res = cg_solve_site(y.plane(), y.cfa().offset(site), x[ch], kernel[ch], beta, options);
    out.converged = out.converged && res.report.converged;
    out.sites.push_back(std::move(res.z));
    out.reports.push_back(std::move(res.report));
  }
  const auto idx = [](CfaSite s) { return static_cast<std::size_t>(s); };
  out.z[0] = out.sites[idx(CfaSite::R)];
  out.z[1] = recombine_green(out.sites[idx(CfaSite::G1)], out.sites[idx(CfaSite::G2)], y.cfa());
  out.z[2] = out.sites[idx(CfaSite::B)];
  return out;
}

}  // namespace rawrestore
