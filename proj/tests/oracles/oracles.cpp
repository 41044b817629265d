#include "oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <random>

namespace oracle {

using rawrestore::RgbImage;

ImagePlane circular_convolution(const ImagePlane& in, const Kernel2D& k) {
  const int h = in.height(), w = in.width(), ci = k.height() / 2, cj = k.width() / 2;
  ImagePlane out(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      double s = 0.0;
      for (int i = 0; i < k.height(); ++i)
        for (int j = 0; j < k.width(); ++j) {
          const int rr = ((r - (i - ci)) % h + h) % h;
          const int cc = ((c - (j - cj)) % w + w) % w;
          s += k(i, j) * in(rr, cc);
        }
      out(r, c) = s;
    }
  return out;
}

ImagePlane dense_site_solve(const ImagePlane& observation, std::optional<rawrestore::SiteOffset> offset,
                            const ImagePlane& x, const Kernel2D& k, double beta) {
  const int h = x.height(), w = x.width(), n = h * w;
  // Full periodic convolution matrix, then keep the sampled rows.
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  const int ci = k.height() / 2, cj = k.width() / 2;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      for (int i = 0; i < k.height(); ++i)
        for (int j = 0; j < k.width(); ++j) {
          const int rr = ((r - (i - ci)) % h + h) % h;
          const int cc = ((c - (j - cj)) % w + w) % w;
          K(r * w + c, rr * w + cc) += k(i, j);
        }
  std::vector<int> rows;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (!offset || ((r & 1) == offset->row && (c & 1) == offset->col)) rows.push_back(r * w + c);
  Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), n);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    A.row(static_cast<Eigen::Index>(i)) = K.row(rows[i]);
    y(static_cast<Eigen::Index>(i)) = observation.data()[static_cast<std::size_t>(rows[i])];
  }
  Eigen::VectorXd xv(n);
  for (int i = 0; i < n; ++i) xv(i) = x.data()[static_cast<std::size_t>(i)];
  const Eigen::MatrixXd M = A.transpose() * A + beta * Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd z = M.ldlt().solve(A.transpose() * y + beta * xv);
  ImagePlane out(h, w);
  for (int i = 0; i < n; ++i) out.data()[static_cast<std::size_t>(i)] = z(i);
  return out;
}

ImagePlane dense_tikhonov(const ImagePlane& z, double gamma) {
  const int h = z.height(), w = z.width(), n = h * w;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2 * n, n);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const int p = r * w + c;
      G(p, p) -= 1.0;
      G(p, r * w + (c + 1) % w) += 1.0;
      G(n + p, p) -= 1.0;
      G(n + p, ((r + 1) % h) * w + c) += 1.0;
    }
  const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) + 2.0 * gamma * G.transpose() * G;
  Eigen::VectorXd zv(n);
  for (int i = 0; i < n; ++i) zv(i) = z.data()[static_cast<std::size_t>(i)];
  const Eigen::VectorXd x = M.ldlt().solve(zv);
  ImagePlane out(h, w);
  for (int i = 0; i < n; ++i) out.data()[static_cast<std::size_t>(i)] = x(i);
  return out;
}

std::vector<double> tv1d(const std::vector<double>& input, double lambda) {
  const int width = static_cast<int>(input.size());
  std::vector<double> output(input.size());
  if (width == 0) return output;
  int k = 0, k0 = 0, kplus = 0, kminus = 0;
  double umin = lambda, umax = -lambda;
  double vmin = input[0] - lambda, vmax = input[0] + lambda;
  const double twolambda = 2.0 * lambda, minlambda = -lambda;
  for (;;) {
    while (k == width - 1) {
      if (umin < 0.0) {
        do output[k0++] = vmin;
        while (k0 <= kminus);
        umax = (vmin = input[kminus = k = k0]) + (umin = lambda) - vmax;
      } else if (umax > 0.0) {
        do output[k0++] = vmax;
        while (k0 <= kplus);
        umin = (vmax = input[kplus = k = k0]) + (umax = minlambda) - vmin;
      } else {
        vmin += umin / (k - k0 + 1);
        do output[k0++] = vmin;
        while (k0 <= k);
        return output;
      }
    }
    if ((umin += input[k + 1] - vmin) < minlambda) {
      do output[k0++] = vmin;
      while (k0 <= kminus);
      vmax = (vmin = input[kplus = kminus = k = k0]) + twolambda;
      umin = lambda;
      umax = minlambda;
    } else if ((umax += input[k + 1] - vmax) > lambda) {
      do output[k0++] = vmax;
      while (k0 <= kplus);
      vmin = (vmax = input[kplus = kminus = k = k0]) - twolambda;
      umin = lambda;
      umax = minlambda;
    } else {
      k++;
      if (umin >= lambda) {
        vmin += (umin - lambda) / ((kminus = k) - k0 + 1);
        umin = lambda;
      }
      if (umax <= minlambda) {
        vmax += (umax + lambda) / ((kplus = k) - k0 + 1);
        umax = minlambda;
      }
    }
  }
}

std::vector<double> tv1d_dual(const std::vector<double>& y, double lambda, int iterations) {
  // x = y - D'u, |u_i| <= lambda, D the forward difference; step 1/4.
  const std::size_t n = y.size();
  std::vector<double> u(n - 1, 0.0), x = y;
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i + 1 < n; ++i)
      u[i] = std::clamp(u[i] + 0.25 * (x[i + 1] - x[i]), -lambda, lambda);
    for (std::size_t i = 0; i < n; ++i) {
      double adj = 0.0;
      if (i > 0) adj += u[i - 1];
      if (i + 1 < n) adj -= u[i];
      x[i] = y[i] - adj;
    }
  }
  return x;
}

double cropped_mse(const RgbImage& a, const RgbImage& b, int crop) {
  double s = 0.0;
  long count = 0;
  for (int ch = 0; ch < 3; ++ch)
    for (int r = crop; r < a.height() - crop; ++r)
      for (int c = crop; c < a.width() - crop; ++c) {
        const double d = a[ch](r, c) - b[ch](r, c);
        s += d * d;
        ++count;
      }
  return s / static_cast<double>(count);
}

ImagePlane random_plane(int h, int w, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  ImagePlane p(h, w);
  for (double& v : p.data()) v = u(rng);
  return p;
}

RgbImage random_rgb(int h, int w, std::uint64_t seed, double lo, double hi) {
  return RgbImage({random_plane(h, w, seed * 3 + 1, lo, hi), random_plane(h, w, seed * 3 + 2, lo, hi),
                   random_plane(h, w, seed * 3 + 3, lo, hi)},
                  rawrestore::ColorSpace::LinRgb);
}

Kernel2D random_kernel(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> taps(static_cast<std::size_t>(size) * size);
  for (double& t : taps) t = u(rng);
  return Kernel2D::normalized(size, size, taps);
}

rawrestore::RgbKernel random_rgb_kernel(int size, std::uint64_t seed) {
  return rawrestore::RgbKernel({random_kernel(size, seed * 3 + 1), random_kernel(size, seed * 3 + 2),
                                random_kernel(size, seed * 3 + 3)});
}

}  // namespace oracle
