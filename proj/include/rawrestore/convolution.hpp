#pragma once

#include "rawrestore/image.hpp"
#include "rawrestore/kernel.hpp"

namespace rawrestore {

// Periodic convolution with a centered kernel, evaluated with FFTs.
ImagePlane convolve_circular(const ImagePlane& plane, const Kernel2D& kernel);
RgbImage blur_rgb(const RgbImage& img, const RgbKernel& kernel);

enum class Boundary { Periodic, Replicate };

// Direct spatial evaluation, O(N k^2). With `adjoint` the kernel is flipped
// (correlation), which is the transpose of the periodic convolution.
ImagePlane convolve_direct(const ImagePlane& plane, const Kernel2D& kernel, Boundary boundary,
                           bool adjoint = false);

// Blends the image towards its circularly blurred version inside a border
// band as wide as the kernel radius. Pixels at least one radius from every
// edge are returned untouched.
ImagePlane edge_taper(const ImagePlane& plane, const Kernel2D& kernel);
RgbImage edge_taper(const RgbImage& img, const RgbKernel& kernel);

}  // namespace rawrestore
