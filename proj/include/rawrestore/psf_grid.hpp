#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rawrestore/kernel.hpp"

namespace rawrestore {

struct TileGeometry {
  int tile_size = 256;
  int overlap = 64;

  void validate() const;
  int stride() const noexcept { return tile_size - overlap; }
};

// Row-major grid of locally uniform RGB kernels, one per tile.
struct PsfGrid {
  TileGeometry geometry;
  int rows = 0;
  int cols = 0;
  std::vector<RgbKernel> kernels;

  const RgbKernel& at(int row, int col) const { return kernels[static_cast<std::size_t>(row) * cols + col]; }
  void validate() const;
};

// RGB kernels are stored as three-channel PFM files.
void save_rgb_kernel(const RgbKernel& kernel, const std::filesystem::path& path);
// Rejects negative taps; renormalizes channels whose sum is off by more than
// the kernel tolerance, and appends a warning when it is off by more than 1e-3.
RgbKernel load_rgb_kernel(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

inline constexpr const char* kPsfGridIndex = "psf_grid.yaml";

// Directory layout: psf_grid.yaml (tile_size, overlap, rows, cols, tiles:
// [{row, col, file}]) plus one kernel file per tile.
void save_psf_grid(const PsfGrid& grid, const std::filesystem::path& dir);
PsfGrid load_psf_grid(const std::filesystem::path& dir, std::vector<std::string>* warnings = nullptr);

}  // namespace rawrestore
