#include "rawrestore/psf_grid.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "rawrestore/error.hpp"
#include "rawrestore/image_io.hpp"

namespace rawrestore {

void TileGeometry::validate() const {
  require(tile_size >= 2 && overlap >= 0 && overlap < tile_size, ErrorCode::InvalidArgument,
          "tile geometry needs 0 <= overlap < tile_size");
  require(tile_size % 2 == 0 && overlap % 2 == 0, ErrorCode::InvalidArgument,
          "tile size and overlap must be even to keep the CFA phase");
}

void PsfGrid::validate() const {
  geometry.validate();
  require(rows >= 1 && cols >= 1, ErrorCode::InvalidArgument, "PSF grid must have at least one tile");
  require(kernels.size() == static_cast<std::size_t>(rows) * cols, ErrorCode::MissingData,
          "PSF grid kernel count does not match rows x cols");
  for (const auto& k : kernels)
    require(k.height() == kernels[0].height() && k.width() == kernels[0].width(), ErrorCode::Format,
            "inconsistent kernel sizes in PSF grid");
}

void save_rgb_kernel(const RgbKernel& kernel, const std::filesystem::path& path) {
  save_image(RgbImage({kernel[0].as_plane(), kernel[1].as_plane(), kernel[2].as_plane()}, ColorSpace::LinRgb), path,
             FileFormat::Pfm);
}

RgbKernel load_rgb_kernel(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  const RgbImage taps = load_rgb(path, ColorSpace::LinRgb);
  require(taps.height() % 2 == 1 && taps.width() % 2 == 1, ErrorCode::Format,
          "kernel file '" + path.string() + "' does not have odd dimensions");
  std::array<std::vector<double>, 3> channels;
  for (int ch = 0; ch < 3; ++ch) {
    auto data = taps[ch].data();
    std::vector<double> v(data.begin(), data.end());
    for (double t : v)
      require(t >= 0.0 && std::isfinite(t), ErrorCode::Format,
              "kernel file '" + path.string() + "' has negative or non-finite taps");
    const double sum = std::accumulate(v.begin(), v.end(), 0.0);
    require(sum > 0.0, ErrorCode::Format, "kernel file '" + path.string() + "' has zero mass");
    if (std::abs(sum - 1.0) > Kernel2D::kSumTolerance) {
      if (std::abs(sum - 1.0) > 1e-3 && warnings) {
        std::ostringstream msg;
        msg << "kernel '" << path.filename().string() << "' channel " << ch << " sums to " << sum
            << "; renormalized";
        warnings->push_back(msg.str());
      }
      for (double& t : v) t /= sum;
    }
    channels[static_cast<std::size_t>(ch)] = std::move(v);
  }
  const int h = taps.height();
  const int w = taps.width();
  return RgbKernel({Kernel2D(h, w, std::move(channels[0])), Kernel2D(h, w, std::move(channels[1])),
                    Kernel2D(h, w, std::move(channels[2]))});
}

void save_psf_grid(const PsfGrid& grid, const std::filesystem::path& dir) {
  grid.validate();
  std::filesystem::create_directories(dir);
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "tile_size" << YAML::Value << grid.geometry.tile_size;
  out << YAML::Key << "overlap" << YAML::Value << grid.geometry.overlap;
  out << YAML::Key << "rows" << YAML::Value << grid.rows;
  out << YAML::Key << "cols" << YAML::Value << grid.cols;
  out << YAML::Key << "tiles" << YAML::Value << YAML::BeginSeq;
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c) {
      const std::string file = "tile_" + std::to_string(r) + "_" + std::to_string(c) + ".pfm";
      save_rgb_kernel(grid.at(r, c), dir / file);
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "row" << YAML::Value << r << YAML::Key << "col"
          << YAML::Value << c << YAML::Key << "file" << YAML::Value << file << YAML::EndMap;
    }
  out << YAML::EndSeq << YAML::EndMap;
  std::ofstream index(dir / kPsfGridIndex);
  require(index.good(), ErrorCode::Io, "cannot write PSF grid index in '" + dir.string() + "'");
  index << out.c_str() << '\n';
}

PsfGrid load_psf_grid(const std::filesystem::path& dir, std::vector<std::string>* warnings) {
  const auto index_path = dir / kPsfGridIndex;
  require(std::filesystem::exists(index_path), ErrorCode::MissingData,
          "no " + std::string(kPsfGridIndex) + " in '" + dir.string() + "'");
  YAML::Node root;
  try {
    root = YAML::LoadFile(index_path.string());
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::Format, "malformed PSF grid index: " + std::string(e.what()));
  }

  PsfGrid grid;
  try {
    grid.geometry.tile_size = root["tile_size"].as<int>();
    grid.geometry.overlap = root["overlap"].as<int>();
    grid.rows = root["rows"].as<int>();
    grid.cols = root["cols"].as<int>();
  } catch (const YAML::Exception&) {
    throw Error(ErrorCode::Format, "malformed PSF grid index: tile_size, overlap, rows and cols are required");
  }
  grid.geometry.validate();
  require(grid.rows >= 1 && grid.cols >= 1, ErrorCode::Format, "malformed PSF grid index: empty grid");
  const YAML::Node tiles = root["tiles"];
  require(tiles && tiles.IsSequence(), ErrorCode::Format, "malformed PSF grid index: missing tile list");

  std::vector<std::string> files(static_cast<std::size_t>(grid.rows) * grid.cols);
  std::set<std::pair<int, int>> seen;
  for (const auto& t : tiles) {
    int r = 0, c = 0;
    std::string file;
    try {
      r = t["row"].as<int>();
      c = t["col"].as<int>();
      file = t["file"].as<std::string>();
    } catch (const YAML::Exception&) {
      throw Error(ErrorCode::Format, "malformed PSF grid index: tile entries need row, col and file");
    }
    require(r >= 0 && r < grid.rows && c >= 0 && c < grid.cols, ErrorCode::Format,
            "PSF grid tile (" + std::to_string(r) + ", " + std::to_string(c) + ") lies outside the grid");
    require(seen.insert({r, c}).second, ErrorCode::Format, "duplicate PSF grid tile entry");
    files[static_cast<std::size_t>(r) * grid.cols + c] = file;
  }
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c) {
      const auto& file = files[static_cast<std::size_t>(r) * grid.cols + c];
      require(!file.empty() && std::filesystem::exists(dir / file), ErrorCode::MissingData,
              "missing tile (" + std::to_string(r) + ", " + std::to_string(c) + ") in PSF grid");
      grid.kernels.push_back(load_rgb_kernel(dir / file, warnings));
    }
  grid.validate();
  return grid;
}

}  // namespace rawrestore
