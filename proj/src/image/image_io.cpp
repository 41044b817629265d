#include "rawrestore/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "rawrestore/error.hpp"

namespace rawrestore {
namespace {

using FilePtr = std::unique_ptr<std::FILE, decltype(&std::fclose)>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr fp(std::fopen(path.c_str(), mode), &std::fclose);
  require(fp != nullptr, ErrorCode::Io, "cannot open '" + path.string() + "'");
  return fp;
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return ext;
}

// ---------------------------------------------------------------- PNG

std::vector<ImagePlane> read_png(const std::filesystem::path& path) {
  FilePtr fp = open_file(path, "rb");
  unsigned char sig[8];
  require(std::fread(sig, 1, 8, fp.get()) == 8 && png_sig_cmp(sig, 0, 8) == 0, ErrorCode::Format,
          "'" + path.string() + "' is not a PNG file");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  require(png && info, ErrorCode::Io, "libpng initialisation failed");
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_read_struct(p, i, nullptr); }
  } guard{&png, &info};

  if (setjmp(png_jmpbuf(png))) throw Error(ErrorCode::Format, "corrupt PNG '" + path.string() + "'");

  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_png(png, info, PNG_TRANSFORM_EXPAND | PNG_TRANSFORM_STRIP_ALPHA, nullptr);

  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  require(depth == 8 || depth == 16, ErrorCode::Format,
          "unsupported PNG bit depth " + std::to_string(depth));
  const int channels = png_get_channels(png, info);
  require(channels == 1 || channels == 3, ErrorCode::Format, "unsupported PNG channel layout");
  require(color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_RGB ||
              color == PNG_COLOR_TYPE_PALETTE,
          ErrorCode::Format, "unsupported PNG color type");

  const double max_level = depth == 16 ? 65535.0 : 255.0;
  png_bytepp rows = png_get_rows(png, info);
  std::vector<ImagePlane> planes(static_cast<std::size_t>(channels), ImagePlane(height, width));
  for (int r = 0; r < height; ++r) {
    const png_bytep row = rows[r];
    for (int c = 0; c < width; ++c) {
      for (int ch = 0; ch < channels; ++ch) {
        const std::size_t k = static_cast<std::size_t>(c) * channels + ch;
        const unsigned level = depth == 16 ? (static_cast<unsigned>(row[2 * k]) << 8) | row[2 * k + 1]
                                           : row[k];
        planes[static_cast<std::size_t>(ch)](r, c) = level / max_level;
      }
    }
  }
  return planes;
}

void write_png(const std::vector<const ImagePlane*>& planes, const std::filesystem::path& path, int depth) {
  const int height = planes[0]->height();
  const int width = planes[0]->width();
  const int channels = static_cast<int>(planes.size());
  const int max_level = depth == 16 ? 65535 : 255;
  const int bytes = depth / 8;

  std::vector<std::vector<png_byte>> rows(static_cast<std::size_t>(height),
                                          std::vector<png_byte>(static_cast<std::size_t>(width) * channels * bytes));
  for (int r = 0; r < height; ++r) {
    auto& row = rows[static_cast<std::size_t>(r)];
    for (int c = 0; c < width; ++c) {
      for (int ch = 0; ch < channels; ++ch) {
        const int level = quantize((*planes[static_cast<std::size_t>(ch)])(r, c), max_level);
        const std::size_t k = static_cast<std::size_t>(c) * channels + ch;
        if (depth == 16) {
          row[2 * k] = static_cast<png_byte>(level >> 8);
          row[2 * k + 1] = static_cast<png_byte>(level & 0xff);
        } else {
          row[k] = static_cast<png_byte>(level);
        }
      }
    }
  }

  FilePtr fp = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  require(png && info, ErrorCode::Io, "libpng initialisation failed");
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_write_struct(p, i); }
  } guard{&png, &info};
  if (setjmp(png_jmpbuf(png))) throw Error(ErrorCode::Io, "failed writing PNG '" + path.string() + "'");

  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), depth,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  std::vector<png_bytep> row_ptrs;
  row_ptrs.reserve(rows.size());
  for (auto& row : rows) row_ptrs.push_back(row.data());
  png_set_rows(png, info, row_ptrs.data());
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
}

// ---------------------------------------------------------------- PFM

std::vector<ImagePlane> read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::string magic;
  int width = 0;
  int height = 0;
  double scale = 0.0;
  in >> magic >> width >> height >> scale;
  require(in.good() && (magic == "PF" || magic == "Pf"), ErrorCode::Format,
          "'" + path.string() + "' is not a PFM file");
  require(width > 0 && height > 0 && scale != 0.0, ErrorCode::Format, "malformed PFM header");
  in.get();  // single whitespace byte before the raster

  const int channels = magic == "PF" ? 3 : 1;
  const bool little = scale < 0.0;
  const std::size_t count = static_cast<std::size_t>(width) * height * channels;
  std::vector<std::uint32_t> raw(count);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count * 4));
  require(static_cast<std::size_t>(in.gcount()) == count * 4, ErrorCode::Format,
          "truncated PFM raster in '" + path.string() + "'");
  const bool host_little = std::endian::native == std::endian::little;
  if (little != host_little)
    for (auto& v : raw) v = __builtin_bswap32(v);

  std::vector<ImagePlane> planes(static_cast<std::size_t>(channels), ImagePlane(height, width));
  // PFM stores rows bottom to top.
  for (int r = 0; r < height; ++r) {
    const int dst_row = height - 1 - r;
    for (int c = 0; c < width; ++c) {
      for (int ch = 0; ch < channels; ++ch) {
        const std::size_t k = (static_cast<std::size_t>(r) * width + c) * channels + ch;
        planes[static_cast<std::size_t>(ch)](dst_row, c) = std::bit_cast<float>(raw[k]);
      }
    }
  }
  return planes;
}

void write_pfm(const std::vector<const ImagePlane*>& planes, const std::filesystem::path& path) {
  const int height = planes[0]->height();
  const int width = planes[0]->width();
  const int channels = static_cast<int>(planes.size());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out << (channels == 3 ? "PF" : "Pf") << '\n' << width << ' ' << height << '\n'
      << (std::endian::native == std::endian::little ? "-1.0" : "1.0") << '\n';
  std::vector<float> raster(static_cast<std::size_t>(width) * height * channels);
  for (int r = 0; r < height; ++r) {
    const int src_row = height - 1 - r;
    for (int c = 0; c < width; ++c)
      for (int ch = 0; ch < channels; ++ch)
        raster[(static_cast<std::size_t>(r) * width + c) * channels + ch] =
            static_cast<float>((*planes[static_cast<std::size_t>(ch)])(src_row, c));
  }
  out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size() * 4));
  require(out.good(), ErrorCode::Io, "failed writing '" + path.string() + "'");
}

FileFormat infer_format(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return FileFormat::Png8;
  if (ext == ".pfm") return FileFormat::Pfm;
  throw Error(ErrorCode::Format, "cannot infer image format from '" + path.string() + "'");
}

void save_planes(const std::vector<const ImagePlane*>& planes, const std::filesystem::path& path,
                 std::optional<FileFormat> format) {
  switch (format.value_or(infer_format(path))) {
    case FileFormat::Png8: write_png(planes, path, 8); break;
    case FileFormat::Png16: write_png(planes, path, 16); break;
    case FileFormat::Pfm: write_pfm(planes, path); break;
  }
}

}  // namespace

int quantize(double value, int max_level) {
  const double v = std::isnan(value) ? 0.0 : std::clamp(value, 0.0, 1.0);
  return static_cast<int>(std::lround(v * max_level));
}

LoadedImage load_image(const std::filesystem::path& path, std::optional<ColorSpace> hint) {
  require(std::filesystem::exists(path), ErrorCode::Io, "no such file '" + path.string() + "'");
  const std::string ext = lower_extension(path);
  std::vector<ImagePlane> planes;
  ColorSpace cs = ColorSpace::Srgb;
  if (ext == ".pfm") {
    planes = read_pfm(path);
    cs = hint.value_or(ColorSpace::LinRgb);
  } else {
    planes = read_png(path);
    cs = hint.value_or(ColorSpace::Srgb);
  }
  if (planes.size() == 1) return std::move(planes[0]);
  return RgbImage({std::move(planes[0]), std::move(planes[1]), std::move(planes[2])}, cs);
}

RgbImage load_rgb(const std::filesystem::path& path, std::optional<ColorSpace> hint) {
  LoadedImage img = load_image(path, hint);
  require(std::holds_alternative<RgbImage>(img), ErrorCode::Format,
          "'" + path.string() + "' is single-channel, expected RGB");
  return std::get<RgbImage>(std::move(img));
}

ImagePlane load_plane(const std::filesystem::path& path) {
  LoadedImage img = load_image(path);
  require(std::holds_alternative<ImagePlane>(img), ErrorCode::Format,
          "'" + path.string() + "' has three channels, expected one");
  return std::get<ImagePlane>(std::move(img));
}

void save_image(const RgbImage& img, const std::filesystem::path& path, std::optional<FileFormat> format) {
  save_planes({&img[0], &img[1], &img[2]}, path, format);
}

void save_image(const ImagePlane& plane, const std::filesystem::path& path, std::optional<FileFormat> format) {
  save_planes({&plane}, path, format);
}

}  // namespace rawrestore
