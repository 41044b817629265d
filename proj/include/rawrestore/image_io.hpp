#pragma once

#include <filesystem>
#include <optional>
#include <variant>

#include "rawrestore/image.hpp"

namespace rawrestore {

enum class FileFormat { Png8, Png16, Pfm };

using LoadedImage = std::variant<ImagePlane, RgbImage>;

// Reads an 8/16-bit PNG (gray or RGB, alpha dropped) or a PFM. PNG samples are
// divided by 2^bits - 1. Without a hint, PNG is tagged sRGB and PFM linRGB.
LoadedImage load_image(const std::filesystem::path& path,
                       std::optional<ColorSpace> hint = std::nullopt);

// Convenience wrappers that reject the other variant.
RgbImage load_rgb(const std::filesystem::path& path, std::optional<ColorSpace> hint = std::nullopt);
ImagePlane load_plane(const std::filesystem::path& path);

// Format is inferred from the extension (.png -> 8-bit, .pfm) when absent.
void save_image(const RgbImage& img, const std::filesystem::path& path,
                std::optional<FileFormat> format = std::nullopt);
void save_image(const ImagePlane& plane, const std::filesystem::path& path,
                std::optional<FileFormat> format = std::nullopt);

// Quantization used by PNG output: clamp to [0, 1], round to nearest level.
int quantize(double value, int max_level);

}  // namespace rawrestore
