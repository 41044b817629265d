#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rawrestore/hqs.hpp"
#include "rawrestore/isp.hpp"
#include "rawrestore/kernel.hpp"
#include "rawrestore/psf_grid.hpp"

namespace rawrestore {

enum class Method { Joint, TwoStageBilinear, TwoStageClassical };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);
inline constexpr Method kAllMethods[] = {Method::Joint, Method::TwoStageBilinear, Method::TwoStageClassical};

enum class KernelSource { Generate, File, PsfGrid };

std::string_view kernel_source_name(KernelSource s);
KernelSource parse_kernel_source(std::string_view name);

inline constexpr int kDefaultKernelSize = 25;
inline constexpr int kDefaultCrop = 50;

struct KernelConfig {
  KernelSource source = KernelSource::Generate;
  int count = 8;
  int size = kDefaultKernelSize;
  WarpRanges warp;
  std::filesystem::path path;  // kernel file or PSF grid directory
};

struct NoiseConfig {
  // Fixed shot levels; every (image, kernel) pair is simulated once per level.
  // When empty, `samples` levels are drawn per pair instead.
  std::vector<double> shot_levels;
  int samples = 1;
  NoiseSampling sampling;
};

struct PriorConfig {
  std::string name = "tv";
  int tv_iterations = 20;
  ColorBasis basis = ColorBasis::Opponent;
};

struct ExperimentConfig {
  std::vector<std::filesystem::path> inputs;
  KernelConfig kernels;
  NoiseConfig noise;
  CfaPattern cfa;
  IspParams isp;
  std::vector<Method> methods{Method::Joint, Method::TwoStageBilinear, Method::TwoStageClassical};
  ScheduleParams schedule;
  PriorConfig prior;
  TileGeometry tiles;
  int crop = kDefaultCrop;
  std::filesystem::path output = "out";
  std::uint64_t seed = 0;
  int workers = 0;  // 0: hardware concurrency

  void validate() const;
};

// Nested YAML; every key is optional. Relative input and kernel paths are
// resolved against the config file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(std::string_view yaml_text, const std::filesystem::path& base_dir = {});
std::string dump_config(const ExperimentConfig& config);

// Deterministic per-item seed derived from the experiment seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace rawrestore
