#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rawrestore/config.hpp"
#include "rawrestore/metrics.hpp"

namespace rawrestore {

inline constexpr const char* kManifestName = "manifest.json";
inline constexpr int kManifestVersion = 1;

struct KernelRecord {
  int index = 0;
  std::string file;  // relative to the dataset directory
  std::uint64_t seed = 0;
  std::array<double, 2> angles_deg{0.0, 0.0};  // red, green
  std::array<double, 2> scales{1.0, 1.0};
};

struct DatasetEntry {
  std::string id;
  std::string source;  // input image path as given
  int kernel = 0;
  NoiseParams noise;
  std::uint64_t noise_seed = 0;
  std::string raw;       // mosaicked noisy observation, single-plane PFM
  std::string gt_lin;    // linRGB ground truth, PFM
  std::string gt_srgb;   // sRGB ground truth, 16-bit PNG
};

struct Manifest {
  int version = kManifestVersion;
  std::uint64_t seed = 0;
  std::string cfa = "RGGB";
  IspParams isp;
  std::vector<KernelRecord> kernels;
  std::vector<DatasetEntry> entries;

  // Hash of everything that determines the data; restore reports carry it so
  // results from different dataset versions are never mixed.
  std::string fingerprint() const;
};

void save_manifest(const Manifest& m, const std::filesystem::path& dir);
Manifest load_manifest(const std::filesystem::path& dir);

// Diagnostics sink for --verbose; receives one JSON object per line.
using DiagnosticSink = std::function<void(const std::string&)>;

// Writes raw/, gt/, kernels/ and the manifest under config.output.
Manifest cmd_simulate(const ExperimentConfig& config, const DiagnosticSink& diag = {});

struct RestoreRecord {
  std::string id;
  Method method = Method::Joint;
  MetricReport lin;
  MetricReport srgb;
  double seconds = 0.0;
};

struct RestoreReport {
  std::string dataset_fingerprint;
  std::vector<RestoreRecord> records;  // manifest order, then method order
};

// Restores every entry of the dataset in `dataset_dir` with each configured
// method. Results go to <output>/restored/<method>/<id>.{pfm,png} and a CSV.
RestoreReport cmd_restore(const ExperimentConfig& config, const std::filesystem::path& dataset_dir,
                          const DiagnosticSink& diag = {});

// One restored image, with metrics against the dataset ground truth.
RgbImage restore_entry(const ExperimentConfig& config, const std::filesystem::path& dataset_dir,
                       const Manifest& manifest, const DatasetEntry& entry, Method method,
                       const DiagnosticSink& diag = {});

struct GeneratedKernel {
  RgbKernelDraw draw;
  std::uint64_t seed = 0;
};

// Gray kernel plus color warps drawn from `seed`; reproducible from the seed.
GeneratedKernel generate_kernel(int size, std::uint64_t seed, const WarpRanges& ranges = {});
// Writes <out>/kernel.pfm and <out>/kernel.json.
GeneratedKernel cmd_gen_kernel(int size, std::uint64_t seed, const WarpRanges& ranges,
                               const std::filesystem::path& out_dir);

struct PsfRestoreRequest {
  std::filesystem::path input;  // sRGB PNG, linRGB PFM, or single-plane raw PFM
  std::filesystem::path psf_grid;
  std::filesystem::path output;  // directory
  std::optional<NoiseParams> noise;
};

// Returns the restored linRGB image; writes restored.pfm and restored.png.
RgbImage cmd_psf_restore(const ExperimentConfig& config, const PsfRestoreRequest& request,
                         const DiagnosticSink& diag = {});

struct MethodSummary {
  Method method = Method::Joint;
  std::string space;  // "linRGB" or "sRGB"
  double mean_psnr = 0.0;
  double median_psnr = 0.0;
  double mean_ssim = 0.0;
  double median_ssim = 0.0;
  double gap_vs_joint = 0.0;  // mean PSNR of joint minus this method
};

struct BenchReport {
  RestoreReport restore;
  std::vector<MethodSummary> summary;
  double wall_seconds = 0.0;
};

std::vector<MethodSummary> summarize(const RestoreReport& report, const std::vector<Method>& methods);

// Simulates into <output>/dataset, restores with every configured method and
// writes bench_images.csv, bench_summary.csv and bench.json.
BenchReport cmd_bench(const ExperimentConfig& config, const DiagnosticSink& diag = {});

std::string records_csv(const RestoreReport& report);
std::string summary_csv(const std::vector<MethodSummary>& summary);

}  // namespace rawrestore
