#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rawrestore/commands.hpp"
#include "rawrestore/convolution.hpp"
#include "rawrestore/error.hpp"
#include "rawrestore/image_io.hpp"
#include "rawrestore/parallel.hpp"

namespace rawrestore {

using json = nlohmann::ordered_json;

namespace {

json isp_json(const IspParams& isp) {
  json ccm = json::array();
  for (const auto& row : isp.ccm) ccm.push_back(json(row));
  return {{"ccm", ccm}, {"wb_gains", json(isp.wb_gains)}};
}

IspParams isp_from_json(const json& j) {
  IspParams isp;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) isp.ccm[r][c] = j.at("ccm").at(r).at(c).get<double>();
  for (std::size_t c = 0; c < 3; ++c) isp.wb_gains[c] = j.at("wb_gains").at(c).get<double>();
  isp.validate();
  return isp;
}

json manifest_body(const Manifest& m) {
  json kernels = json::array();
  for (const auto& k : m.kernels)
    kernels.push_back({{"index", k.index},
                       {"file", k.file},
                       {"seed", k.seed},
                       {"angles_deg", json(k.angles_deg)},
                       {"scales", json(k.scales)}});
  json entries = json::array();
  for (const auto& e : m.entries)
    entries.push_back({{"id", e.id},
                       {"source", e.source},
                       {"kernel", e.kernel},
                       {"shot", e.noise.shot},
                       {"read", e.noise.read},
                       {"noise_seed", e.noise_seed},
                       {"raw", e.raw},
                       {"gt_lin", e.gt_lin},
                       {"gt_srgb", e.gt_srgb}});
  return {{"version", m.version}, {"seed", m.seed}, {"cfa", m.cfa}, {"isp", isp_json(m.isp)},
          {"kernels", kernels},   {"entries", entries}};
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Values pass through float32 on disk; round before use so the saved ground
// truth is exactly what was blurred.
RgbImage to_float_precision(RgbImage img) {
  for (int c = 0; c < 3; ++c)
    for (double& v : img[c].data()) v = static_cast<float>(v);
  return img;
}

RgbImage even_crop(const RgbImage& img) {
  const int h = img.height() & ~1, w = img.width() & ~1;
  require(h >= 2 && w >= 2, ErrorCode::DimensionMismatch, "image too small to mosaic");
  if (h == img.height() && w == img.width()) return img;
  return crop(img, 0, 0, h, w);
}

void emit(const DiagnosticSink& diag, const json& j) {
  if (diag) diag(j.dump());
}

}  // namespace

std::string Manifest::fingerprint() const { return fnv1a_hex(manifest_body(*this).dump()); }

void save_manifest(const Manifest& m, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json j = manifest_body(m);
  j["fingerprint"] = m.fingerprint();
  std::ofstream out(dir / kManifestName);
  if (!out) throw Error(ErrorCode::Io, "cannot write manifest in " + dir.string());
  out << j.dump(2) << "\n";
}

Manifest load_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / kManifestName);
  if (!in) throw Error(ErrorCode::MissingData, "no dataset manifest in " + dir.string());
  Manifest m;
  try {
    const json j = json::parse(in);
    m.version = j.at("version").get<int>();
    require(m.version == kManifestVersion, ErrorCode::Format, "unsupported manifest version");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.cfa = j.at("cfa").get<std::string>();
    m.isp = isp_from_json(j.at("isp"));
    for (const auto& k : j.at("kernels")) {
      KernelRecord r;
      r.index = k.at("index").get<int>();
      r.file = k.at("file").get<std::string>();
      r.seed = k.at("seed").get<std::uint64_t>();
      r.angles_deg = k.at("angles_deg").get<std::array<double, 2>>();
      r.scales = k.at("scales").get<std::array<double, 2>>();
      m.kernels.push_back(r);
    }
    for (const auto& e : j.at("entries")) {
      DatasetEntry d;
      d.id = e.at("id").get<std::string>();
      d.source = e.at("source").get<std::string>();
      d.kernel = e.at("kernel").get<int>();
      if (!e.contains("shot") || !e.contains("read"))
        throw Error(ErrorCode::MissingData, "entry '" + d.id + "' lacks noise parameters");
      d.noise = {e.at("shot").get<double>(), e.at("read").get<double>()};
      d.noise_seed = e.at("noise_seed").get<std::uint64_t>();
      d.raw = e.at("raw").get<std::string>();
      d.gt_lin = e.at("gt_lin").get<std::string>();
      d.gt_srgb = e.at("gt_srgb").get<std::string>();
      require(d.kernel >= 0 && d.kernel < static_cast<int>(m.kernels.size()), ErrorCode::MissingData,
              "entry '" + d.id + "' references a missing kernel");
      m.entries.push_back(d);
    }
    if (j.contains("fingerprint"))
      require(j.at("fingerprint").get<std::string>() == m.fingerprint(), ErrorCode::Format,
              "manifest fingerprint does not match its content");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Format, std::string("malformed manifest: ") + e.what());
  }
  return m;
}

GeneratedKernel generate_kernel(int size, std::uint64_t seed, const WarpRanges& ranges) {
  require(size >= 1 && size % 2 == 1, ErrorCode::InvalidArgument, "kernel size must be odd and positive");
  Rng rng(seed);
  const Kernel2D gray = random_kernel(size, rng);
  return {make_rgb_kernel(gray, rng, ranges), seed};
}

Manifest cmd_simulate(const ExperimentConfig& config, const DiagnosticSink& diag) {
  config.validate();
  require(!config.inputs.empty(), ErrorCode::Config, "no input images configured");
  require(config.kernels.source != KernelSource::PsfGrid, ErrorCode::Config,
          "simulate needs generated or file kernels");
  const std::filesystem::path dir = config.output;
  for (const char* sub : {"raw", "gt", "kernels"}) std::filesystem::create_directories(dir / sub);

  Manifest m;
  m.seed = config.seed;
  m.cfa = std::string(config.cfa.name_string());
  m.isp = config.isp;

  std::vector<RgbKernel> kernels;
  if (config.kernels.source == KernelSource::File) {
    kernels.push_back(load_rgb_kernel(config.kernels.path));
    m.kernels.push_back({0, "kernels/kernel_0.pfm", 0, {0.0, 0.0}, {1.0, 1.0}});
  } else {
    for (int k = 0; k < config.kernels.count; ++k) {
      const GeneratedKernel g = generate_kernel(config.kernels.size, derive_seed(config.seed, 1, k), config.kernels.warp);
      kernels.push_back(g.draw.kernel);
      m.kernels.push_back({k, "kernels/kernel_" + std::to_string(k) + ".pfm", g.seed, g.draw.angles_deg, g.draw.scales});
    }
  }
  // Simulate with the taps as stored, so restoration sees the same kernel.
  for (std::size_t k = 0; k < kernels.size(); ++k) {
    save_rgb_kernel(kernels[k], dir / m.kernels[k].file);
    kernels[k] = load_rgb_kernel(dir / m.kernels[k].file);
  }

  const bool fixed_levels = !config.noise.shot_levels.empty();
  const int levels = fixed_levels ? static_cast<int>(config.noise.shot_levels.size()) : config.noise.samples;

  std::vector<RgbImage> truths;
  std::vector<std::size_t> entry_image;
  for (std::size_t i = 0; i < config.inputs.size(); ++i) {
    const std::filesystem::path& src = config.inputs[i];
    const RgbImage srgb = even_crop(load_rgb(src, ColorSpace::Srgb));
    const RgbImage lin = to_float_precision(srgb_to_linrgb(srgb, config.isp));
    const std::string stem = "i" + std::to_string(i) + "_" + src.stem().string();
    save_image(lin, dir / "gt" / (stem + "_lin.pfm"));
    save_image(linrgb_to_srgb(lin, config.isp), dir / "gt" / (stem + "_srgb.png"), FileFormat::Png16);
    truths.push_back(lin);

    for (int k = 0; k < static_cast<int>(kernels.size()); ++k)
      for (int l = 0; l < levels; ++l) {
        DatasetEntry e;
        e.id = stem + "_k" + std::to_string(k) + "_n" + std::to_string(l);
        e.source = src.string();
        e.kernel = k;
        const std::uint64_t pair = static_cast<std::uint64_t>(k) * 1000 + static_cast<std::uint64_t>(l);
        if (fixed_levels) {
          const double shot = config.noise.shot_levels[static_cast<std::size_t>(l)];
          e.noise = {shot, shot > 0.0 ? read_noise_for(shot, config.noise.sampling) : 0.0};
        } else {
          e.noise = sample_noise_params(derive_seed(config.seed, 3, i, pair), config.noise.sampling);
        }
        e.noise_seed = derive_seed(config.seed, 2, i, pair);
        e.raw = "raw/" + e.id + ".pfm";
        e.gt_lin = "gt/" + stem + "_lin.pfm";
        e.gt_srgb = "gt/" + stem + "_srgb.png";
        m.entries.push_back(e);
        entry_image.push_back(i);
      }
  }

  parallel_for(m.entries.size(), config.workers, [&](std::size_t n) {
    const DatasetEntry& e = m.entries[n];
    const RawImage clean = mosaic(blur_rgb(truths[entry_image[n]], kernels[static_cast<std::size_t>(e.kernel)]), config.cfa);
    const RawImage noisy = apply_noise(clean, e.noise, e.noise_seed);
    save_image(noisy.plane(), dir / e.raw);
    emit(diag, {{"event", "simulated"}, {"id", e.id}, {"shot", e.noise.shot}, {"read", e.noise.read}});
  });

  save_manifest(m, dir);
  return m;
}

}  // namespace rawrestore
