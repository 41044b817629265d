#include "rawrestore/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "rawrestore/error.hpp"

namespace rawrestore {
namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::Config, msg); }

template <typename T>
T get(const YAML::Node& node, const char* key, T fallback) {
  const YAML::Node v = node[key];
  if (!v) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    config_error(std::string("bad value for '") + key + "'");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

void check_map(const YAML::Node& node, const char* key) {
  if (node && !node.IsMap()) config_error(std::string("'") + key + "' must be a mapping");
}

// Misspelled keys would otherwise silently fall back to defaults.
void check_keys(const YAML::Node& node, const std::string& where, std::initializer_list<std::string_view> known) {
  if (!node) return;
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (std::find(known.begin(), known.end(), key) == known.end())
      config_error("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
  }
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Joint: return "joint";
    case Method::TwoStageBilinear: return "twostage-bilinear";
    case Method::TwoStageClassical: return "twostage-classical";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : kAllMethods)
    if (method_name(m) == name) return m;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

std::string_view kernel_source_name(KernelSource s) {
  switch (s) {
    case KernelSource::Generate: return "generate";
    case KernelSource::File: return "file";
    case KernelSource::PsfGrid: return "psf-grid";
  }
  return "?";
}

KernelSource parse_kernel_source(std::string_view name) {
  for (KernelSource s : {KernelSource::Generate, KernelSource::File, KernelSource::PsfGrid})
    if (kernel_source_name(s) == name) return s;
  throw Error(ErrorCode::Config, "unknown kernel source '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  require(kernels.size >= 1 && kernels.size % 2 == 1, ErrorCode::Config, "kernel size must be odd and positive");
  require(kernels.count >= 1, ErrorCode::Config, "kernel count must be >= 1");
  require(kernels.warp.max_angle_deg >= 0.0 && kernels.warp.min_scale > 0.0 &&
              kernels.warp.min_scale <= kernels.warp.max_scale,
          ErrorCode::Config, "invalid kernel warp ranges");
  require(kernels.source == KernelSource::Generate || !kernels.path.empty(), ErrorCode::Config,
          "kernel source needs a path");
  require(noise.samples >= 1, ErrorCode::Config, "noise samples must be >= 1");
  require(noise.sampling.shot_min > 0.0 && noise.sampling.shot_min <= noise.sampling.shot_max, ErrorCode::Config,
          "invalid shot noise range");
  for (double s : noise.shot_levels) require(s >= 0.0, ErrorCode::Config, "shot levels must be >= 0");
  require(!methods.empty(), ErrorCode::Config, "at least one method is required");
  require(schedule.iterations >= 1 && schedule.beta_min > 0.0 && schedule.beta_min <= schedule.beta_max,
          ErrorCode::Config, "invalid schedule");
  require(prior.name == "tv" || prior.name == "tikhonov", ErrorCode::Config, "prior must be 'tv' or 'tikhonov'");
  require(prior.tv_iterations >= 1, ErrorCode::Config, "tv_iterations must be >= 1");
  require(crop >= 0, ErrorCode::Config, "crop must be >= 0");
  require(workers >= 0, ErrorCode::Config, "workers must be >= 0");
  isp.validate();
  tiles.validate();
}

namespace {

ExperimentConfig parse_root(const YAML::Node& root, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  if (root.IsNull()) return cfg;
  if (!root.IsMap()) config_error("config root must be a mapping");
  check_keys(root, "", {"seed", "crop", "workers", "output", "cfa", "inputs", "methods", "kernels", "noise", "isp",
                        "solver", "tiles"});

  cfg.seed = get<std::uint64_t>(root, "seed", cfg.seed);
  cfg.crop = get<int>(root, "crop", cfg.crop);
  cfg.workers = get<int>(root, "workers", cfg.workers);
  if (root["output"]) cfg.output = resolve(base_dir, get<std::string>(root, "output", ""));
  if (root["cfa"]) cfg.cfa = CfaPattern::parse(get<std::string>(root, "cfa", "RGGB"));

  if (const YAML::Node in = root["inputs"]) {
    if (!in.IsSequence()) config_error("'inputs' must be a list");
    for (const auto& n : in) cfg.inputs.push_back(resolve(base_dir, n.as<std::string>()));
  }
  if (const YAML::Node m = root["methods"]) {
    if (!m.IsSequence()) config_error("'methods' must be a list");
    cfg.methods.clear();
    for (const auto& n : m) cfg.methods.push_back(parse_method(n.as<std::string>()));
  }

  const YAML::Node k = root["kernels"];
  check_map(k, "kernels");
  check_keys(k, "kernels", {"source", "count", "size", "path", "max_angle_deg", "min_scale", "max_scale",
                            "independent_warps"});
  if (k) {
    if (k["source"]) cfg.kernels.source = parse_kernel_source(get<std::string>(k, "source", ""));
    cfg.kernels.count = get<int>(k, "count", cfg.kernels.count);
    cfg.kernels.size = get<int>(k, "size", cfg.kernels.size);
    if (k["path"]) cfg.kernels.path = resolve(base_dir, get<std::string>(k, "path", ""));
    cfg.kernels.warp.max_angle_deg = get<double>(k, "max_angle_deg", cfg.kernels.warp.max_angle_deg);
    cfg.kernels.warp.min_scale = get<double>(k, "min_scale", cfg.kernels.warp.min_scale);
    cfg.kernels.warp.max_scale = get<double>(k, "max_scale", cfg.kernels.warp.max_scale);
    cfg.kernels.warp.independent = get<bool>(k, "independent_warps", cfg.kernels.warp.independent);
  }

  const YAML::Node n = root["noise"];
  check_map(n, "noise");
  check_keys(n, "noise", {"shot_levels", "samples", "shot_min", "shot_max", "read_log_slope", "read_log_intercept"});
  if (n) {
    if (const YAML::Node lv = n["shot_levels"]) {
      if (!lv.IsSequence()) config_error("'noise.shot_levels' must be a list");
      for (const auto& v : lv) cfg.noise.shot_levels.push_back(v.as<double>());
    }
    cfg.noise.samples = get<int>(n, "samples", cfg.noise.samples);
    cfg.noise.sampling.shot_min = get<double>(n, "shot_min", cfg.noise.sampling.shot_min);
    cfg.noise.sampling.shot_max = get<double>(n, "shot_max", cfg.noise.sampling.shot_max);
    cfg.noise.sampling.log_slope = get<double>(n, "read_log_slope", cfg.noise.sampling.log_slope);
    cfg.noise.sampling.log_intercept = get<double>(n, "read_log_intercept", cfg.noise.sampling.log_intercept);
  }

  const YAML::Node isp = root["isp"];
  check_map(isp, "isp");
  check_keys(isp, "isp", {"ccm", "wb_gains"});
  if (isp) {
    if (const YAML::Node ccm = isp["ccm"]) {
      if (!ccm.IsSequence() || ccm.size() != 3) config_error("'isp.ccm' must be a 3x3 list");
      for (std::size_t r = 0; r < 3; ++r) {
        if (!ccm[r].IsSequence() || ccm[r].size() != 3) config_error("'isp.ccm' must be a 3x3 list");
        for (std::size_t c = 0; c < 3; ++c) cfg.isp.ccm[r][c] = ccm[r][c].as<double>();
      }
    }
    if (const YAML::Node g = isp["wb_gains"]) {
      if (!g.IsSequence() || g.size() != 3) config_error("'isp.wb_gains' must list 3 gains");
      for (std::size_t c = 0; c < 3; ++c) cfg.isp.wb_gains[c] = g[c].as<double>();
    }
  }

  const YAML::Node s = root["solver"];
  check_map(s, "solver");
  check_keys(s, "solver", {"iterations", "beta_min", "beta_max", "lambda", "lambda_scale", "lambda_floor", "prior",
                           "tv_iterations", "color_basis"});
  if (s) {
    cfg.schedule.iterations = get<int>(s, "iterations", cfg.schedule.iterations);
    cfg.schedule.beta_min = get<double>(s, "beta_min", cfg.schedule.beta_min);
    cfg.schedule.beta_max = get<double>(s, "beta_max", cfg.schedule.beta_max);
    if (s["lambda"]) cfg.schedule.lambda = get<double>(s, "lambda", 0.0);
    cfg.schedule.lambda_scale = get<double>(s, "lambda_scale", cfg.schedule.lambda_scale);
    cfg.schedule.lambda_floor = get<double>(s, "lambda_floor", cfg.schedule.lambda_floor);
    cfg.prior.name = get<std::string>(s, "prior", cfg.prior.name);
    cfg.prior.tv_iterations = get<int>(s, "tv_iterations", cfg.prior.tv_iterations);
    if (s["color_basis"]) cfg.prior.basis = parse_color_basis(get<std::string>(s, "color_basis", ""));
  }

  const YAML::Node t = root["tiles"];
  check_map(t, "tiles");
  check_keys(t, "tiles", {"tile_size", "overlap"});
  if (t) {
    cfg.tiles.tile_size = get<int>(t, "tile_size", cfg.tiles.tile_size);
    cfg.tiles.overlap = get<int>(t, "overlap", cfg.tiles.overlap);
  }
  return cfg;
}

}  // namespace

ExperimentConfig parse_config(std::string_view yaml_text, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  try {
    cfg = parse_root(YAML::Load(std::string(yaml_text)), base_dir);
  } catch (const YAML::Exception& e) {
    config_error(std::string("malformed config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    config_error(e.what());
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    config_error(e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string dump_config(const ExperimentConfig& cfg) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "seed" << YAML::Value << cfg.seed;
  out << YAML::Key << "crop" << YAML::Value << cfg.crop;
  out << YAML::Key << "workers" << YAML::Value << cfg.workers;
  out << YAML::Key << "output" << YAML::Value << cfg.output.string();
  out << YAML::Key << "cfa" << YAML::Value << std::string(cfg.cfa.name_string());
  out << YAML::Key << "inputs" << YAML::Value << YAML::BeginSeq;
  for (const auto& p : cfg.inputs) out << p.string();
  out << YAML::EndSeq;
  out << YAML::Key << "methods" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (Method m : cfg.methods) out << std::string(method_name(m));
  out << YAML::EndSeq;

  out << YAML::Key << "kernels" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "source" << YAML::Value << std::string(kernel_source_name(cfg.kernels.source));
  out << YAML::Key << "count" << YAML::Value << cfg.kernels.count;
  out << YAML::Key << "size" << YAML::Value << cfg.kernels.size;
  if (!cfg.kernels.path.empty()) out << YAML::Key << "path" << YAML::Value << cfg.kernels.path.string();
  out << YAML::Key << "max_angle_deg" << YAML::Value << cfg.kernels.warp.max_angle_deg;
  out << YAML::Key << "min_scale" << YAML::Value << cfg.kernels.warp.min_scale;
  out << YAML::Key << "max_scale" << YAML::Value << cfg.kernels.warp.max_scale;
  out << YAML::Key << "independent_warps" << YAML::Value << cfg.kernels.warp.independent;
  out << YAML::EndMap;

  out << YAML::Key << "noise" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "shot_levels" << YAML::Value << YAML::Flow << cfg.noise.shot_levels;
  out << YAML::Key << "samples" << YAML::Value << cfg.noise.samples;
  out << YAML::Key << "shot_min" << YAML::Value << cfg.noise.sampling.shot_min;
  out << YAML::Key << "shot_max" << YAML::Value << cfg.noise.sampling.shot_max;
  out << YAML::Key << "read_log_slope" << YAML::Value << cfg.noise.sampling.log_slope;
  out << YAML::Key << "read_log_intercept" << YAML::Value << cfg.noise.sampling.log_intercept;
  out << YAML::EndMap;

  out << YAML::Key << "isp" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "ccm" << YAML::Value << YAML::BeginSeq;
  for (const auto& row : cfg.isp.ccm) out << YAML::Flow << std::vector<double>(row.begin(), row.end());
  out << YAML::EndSeq;
  out << YAML::Key << "wb_gains" << YAML::Value << YAML::Flow
      << std::vector<double>(cfg.isp.wb_gains.begin(), cfg.isp.wb_gains.end());
  out << YAML::EndMap;

  out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "iterations" << YAML::Value << cfg.schedule.iterations;
  out << YAML::Key << "beta_min" << YAML::Value << cfg.schedule.beta_min;
  out << YAML::Key << "beta_max" << YAML::Value << cfg.schedule.beta_max;
  if (cfg.schedule.lambda) out << YAML::Key << "lambda" << YAML::Value << *cfg.schedule.lambda;
  out << YAML::Key << "lambda_scale" << YAML::Value << cfg.schedule.lambda_scale;
  out << YAML::Key << "lambda_floor" << YAML::Value << cfg.schedule.lambda_floor;
  out << YAML::Key << "prior" << YAML::Value << cfg.prior.name;
  out << YAML::Key << "tv_iterations" << YAML::Value << cfg.prior.tv_iterations;
  out << YAML::Key << "color_basis" << YAML::Value << std::string(color_basis_name(cfg.prior.basis));
  out << YAML::EndMap;

  out << YAML::Key << "tiles" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "tile_size" << YAML::Value << cfg.tiles.tile_size;
  out << YAML::Key << "overlap" << YAML::Value << cfg.tiles.overlap;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  // splitmix64 finalizer folded over the inputs
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(base);
  for (std::uint64_t v : {a, b, c}) h = mix(h ^ v);
  return h;
}

}  // namespace rawrestore
