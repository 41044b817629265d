#include "rawrestore/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "rawrestore/error.hpp"
#include "rawrestore/image_io.hpp"
#include "rawrestore/parallel.hpp"
#include "rawrestore/tiling.hpp"

namespace rawrestore {

using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

void emit(const DiagnosticSink& diag, const json& j) {
  if (diag) diag(j.dump());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
}

std::string fmt(double v, int digits = 6) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? std::numeric_limits<double>::quiet_NaN() : s / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

PsfRestoreOptions restore_options(const ExperimentConfig& config, NoiseParams noise) {
  PsfRestoreOptions o;
  o.noise = noise;
  o.schedule = config.schedule;
  o.prior = config.prior.name;
  o.tv_iterations = config.prior.tv_iterations;
  o.basis = config.prior.basis;
  o.workers = config.workers;
  return o;
}

json schedule_json(const ScheduleParams& s) {
  json j = {{"iterations", s.iterations},
            {"beta_min", s.beta_min},
            {"beta_max", s.beta_max},
            {"lambda_scale", s.lambda_scale},
            {"lambda_floor", s.lambda_floor}};
  if (s.lambda) j["lambda"] = *s.lambda;
  return j;
}

json metric_json(const MetricReport& m) { return {{"psnr", m.psnr}, {"ssim", m.ssim}, {"crop", m.border_crop}}; }

}  // namespace

RgbImage restore_entry(const ExperimentConfig& config, const std::filesystem::path& dataset_dir,
                       const Manifest& manifest, const DatasetEntry& entry, Method method,
                       const DiagnosticSink& diag) {
  const CfaPattern cfa = CfaPattern::parse(manifest.cfa);
  const ImagePlane plane = load_plane(dataset_dir / entry.raw);
  const RawImage y(plane, cfa, entry.noise);
  const RgbKernel kernel = load_rgb_kernel(dataset_dir / manifest.kernels.at(static_cast<std::size_t>(entry.kernel)).file);
  const HqsSchedule schedule = make_schedule(entry.noise, config.schedule);
  const auto prox = make_prox(config.prior.name, config.prior.tv_iterations, config.prior.basis);

  HqsOptions opts;
  if (diag) {
    opts.track_objective = true;
    opts.observer = [&](const HalfStep& s) {
      json j = {{"event", "half_step"},
                {"id", entry.id},
                {"method", method_name(method)},
                {"iteration", s.iteration},
                {"step", s.kind == HalfStep::Kind::ZStep ? "z" : "prox"},
                {"beta", s.beta},
                {"gamma", s.gamma}};
      if (std::isfinite(s.objective)) j["objective"] = s.objective;
      emit(diag, j);
    };
  }
  switch (method) {
    case Method::Joint: {
      JointProblem problem{y, kernel, schedule};
      return hqs_restore_joint(problem, *prox, demosaic_bilinear(y), opts).x;
    }
    case Method::TwoStageBilinear:
      return hqs_restore_twostage(y, kernel, schedule, *prox, DemosaicMethod::Bilinear, opts).x;
    case Method::TwoStageClassical:
      return hqs_restore_twostage(y, kernel, schedule, *prox, DemosaicMethod::Classical, opts).x;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method");
}

RestoreReport cmd_restore(const ExperimentConfig& config, const std::filesystem::path& dataset_dir,
                          const DiagnosticSink& diag) {
  config.validate();
  const Manifest manifest = load_manifest(dataset_dir);
  const std::size_t n_methods = config.methods.size();
  const std::size_t jobs = manifest.entries.size() * n_methods;

  RestoreReport report;
  report.dataset_fingerprint = manifest.fingerprint();
  report.records.resize(jobs);

  parallel_for(jobs, config.workers, [&](std::size_t job) {
    const DatasetEntry& e = manifest.entries[job / n_methods];
    const Method method = config.methods[job % n_methods];
    const auto start = Clock::now();
    const RgbImage x = restore_entry(config, dataset_dir, manifest, e, method, diag);
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();

    const RgbImage truth = load_rgb(dataset_dir / e.gt_lin, ColorSpace::LinRgb);
    const RgbImage x_srgb = linrgb_to_srgb(x, manifest.isp);
    const std::filesystem::path out = config.output / "restored" / std::string(method_name(method));
    std::filesystem::create_directories(out);
    save_image(x, out / (e.id + ".pfm"));
    save_image(x_srgb, out / (e.id + ".png"));

    RestoreRecord& r = report.records[job];
    r.id = e.id;
    r.method = method;
    r.lin = evaluate(x, truth, config.crop);
    r.srgb = evaluate(x_srgb, linrgb_to_srgb(truth, manifest.isp), config.crop);
    r.seconds = seconds;
    emit(diag, {{"event", "restored"},
                {"id", e.id},
                {"method", method_name(method)},
                {"linRGB", metric_json(r.lin)},
                {"sRGB", metric_json(r.srgb)},
                {"seconds", seconds}});
  });

  write_text(config.output / "restore_report.csv", records_csv(report));
  return report;
}

GeneratedKernel cmd_gen_kernel(int size, std::uint64_t seed, const WarpRanges& ranges,
                               const std::filesystem::path& out_dir) {
  const GeneratedKernel g = generate_kernel(size, seed, ranges);
  std::filesystem::create_directories(out_dir);
  save_rgb_kernel(g.draw.kernel, out_dir / "kernel.pfm");
  const json meta = {{"size", size},
                     {"seed", seed},
                     {"channels", {"R", "G", "B"}},
                     {"angles_deg", {{"R", g.draw.angles_deg[0]}, {"G", g.draw.angles_deg[1]}, {"B", 0.0}}},
                     {"scales", {{"R", g.draw.scales[0]}, {"G", g.draw.scales[1]}, {"B", 1.0}}},
                     {"max_angle_deg", ranges.max_angle_deg},
                     {"scale_range", {ranges.min_scale, ranges.max_scale}},
                     {"independent_warps", ranges.independent}};
  write_text(out_dir / "kernel.json", meta.dump(2) + "\n");
  return g;
}

RgbImage cmd_psf_restore(const ExperimentConfig& config, const PsfRestoreRequest& request,
                         const DiagnosticSink& diag) {
  config.validate();
  std::filesystem::path grid_dir = request.psf_grid;
  if (grid_dir.empty() && config.kernels.source == KernelSource::PsfGrid) grid_dir = config.kernels.path;
  require(!grid_dir.empty(), ErrorCode::Config, "no PSF grid given");
  std::vector<std::string> warnings;
  const PsfGrid grid = load_psf_grid(grid_dir, &warnings);
  for (const auto& w : warnings) emit(diag, {{"event", "warning"}, {"message", w}});

  NoiseParams noise;
  if (request.noise) {
    noise = *request.noise;
  } else if (!config.noise.shot_levels.empty()) {
    const double shot = config.noise.shot_levels.front();
    noise = {shot, shot > 0.0 ? read_noise_for(shot, config.noise.sampling) : 0.0};
  }
  noise.validate();

  const LoadedImage loaded = load_image(request.input);
  RawImage raw(ImagePlane(2, 2), config.cfa, noise);
  if (const auto* plane = std::get_if<ImagePlane>(&loaded)) {
    require(plane->height() % 2 == 0 && plane->width() % 2 == 0, ErrorCode::DimensionMismatch,
            "raw input must have even dimensions");
    raw = RawImage(*plane, config.cfa, noise);
  } else {
    RgbImage img = std::get<RgbImage>(loaded);
    if (img.color_space() == ColorSpace::Srgb) img = srgb_to_linrgb(img, config.isp);
    const int h = img.height() & ~1, w = img.width() & ~1;
    require(h >= 2 && w >= 2, ErrorCode::DimensionMismatch, "input image too small");
    raw = RawImage(mosaic(crop(img, 0, 0, h, w), config.cfa).plane(), config.cfa, noise);
  }
  const TileLayout needed(grid.geometry, raw.height(), raw.width());
  require(grid.rows >= needed.rows() && grid.cols >= needed.cols(), ErrorCode::DimensionMismatch,
          "PSF grid " + std::to_string(grid.rows) + "x" + std::to_string(grid.cols) + " does not cover a " +
              std::to_string(raw.height()) + "x" + std::to_string(raw.width()) + " image");

  const auto start = Clock::now();
  const RgbImage x = psf_restore(raw, grid, restore_options(config, noise));
  emit(diag, {{"event", "psf_restored"},
              {"tiles", grid.rows * grid.cols},
              {"seconds", std::chrono::duration<double>(Clock::now() - start).count()}});

  const std::filesystem::path out = request.output.empty() ? config.output : request.output;
  std::filesystem::create_directories(out);
  save_image(x, out / "restored.pfm");
  save_image(linrgb_to_srgb(x, config.isp), out / "restored.png");
  return x;
}

std::vector<MethodSummary> summarize(const RestoreReport& report, const std::vector<Method>& methods) {
  std::vector<MethodSummary> out;
  for (const char* space : {"linRGB", "sRGB"}) {
    const bool lin = std::string_view(space) == "linRGB";
    double joint_mean = std::numeric_limits<double>::quiet_NaN();
    std::vector<MethodSummary> rows;
    for (Method m : methods) {
      std::vector<double> p, s;
      for (const auto& r : report.records)
        if (r.method == m) {
          p.push_back(lin ? r.lin.psnr : r.srgb.psnr);
          s.push_back(lin ? r.lin.ssim : r.srgb.ssim);
        }
      MethodSummary row{m, space, mean(p), median(p), mean(s), median(s), 0.0};
      if (m == Method::Joint) joint_mean = row.mean_psnr;
      rows.push_back(row);
    }
    for (auto& row : rows) row.gap_vs_joint = joint_mean - row.mean_psnr;
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

std::string records_csv(const RestoreReport& report) {
  std::ostringstream os;
  os << "id,method,crop,psnr_linrgb,ssim_linrgb,psnr_srgb,ssim_srgb\n";
  for (const auto& r : report.records)
    os << r.id << ',' << method_name(r.method) << ',' << r.lin.border_crop << ',' << fmt(r.lin.psnr) << ','
       << fmt(r.lin.ssim) << ',' << fmt(r.srgb.psnr) << ',' << fmt(r.srgb.ssim) << '\n';
  return os.str();
}

std::string summary_csv(const std::vector<MethodSummary>& summary) {
  std::ostringstream os;
  os << "method,space,mean_psnr,median_psnr,mean_ssim,median_ssim,joint_gap_db\n";
  for (const auto& s : summary)
    os << method_name(s.method) << ',' << s.space << ',' << fmt(s.mean_psnr) << ',' << fmt(s.median_psnr) << ','
       << fmt(s.mean_ssim) << ',' << fmt(s.median_ssim) << ',' << fmt(s.gap_vs_joint) << '\n';
  return os.str();
}

BenchReport cmd_bench(const ExperimentConfig& config, const DiagnosticSink& diag) {
  config.validate();
  const auto start = Clock::now();
  ExperimentConfig sim = config;
  sim.output = config.output / "dataset";
  const Manifest manifest = cmd_simulate(sim, diag);

  BenchReport bench;
  bench.restore = cmd_restore(config, sim.output, diag);
  require(bench.restore.dataset_fingerprint == manifest.fingerprint(), ErrorCode::MissingData,
          "dataset changed while benchmarking");
  bench.summary = summarize(bench.restore, config.methods);
  bench.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();

  write_text(config.output / "bench_images.csv", records_csv(bench.restore));
  write_text(config.output / "bench_summary.csv", summary_csv(bench.summary));

  json summary = json::array();
  for (const auto& s : bench.summary)
    summary.push_back({{"method", method_name(s.method)},
                       {"space", s.space},
                       {"mean_psnr", s.mean_psnr},
                       {"median_psnr", s.median_psnr},
                       {"mean_ssim", s.mean_ssim},
                       {"median_ssim", s.median_ssim},
                       {"joint_gap_db", std::isfinite(s.gap_vs_joint) ? json(s.gap_vs_joint) : json(nullptr)}});
  json records = json::array();
  for (const auto& r : bench.restore.records)
    records.push_back({{"id", r.id},
                       {"method", method_name(r.method)},
                       {"linRGB", metric_json(r.lin)},
                       {"sRGB", metric_json(r.srgb)},
                       {"seconds", r.seconds}});
  json methods = json::array();
  for (Method m : config.methods) methods.push_back(method_name(m));
  const json meta = {{"seed", config.seed},
                     {"dataset_fingerprint", manifest.fingerprint()},
                     {"images", config.inputs.size()},
                     {"kernels", manifest.kernels.size()},
                     {"entries", manifest.entries.size()},
                     {"methods", methods},
                     {"schedule", schedule_json(config.schedule)},
                     {"prior",
                      {{"name", config.prior.name},
                       {"tv_iterations", config.prior.tv_iterations},
                       {"color_basis", color_basis_name(config.prior.basis)}}},
                     {"ssim_window", {{"size", SsimWindow{}.size}, {"sigma", SsimWindow{}.sigma}}},
                     {"crop", config.crop},
                     {"wall_seconds", bench.wall_seconds},
                     {"summary", summary},
                     {"records", records}};
  write_text(config.output / "bench.json", meta.dump(2) + "\n");
  return bench;
}

}  // namespace rawrestore
