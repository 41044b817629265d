// rawrestore command-line front end.
#include <cstdio>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rawrestore/commands.hpp"
#include "rawrestore/error.hpp"

namespace {

using namespace rawrestore;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> methods;
  std::optional<int> crop;
  std::string out;
  std::optional<int> workers;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "YAML experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "experiment seed");
  cmd->add_option("--method", f.methods, "joint, twostage-bilinear or twostage-classical (repeatable)")
      ->delimiter(',');
  cmd->add_option("--crop", f.crop, "metric border crop in pixels");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--workers", f.workers, "worker threads (0: all cores)");
  cmd->add_flag("--verbose", f.verbose, "JSON-lines diagnostics on stdout");
}

ExperimentConfig build_config(const CommonFlags& f) {
  ExperimentConfig cfg = f.config.empty() ? ExperimentConfig() : load_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (!f.methods.empty()) {
    cfg.methods.clear();
    for (const auto& m : f.methods) cfg.methods.push_back(parse_method(m));
  }
  if (f.crop) cfg.crop = *f.crop;
  if (!f.out.empty()) cfg.output = f.out;
  if (f.workers) cfg.workers = *f.workers;
  cfg.validate();
  return cfg;
}

DiagnosticSink make_sink(bool verbose) {
  if (!verbose) return {};
  auto mutex = std::make_shared<std::mutex>();
  return [mutex](const std::string& line) {
    std::lock_guard lock(*mutex);
    std::cout << line << '\n' << std::flush;
  };
}

void print_summary(const std::vector<MethodSummary>& summary, bool verbose) {
  if (verbose) {
    for (const auto& s : summary)
      std::cout << nlohmann::ordered_json{{"event", "summary"},
                                          {"method", method_name(s.method)},
                                          {"space", s.space},
                                          {"mean_psnr", s.mean_psnr},
                                          {"mean_ssim", s.mean_ssim}}
                       .dump()
                << '\n';
    return;
  }
  std::cout << summary_csv(summary);
}

int fail(std::string_view code, const std::string& message) {
  std::string line = message;
  for (char& c : line)
    if (c == '\n' || c == '\r') c = ' ';
  std::cerr << "error " << code << ": " << line << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint deblurring, demosaicking and denoising of raw images"};
  app.require_subcommand(1);

  CommonFlags sim_f, res_f, gen_f, psf_f, bench_f;

  auto* sim = app.add_subcommand("simulate", "synthesize a blurred, mosaicked, noisy dataset");
  add_common(sim, sim_f);
  std::vector<std::string> sim_inputs;
  sim->add_option("--input", sim_inputs, "input sRGB images (added to the config's list)");

  auto* res = app.add_subcommand("restore", "restore a simulated dataset and report metrics");
  add_common(res, res_f);
  std::string dataset;
  res->add_option("--dataset", dataset, "dataset directory holding manifest.json")->required();

  auto* gen = app.add_subcommand("gen-kernel", "generate a color-specific RGB blur kernel");
  add_common(gen, gen_f);
  int kernel_size = kDefaultKernelSize;
  gen->add_option("--size", kernel_size, "odd kernel size")->capture_default_str();

  auto* psf = app.add_subcommand("psf-restore", "tile-wise restoration with a PSF grid");
  add_common(psf, psf_f);
  std::string psf_input, psf_grid;
  std::optional<double> psf_shot;
  psf->add_option("--input", psf_input, "sRGB PNG, linRGB PFM or single-plane raw PFM")->required();
  psf->add_option("--psf-grid", psf_grid, "PSF grid directory");
  psf->add_option("--shot", psf_shot, "shot noise weight of the input; read weight follows from it");

  auto* bench = app.add_subcommand("bench", "simulate, restore with every method and summarize");
  add_common(bench, bench_f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("E_USAGE", e.what());
  }

  try {
    if (*sim) {
      ExperimentConfig cfg = build_config(sim_f);
      for (const auto& p : sim_inputs) cfg.inputs.emplace_back(p);
      const Manifest m = cmd_simulate(cfg, make_sink(sim_f.verbose));
      std::cout << "simulated " << m.entries.size() << " observations into " << cfg.output.string() << '\n';
    } else if (*res) {
      const ExperimentConfig cfg = build_config(res_f);
      const RestoreReport r = cmd_restore(cfg, dataset, make_sink(res_f.verbose));
      print_summary(summarize(r, cfg.methods), res_f.verbose);
    } else if (*gen) {
      const ExperimentConfig cfg = build_config(gen_f);
      const GeneratedKernel g = cmd_gen_kernel(kernel_size, cfg.seed, cfg.kernels.warp, cfg.output);
      std::cout << "kernel " << kernel_size << "x" << kernel_size << " seed " << g.seed << " -> "
                << (cfg.output / "kernel.pfm").string() << '\n';
    } else if (*psf) {
      const ExperimentConfig cfg = build_config(psf_f);
      PsfRestoreRequest req{psf_input, psf_grid, cfg.output, std::nullopt};
      if (psf_shot) req.noise = NoiseParams{*psf_shot, *psf_shot > 0.0 ? read_noise_for(*psf_shot) : 0.0};
      cmd_psf_restore(cfg, req, make_sink(psf_f.verbose));
      std::cout << "wrote " << (cfg.output / "restored.png").string() << '\n';
    } else if (*bench) {
      const ExperimentConfig cfg = build_config(bench_f);
      const BenchReport b = cmd_bench(cfg, make_sink(bench_f.verbose));
      print_summary(b.summary, bench_f.verbose);
    }
  } catch (const Error& e) {
    return fail(error_code_name(e.code()), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(error_code_name(ErrorCode::Io), e.what());
  } catch (const std::exception& e) {
    return fail("E_INTERNAL", e.what());
  }
  return 0;
}
