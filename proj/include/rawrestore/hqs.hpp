#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "rawrestore/image.hpp"
#include "rawrestore/isp.hpp"
#include "rawrestore/kernel.hpp"
#include "rawrestore/prox.hpp"

namespace rawrestore {

inline constexpr int kDefaultIterations = 6;

struct HqsSchedule {
  double lambda = 0.0;
  std::vector<double> betas;
  std::vector<double> gammas;  // lambda / beta

  int iterations() const noexcept { return static_cast<int>(betas.size()); }
  void validate() const;
};

struct ScheduleParams {
  int iterations = kDefaultIterations;
  double beta_min = 1e-4;
  double beta_max = 1.0;
  // Prior weight; defaults to lambda_scale * (shot + read) + lambda_floor.
  std::optional<double> lambda;
  double lambda_scale = 0.2;
  double lambda_floor = 1e-6;
};

double default_lambda(const NoiseParams& noise, const ScheduleParams& params = {});

// Betas log-spaced ascending from beta_min to beta_max; gammas = lambda / beta.
HqsSchedule make_schedule(const NoiseParams& noise, const ScheduleParams& params = {});
HqsSchedule make_schedule(const NoiseParams& noise, int iterations, double lambda, double beta_min, double beta_max);
HqsSchedule constant_schedule(int iterations, double beta, double lambda);

struct JointProblem {
  RawImage y;
  RgbKernel kernel;
  HqsSchedule schedule;

  void validate() const;
};

struct HalfStep {
  enum class Kind { ZStep, Prox };
  int iteration;
  Kind kind;
  double beta;
  double gamma;
  double objective;  // NaN unless objective tracking is on
};

struct HqsOptions {
  bool track_objective = false;
  std::function<void(const HalfStep&)> observer;
};

struct HqsResult {
  RgbImage x;
  RgbImage z;
  std::vector<HalfStep> trace;
};

// 0.5 ||y - M K z||^2 + beta/2 ||z - x||^2 + lambda Omega(x).
double joint_objective(const RawImage& y, const RgbKernel& kernel, const RgbImage& z, const RgbImage& x, double beta,
                       double lambda, const ProxOperator& prox);
// Same with M = I and the demosaicked image d as observation.
double plain_objective(const RgbImage& d, const RgbKernel& kernel, const RgbImage& z, const RgbImage& x, double beta,
                       double lambda, const ProxOperator& prox);

// Alternates z <- mosaic z-step(y, x, beta_t), x <- prox(z, gamma_t), from x = init.
HqsResult hqs_restore_joint(const JointProblem& problem, const ProxOperator& prox, const RgbImage& init,
                            const HqsOptions& options = {});

// Demosaicks y into d, then alternates the plain z-step on d with the prox, from x = d.
HqsResult hqs_restore_twostage(const RawImage& y, const RgbKernel& kernel, const HqsSchedule& schedule,
                               const ProxOperator& prox, DemosaicMethod demosaicker,
                               const HqsOptions& options = {});

}  // namespace rawrestore
