#include "rawrestore/hqs.hpp"

#include <cmath>
#include <limits>

#include "rawrestore/convolution.hpp"
#include "rawrestore/error.hpp"
#include "rawrestore/zstep.hpp"

namespace rawrestore {
namespace {

double squared_distance(const RgbImage& a, const RgbImage& b) {
  double s = 0.0;
  for (int ch = 0; ch < 3; ++ch) {
    auto da = a[ch].data();
    auto db = b[ch].data();
    for (std::size_t i = 0; i < da.size(); ++i) s += (da[i] - db[i]) * (da[i] - db[i]);
  }
  return s;
}

void emit(std::vector<HalfStep>& trace, const HqsOptions& options, HalfStep step) {
  trace.push_back(step);
  if (options.observer) options.observer(step);
}

}  // namespace

void HqsSchedule::validate() const {
  require(!betas.empty() && betas.size() == gammas.size(), ErrorCode::InvalidArgument,
          "schedule needs T >= 1 matching beta and gamma weights");
  for (std::size_t t = 0; t < betas.size(); ++t) {
    require(betas[t] > 0.0 && gammas[t] > 0.0, ErrorCode::InvalidArgument, "schedule weights must be positive");
    require(std::abs(gammas[t] * betas[t] - lambda) <= 1e-9 * std::max(1.0, lambda), ErrorCode::InvalidArgument,
            "schedule weights must satisfy gamma * beta = lambda");
  }
}

double default_lambda(const NoiseParams& noise, const ScheduleParams& params) {
  return params.lambda.value_or(params.lambda_scale * (noise.shot + noise.read) + params.lambda_floor);
}

HqsSchedule make_schedule(const NoiseParams& noise, int iterations, double lambda, double beta_min,
                          double beta_max) {
  require(iterations >= 1, ErrorCode::InvalidArgument, "schedule needs at least one iteration");
  require(0.0 < beta_min && beta_min <= beta_max, ErrorCode::InvalidArgument,
          "schedule needs 0 < beta_min <= beta_max");
  require(lambda > 0.0, ErrorCode::InvalidArgument, "prior weight lambda must be positive");
  noise.validate();
  HqsSchedule s;
  s.lambda = lambda;
  const double lo = std::log(beta_min);
  const double hi = std::log(beta_max);
  for (int t = 0; t < iterations; ++t) {
    const double beta = iterations == 1 ? beta_min : std::exp(lo + (hi - lo) * t / (iterations - 1));
    s.betas.push_back(beta);
    s.gammas.push_back(lambda / beta);
  }
  s.validate();
  return s;
}

HqsSchedule make_schedule(const NoiseParams& noise, const ScheduleParams& params) {
  return make_schedule(noise, params.iterations, default_lambda(noise, params), params.beta_min, params.beta_max);
}

HqsSchedule constant_schedule(int iterations, double beta, double lambda) {
  return make_schedule(NoiseParams{}, iterations, lambda, beta, beta);
}

void JointProblem::validate() const {
  schedule.validate();
  require(kernel.height() <= y.height() && kernel.width() <= y.width(), ErrorCode::DimensionMismatch,
          "kernel is larger than the raw image");
}

double joint_objective(const RawImage& y, const RgbKernel& kernel, const RgbImage& z, const RgbImage& x, double beta,
                       double lambda, const ProxOperator& prox) {
  const RgbImage kz = blur_rgb(z, kernel);
  double data = 0.0;
  for (int r = 0; r < y.height(); ++r)
    for (int c = 0; c < y.width(); ++c) {
      const double d = y.plane()(r, c) - kz[y.cfa().channel_at(r, c)](r, c);
      data += d * d;
    }
  return 0.5 * data + 0.5 * beta * squared_distance(z, x) + lambda * prox.prior(x);
}

double plain_objective(const RgbImage& d, const RgbKernel& kernel, const RgbImage& z, const RgbImage& x, double beta,
                       double lambda, const ProxOperator& prox) {
  return 0.5 * squared_distance(d, blur_rgb(z, kernel)) + 0.5 * beta * squared_distance(z, x) +
         lambda * prox.prior(x);
}

HqsResult hqs_restore_joint(const JointProblem& problem, const ProxOperator& prox, const RgbImage& init,
                            const HqsOptions& options) {
  problem.validate();
  require(init.height() == problem.y.height() && init.width() == problem.y.width(), ErrorCode::DimensionMismatch,
          "initial estimate does not match the raw image size");
  const HqsSchedule& s = problem.schedule;
  const MosaicZSolver solver(problem.y, problem.kernel);
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  HqsResult result{init, init, {}};
  result.x.set_color_space(ColorSpace::LinRgb);
  for (int t = 0; t < s.iterations(); ++t) {
    const double beta = s.betas[static_cast<std::size_t>(t)];
    const double gamma = s.gammas[static_cast<std::size_t>(t)];
    result.z = solver.solve(result.x, beta).z;
    emit(result.trace, options,
         {t, HalfStep::Kind::ZStep, beta, gamma,
          options.track_objective
              ? joint_objective(problem.y, problem.kernel, result.z, result.x, beta, s.lambda, prox)
              : kNaN});
    result.x = prox.evaluate(result.z, gamma);
    emit(result.trace, options,
         {t, HalfStep::Kind::Prox, beta, gamma,
          options.track_objective
              ? joint_objective(problem.y, problem.kernel, result.z, result.x, beta, s.lambda, prox)
              : kNaN});
  }
  return result;
}

HqsResult hqs_restore_twostage(const RawImage& y, const RgbKernel& kernel, const HqsSchedule& schedule,
                               const ProxOperator& prox, DemosaicMethod demosaicker, const HqsOptions& options) {
  schedule.validate();
  const RgbImage d = demosaic(y, demosaicker);
  const PlainZSolver solver(d, kernel);
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  HqsResult result{d, d, {}};
  for (int t = 0; t < schedule.iterations(); ++t) {
    const double beta = schedule.betas[static_cast<std::size_t>(t)];
    const double gamma = schedule.gammas[static_cast<std::size_t>(t)];
    result.z = solver.solve(result.x, beta);
    emit(result.trace, options,
         {t, HalfStep::Kind::ZStep, beta, gamma,
          options.track_objective ? plain_objective(d, kernel, result.z, result.x, beta, schedule.lambda, prox)
                                  : kNaN});
    result.x = prox.evaluate(result.z, gamma);
    emit(result.trace, options,
         {t, HalfStep::Kind::Prox, beta, gamma,
          options.track_objective ? plain_objective(d, kernel, result.z, result.x, beta, schedule.lambda, prox)
                                  : kNaN});
  }
  return result;
}

}  // namespace rawrestore
