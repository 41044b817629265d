#include <algorithm>
#include <cmath>
#include <random>

#include "rawrestore/error.hpp"
#include "rawrestore/isp.hpp"

namespace rawrestore {

void NoiseParams::validate() const {
  require(shot >= 0.0 && read >= 0.0, ErrorCode::InvalidArgument, "noise parameters must be non-negative");
}

double read_noise_for(double shot, const NoiseSampling& sampling) {
  require(shot > 0.0, ErrorCode::InvalidArgument, "shot noise weight must be positive");
  return std::exp(sampling.log_slope * std::log(shot) + sampling.log_intercept);
}

NoiseParams sample_noise_params(std::uint64_t seed, const NoiseSampling& sampling) {
  require(0.0 < sampling.shot_min && sampling.shot_min <= sampling.shot_max, ErrorCode::InvalidArgument,
          "invalid shot noise range");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(std::log(sampling.shot_min), std::log(sampling.shot_max));
  const double shot = std::clamp(std::exp(u(rng)), sampling.shot_min, sampling.shot_max);
  return {shot, read_noise_for(shot, sampling)};
}

RawImage apply_noise(const RawImage& raw, const NoiseParams& params, std::uint64_t seed) {
  params.validate();
  RawImage out(raw.plane(), raw.cfa(), params);
  if (params.shot == 0.0 && params.read == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& v : out.plane().data()) {
    const double variance = params.shot * std::max(v, 0.0) + params.read;
    v += std::sqrt(variance) * gauss(rng);
  }
  return out;
}

}  // namespace rawrestore
