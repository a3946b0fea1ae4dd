#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "survscore/dataset.hpp"

namespace survscore {

/// Synthetic benchmark cohorts: proportional-hazards event times (Weibull
/// baseline, exponential when shape = 1) with a log-linear hazard in the
/// informative covariates and independent exponential censoring.
struct SynthSpec {
  std::size_t n = 1000;
  std::vector<double> normal_coefs;      // x1..: standard normal covariates
  std::vector<double> binary_coefs;      // z1..: Bernoulli(0.5), coded 0/1
  std::size_t n_noise_normal = 0;        // n1..: standard normal, no effect
  std::size_t n_noise_categorical = 0;   // c1..: labels a/b/c, no effect
  double baseline_rate = 0.1;
  double weibull_shape = 1.0;
  double censor_rate = 0.0; // 0 = no censoring
  std::uint64_t seed = 0;
};

SurvivalDataset generate_synthetic(const SynthSpec& spec);

/// Ground truth (the coefficients the generator used), for sidecar files.
std::string synth_truth_json(const SynthSpec& spec);

} // namespace survscore
