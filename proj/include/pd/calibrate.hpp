#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pd/noise_model.hpp"

namespace pd {

// Max black cluster size of `replicates` pure-noise lattices thresholded at
// theta. Replicate r always uses the seed derived from (seed, r), so results
// are identical for any thread count and any replicate ordering.
std::vector<int> simulate_null_max_clusters(int width, int height, const NoiseModel& model,
                                            double theta, int replicates, std::uint64_t seed,
                                            unsigned threads = 0);

// Detection cutoff from null samples: take the empirical (1 - alpha) quantile
// q (order statistic ceil((1-alpha)*R), 1-based), stretch it by the safety
// margin, and demand strictly more: phi = ceil(margin * q) + 1, floored at 1.
int phi_from_quantile(const std::vector<int>& samples, double alpha, double margin = 1.3);

struct CalibrationResult {
  int width = 0;
  int height = 0;
  std::string model;  // noise descriptor, e.g. "gaussian(sigma=1.8)"
  double theta = 0.5;
  double alpha = 0.05;
  int replicates = 0;
  std::uint64_t seed = 0;
  double margin = 1.3;
  std::vector<int> samples;  // per-replicate null maxima, replicate order
  int phi = 1;
};

// Run (or reload) the null simulation and derive phi. When cache_dir is set,
// samples are cached keyed by everything that determines them (dimensions,
// noise model, theta, replicates, seed); alpha and margin are applied after
// loading, so one cached run serves any confidence level.
CalibrationResult calibrate(int width, int height, const NoiseModel& model, double theta,
                            double alpha, int replicates, std::uint64_t seed,
                            double margin = 1.3,
                            const std::optional<std::filesystem::path>& cache_dir = std::nullopt,
                            unsigned threads = 0);

}  // namespace pd
