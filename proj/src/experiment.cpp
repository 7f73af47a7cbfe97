#include "pd/experiment.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pd/cluster.hpp"
#include "pd/parallel.hpp"
#include "pd/rng.hpp"
#include "pd/threshold.hpp"

namespace pd {

BinaryImage make_square_object(int width, int height, int side, int row, int col) {
  BinaryImage img(width, height);
  if (side < 1) throw std::invalid_argument("make_square_object: side must be at least 1");
  if (row < 0 || col < 0 || row + side > height || col + side > width)
    throw std::invalid_argument("make_square_object: square does not fit inside the lattice");
  for (int r = row; r < row + side; ++r)
    for (int c = col; c < col + side; ++c) img.at(r, c) = 1;
  return img;
}

GrayImage add_noise(const BinaryImage& truth, const NoiseModel& model, std::uint64_t seed) {
  GrayImage out(truth.width, truth.height);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < truth.bits.size(); ++i)
    out.values[i] = static_cast<double>(truth.bits[i]) + model.draw(rng);
  return out;
}

WilsonInterval wilson_interval(int successes, int trials, double z) {
  if (trials < 1) throw std::invalid_argument("wilson_interval: trials must be at least 1");
  if (successes < 0 || successes > trials)
    throw std::invalid_argument("wilson_interval: successes must lie in [0, trials]");
  double n = trials;
  double phat = successes / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (phat + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  WilsonInterval ci;
  ci.lo = std::max(0.0, center - half);
  ci.hi = std::min(1.0, center + half);
  return ci;
}

ExperimentReport run_experiment(const BinaryImage& truth, const NoiseModel& model, double theta,
                                int phi, int runs, std::uint64_t seed,
                                const std::string& truth_descriptor, unsigned threads) {
  if (runs < 1) throw std::invalid_argument("run_experiment: runs must be at least 1");
  if (phi < 1 || static_cast<std::size_t>(phi) > truth.pixel_count())
    throw std::invalid_argument("run_experiment: phi must lie between 1 and the pixel count");

  DetectionConfig config;
  config.threshold.theta = theta;
  config.phi = phi;
  config.source_of_phi = PhiSource::kUserFixed;

  ExperimentReport report;
  report.runs = runs;
  report.theta = theta;
  report.phi = phi;
  report.model = model.descriptor();
  report.truth = truth_descriptor;
  report.seed = seed;
  report.outcomes.assign(static_cast<std::size_t>(runs), RunOutcome{});

  detail::parallel_for(report.outcomes.size(), threads, [&](std::size_t r) {
    GrayImage noisy = add_noise(truth, model, derive_seed(seed, r));
    DetectionResult det = detect(noisy, config);
    RunOutcome& out = report.outcomes[r];
    out.run_index = static_cast<int>(r);
    out.detected = det.detected;
    out.max_cluster = det.detected ? det.witness->size : det.max_cluster;
    out.elapsed_ms = det.elapsed_ms;
  });

  double elapsed_total = 0.0;
  for (const auto& out : report.outcomes) {
    report.detections += out.detected ? 1 : 0;
    elapsed_total += out.elapsed_ms;
  }
  report.rate = static_cast<double>(report.detections) / runs;
  report.ci = wilson_interval(report.detections, runs);
  report.mean_elapsed_ms = elapsed_total / runs;
  return report;
}

double crossing_probability(double p, int size, int replicates, std::uint64_t seed,
                            unsigned threads) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("crossing_probability: p must lie in [0, 1]");
  if (size < 1) throw std::invalid_argument("crossing_probability: size must be at least 1");
  if (replicates < 1)
    throw std::invalid_argument("crossing_probability: replicates must be at least 1");

  std::vector<std::uint8_t> crossed(static_cast<std::size_t>(replicates), 0);
  detail::parallel_for(crossed.size(), threads, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(seed, r));
    BinaryImage field(size, size);
    for (auto& bit : field.bits) bit = uniform01(rng) < p ? 1 : 0;
    crossed[r] = has_left_right_crossing(field) ? 1 : 0;
  });
  long long hits = 0;
  for (auto c : crossed) hits += c;
  return static_cast<double>(hits) / static_cast<double>(replicates);
}

}  // namespace pd
