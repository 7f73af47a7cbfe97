#pragma once

#include <cstdint>
#include <optional>

#include "pd/cluster.hpp"
#include "pd/image.hpp"
#include "pd/threshold.hpp"

namespace pd {

enum class PhiSource { kCalibrated, kUserFixed };

struct DetectionConfig {
  ThresholdConfig threshold;
  int phi = 1;  // minimal cluster size that triggers a detection
  double alpha = 0.05;
  PhiSource source_of_phi = PhiSource::kUserFixed;
};

struct DetectionResult {
  bool detected = false;
  std::optional<Cluster> witness;  // the triggering patch, when detected
  int phi_used = 0;
  double theta_used = 0.0;
  double elapsed_ms = 0.0;  // threshold + search time
  std::size_t pixel_count = 0;
  int width = 0;
  int height = 0;
  // Largest fully explored black cluster; equals the true maximum whenever
  // detected == false (the search only stops early on success).
  int max_cluster = 0;
};

// Threshold the image at config.threshold.theta and report whether any black
// 4-connected cluster reaches config.phi pixels. With a calibrated phi the
// threshold configuration must be feasible (background subcritical, object
// supercritical), otherwise the guarantees behind phi are void and this
// throws infeasible_error.
DetectionResult detect(const GrayImage& img, const DetectionConfig& config);

// Union bound on the probability that pure noise produces a black cluster of
// n or more pixels on a width x height lattice, given the exponential tail
// rate lambda of subcritical cluster sizes: min(1, width*height*exp(-n*lambda)).
double false_detection_bound(int width, int height, int n, double lambda);

struct TailRateFit {
  double lambda_hat = 0.0;
  double r_squared = 0.0;
  int points = 0;  // tail sizes used in the fit
};

// Estimate the exponential decay rate of P(max cluster >= n) for an
// independent Bernoulli(p) field on a size x size lattice, from `replicates`
// simulated fields. Only subcritical p (p < p_c) is accepted. Returns nullopt
// when the empirical tail is too degenerate to fit (fewer than two sizes with
// tail probability inside [0.01, 0.5]).
std::optional<TailRateFit> estimate_tail_rate(double p, int size, int replicates,
                                              std::uint64_t seed,
                                              double p_c = kDefaultPcSite,
                                              unsigned threads = 0);

}  // namespace pd
