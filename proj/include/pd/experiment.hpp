#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pd/detect.hpp"
#include "pd/image.hpp"
#include "pd/noise_model.hpp"

namespace pd {

// All-white truth with one black side x side square whose top-left corner is
// (row, col). The square must fit inside the lattice.
BinaryImage make_square_object(int width, int height, int side, int row, int col);

// Observation = truth intensity (black = 1, white = 0) plus one pixel-noise
// draw per pixel, row-major, from a generator seeded with `seed`.
GrayImage add_noise(const BinaryImage& truth, const NoiseModel& model, std::uint64_t seed);

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

// Wilson score interval for a binomial proportion (default z covers 95%).
WilsonInterval wilson_interval(int successes, int trials, double z = 1.9599639845400545);

struct RunOutcome {
  int run_index = 0;
  bool detected = false;
  int max_cluster = 0;  // witness size when detected, else the exact maximum
  double elapsed_ms = 0.0;
};

struct ExperimentReport {
  int runs = 0;
  int detections = 0;
  double rate = 0.0;
  WilsonInterval ci;
  double theta = 0.0;
  int phi = 0;
  std::string model;  // noise descriptor
  std::string truth;  // truth descriptor, e.g. "square(side=40 at 100,100)"
  std::uint64_t seed = 0;
  double mean_elapsed_ms = 0.0;
  std::vector<RunOutcome> outcomes;
};

// Repeatedly noise the truth, run the detector, and summarize the detection
// rate. Run r draws its noise from the seed derived from (seed, r), so the
// report is identical for any thread count.
ExperimentReport run_experiment(const BinaryImage& truth, const NoiseModel& model, double theta,
                                int phi, int runs, std::uint64_t seed,
                                const std::string& truth_descriptor = "",
                                unsigned threads = 0);

// Fraction of independent Bernoulli(p) fields on a size x size lattice that
// contain a black left-right crossing.
double crossing_probability(double p, int size, int replicates, std::uint64_t seed,
                            unsigned threads = 0);

}  // namespace pd
