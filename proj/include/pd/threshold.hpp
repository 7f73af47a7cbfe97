#pragma once

#include <optional>
#include <stdexcept>

#include "pd/image.hpp"
#include "pd/noise_model.hpp"

namespace pd {

// Default site-percolation critical probability for the square lattice
// (4-neighbour connectivity). Overridable everywhere it is consumed.
inline constexpr double kDefaultPcSite = 0.592746;

// Raised when no threshold can put the background below criticality and the
// object above it at the same time (noise too strong for the given p_c).
class infeasible_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ThetaInterval {
  double lo = 0.0;
  double hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double theta) const { return theta > lo && theta < hi; }
};

// Phase probabilities induced by thresholding at theta:
//   p_out = P(background pixel turns black) -- must stay subcritical
//   p_im  = P(object pixel stays black)     -- must stay supercritical
struct PercolationProbs {
  double p_out = 0.0;
  double p_im = 1.0;
};

struct ThresholdConfig {
  double theta = 0.5;
  double alpha0 = 0.5;  // per-pixel false-black probability implied by theta
  double p_c = kDefaultPcSite;
  double p_out = 0.0;
  double p_im = 1.0;

  bool feasible() const { return p_out < p_c && p_c < p_im; }
};

// Smallest threshold whose per-pixel false-black probability is <= alpha0,
// i.e. the (1 - alpha0) quantile of the pixel noise. alpha0 = 1 maps to
// -infinity (every pixel black).
double theta_from_alpha(const NoiseModel& model, double alpha0);

PercolationProbs percolation_probs(const NoiseModel& model, double theta);

// All thresholds theta with p_out(theta) < p_c < p_im(theta). For gaussian
// noise this is the open interval (sigma*q, 1 + sigma*q), q = quantile(1-p_c),
// which is never empty; step tables whose CDF sits flat at level 1 - p_c can
// make it empty.
std::optional<ThetaInterval> feasible_theta_interval(const NoiseModel& model, double p_c);

enum class ThetaObjective { kQuadratic, kSign };

// Pick a threshold inside the feasible interval. kQuadratic minimizes
// (p_out - p_c)^2 + (p_im - p_c)^2 over an interior grid of the given step,
// preferring the smaller theta on ties; kSign's objective is constant on the
// interval, so its minimizer is reported as the interval midpoint. Throws
// infeasible_error when no feasible threshold exists.
double optimize_theta(const NoiseModel& model, double p_c, ThetaObjective objective,
                      double grid_step = 1e-3);

ThresholdConfig make_threshold_config(const NoiseModel& model, double theta, double p_c,
                                      std::optional<double> alpha0 = std::nullopt);

// Pixel (i,j) becomes black iff values[i][j] >= theta (ties count as black).
BinaryImage apply_threshold(const GrayImage& img, double theta);

}  // namespace pd
