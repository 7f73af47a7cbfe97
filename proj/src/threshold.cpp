#include "pd/threshold.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace pd {

double theta_from_alpha(const NoiseModel& model, double alpha0) {
  if (!(alpha0 > 0.0 && alpha0 <= 1.0))
    throw std::invalid_argument("theta_from_alpha: alpha0 must lie in (0, 1]");
  if (alpha0 == 1.0) return -std::numeric_limits<double>::infinity();
  return model.pixel_quantile(1.0 - alpha0);
}

PercolationProbs percolation_probs(const NoiseModel& model, double theta) {
  return {model.white_exceed_prob(theta), 1.0 - model.black_below_prob(theta)};
}

std::optional<ThetaInterval> feasible_theta_interval(const NoiseModel& model, double p_c) {
  if (!(p_c > 0.0 && p_c < 1.0))
    throw std::invalid_argument("feasible_theta_interval: p_c must lie strictly between 0 and 1");
  double q = 1.0 - p_c;
  // p_out(theta) < p_c needs pixel_cdf(theta) > q, so theta past the upper
  // crossing; p_im(theta) > p_c needs pixel_cdf(theta - 1) < q, so theta - 1
  // short of the lower crossing. Thresholds strictly between work.
  ThetaInterval iv{model.upper_crossing(q), 1.0 + model.lower_crossing(q)};
  if (!(iv.lo < iv.hi)) return std::nullopt;
  return iv;
}

double optimize_theta(const NoiseModel& model, double p_c, ThetaObjective objective,
                      double grid_step) {
  if (!(grid_step > 0.0 && std::isfinite(grid_step)))
    throw std::invalid_argument("optimize_theta: grid_step must be finite and positive");
  auto iv = feasible_theta_interval(model, p_c);
  if (!iv) {
    std::ostringstream msg;
    msg << "noise is not 1-small: no threshold keeps the background subcritical and the "
           "object supercritical at p_c="
        << p_c;
    throw infeasible_error(msg.str());
  }
  // The sign objective is constant wherever the phase inequalities hold, so
  // every feasible threshold maximizes it; report the interval midpoint.
  if (objective == ThetaObjective::kSign) return iv->mid();

  // Push both phase probabilities as far from criticality as the window
  // allows: maximize (p_out - p_c)^2 + (p_im - p_c)^2.
  auto quad = [&](double theta) {
    PercolationProbs pr = percolation_probs(model, theta);
    return (pr.p_out - p_c) * (pr.p_out - p_c) + (pr.p_im - p_c) * (pr.p_im - p_c);
  };

  // Interior grid: start/end one step inside so endpoints (which violate the
  // strict inequalities) are never candidates. Ties keep the smaller theta.
  double limit = iv->hi - grid_step * (1.0 - 1e-9);
  double best_theta = std::numeric_limits<double>::quiet_NaN();
  double best = -std::numeric_limits<double>::infinity();
  for (long long k = 1;; ++k) {
    double theta = iv->lo + grid_step * static_cast<double>(k);
    if (theta > limit) break;
    double value = quad(theta);
    if (value > best) {
      best = value;
      best_theta = theta;
    }
  }
  if (!std::isfinite(best)) return iv->mid();  // interval narrower than the grid
  return best_theta;
}

ThresholdConfig make_threshold_config(const NoiseModel& model, double theta, double p_c,
                                      std::optional<double> alpha0) {
  if (!std::isfinite(theta))
    throw std::invalid_argument("make_threshold_config: theta must be finite");
  if (!(p_c > 0.0 && p_c < 1.0))
    throw std::invalid_argument("make_threshold_config: p_c must lie strictly between 0 and 1");
  ThresholdConfig cfg;
  cfg.theta = theta;
  cfg.p_c = p_c;
  PercolationProbs pr = percolation_probs(model, theta);
  cfg.p_out = pr.p_out;
  cfg.p_im = pr.p_im;
  cfg.alpha0 = alpha0.value_or(pr.p_out);
  if (!(cfg.alpha0 >= 0.0 && cfg.alpha0 <= 1.0))
    throw std::invalid_argument("make_threshold_config: alpha0 must lie in [0, 1]");
  return cfg;
}

BinaryImage apply_threshold(const GrayImage& img, double theta) {
  BinaryImage out(img.width, img.height);
  for (std::size_t i = 0; i < img.values.size(); ++i)
    out.bits[i] = img.values[i] >= theta ? 1 : 0;
  return out;
}

}  // namespace pd
