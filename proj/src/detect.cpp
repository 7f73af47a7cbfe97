#include "pd/detect.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

#include "pd/parallel.hpp"
#include "pd/rng.hpp"

namespace pd {

DetectionResult detect(const GrayImage& img, const DetectionConfig& config) {
  if (img.width <= 0 || img.height <= 0 || img.values.empty())
    throw std::invalid_argument("detect: image must be non-empty");
  if (config.phi < 1 || static_cast<std::size_t>(config.phi) > img.pixel_count())
    throw std::invalid_argument("detect: phi must lie between 1 and the pixel count");
  if (config.source_of_phi == PhiSource::kCalibrated && !config.threshold.feasible())
    throw infeasible_error(
        "detect: calibrated phi requires a feasible threshold "
        "(p_out < p_c < p_im)");

  auto start = std::chrono::steady_clock::now();
  BinaryImage black = apply_threshold(img, config.threshold.theta);
  ClusterSearchResult search = find_cluster_at_least(black, config.phi);
  auto stop = std::chrono::steady_clock::now();

  DetectionResult result;
  result.detected = search.found.has_value();
  result.witness = std::move(search.found);
  result.phi_used = config.phi;
  result.theta_used = config.threshold.theta;
  result.elapsed_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  result.pixel_count = img.pixel_count();
  result.width = img.width;
  result.height = img.height;
  result.max_cluster = search.max_size;
  return result;
}

double false_detection_bound(int width, int height, int n, double lambda) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("false_detection_bound: lattice dimensions must be positive");
  if (n < 1) throw std::invalid_argument("false_detection_bound: n must be at least 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("false_detection_bound: lambda must be finite and positive");
  double bound = static_cast<double>(width) * static_cast<double>(height) *
                 std::exp(-static_cast<double>(n) * lambda);
  return bound < 1.0 ? bound : 1.0;
}

std::optional<TailRateFit> estimate_tail_rate(double p, int size, int replicates,
                                              std::uint64_t seed, double p_c,
                                              unsigned threads) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("estimate_tail_rate: p must lie in [0, 1]");
  if (!(p < p_c))
    throw std::invalid_argument(
        "estimate_tail_rate: p must be subcritical (p < p_c); supercritical "
        "cluster sizes have no exponential tail");
  if (size < 2) throw std::invalid_argument("estimate_tail_rate: size must be at least 2");
  if (replicates < 1)
    throw std::invalid_argument("estimate_tail_rate: replicates must be at least 1");

  std::vector<int> maxima(static_cast<std::size_t>(replicates), 0);
  detail::parallel_for(maxima.size(), threads, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(seed, r));
    BinaryImage field(size, size);
    for (auto& bit : field.bits) bit = uniform01(rng) < p ? 1 : 0;
    maxima[r] = max_cluster_size(label_components(field, CellColor::kBlack, false));
  });

  // Empirical tail q(n) = P(max cluster >= n); fit log q(n) = a - lambda*n on
  // the well-resolved band 0.01 <= q <= 0.5.
  int largest = 0;
  for (int m : maxima) largest = std::max(largest, m);
  if (largest < 1) return std::nullopt;  // every field came out empty
  std::vector<int> at_least(static_cast<std::size_t>(largest) + 2, 0);
  for (int m : maxima) ++at_least[m];
  for (int n = largest - 1; n >= 0; --n) at_least[n] += at_least[n + 1];

  std::vector<std::pair<double, double>> pts;
  for (int n = 1; n <= largest; ++n) {
    double q = static_cast<double>(at_least[n]) / static_cast<double>(replicates);
    if (q >= 0.01 && q <= 0.5) pts.emplace_back(static_cast<double>(n), std::log(q));
  }
  if (pts.size() < 2) return std::nullopt;

  double sx = 0, sy = 0;
  for (auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  double mx = sx / pts.size(), my = sy / pts.size();
  double sxx = 0, sxy = 0, syy = 0;
  for (auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  double slope = sxy / sxx;
  double ss_res = syy - slope * sxy;

  TailRateFit fit;
  fit.lambda_hat = -slope;
  fit.r_squared = 1.0 - ss_res / syy;
  fit.points = static_cast<int>(pts.size());
  return fit;
}

}  // namespace pd
