#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace pd {

// Standard normal CDF, accurate to ~1e-15 (built on erfc).
double normal_cdf(double x);

// Standard normal quantile for p in (0,1). Rational initial guess refined
// by one Halley step against normal_cdf; absolute error below 1e-12 over
// the full open interval.
double normal_quantile(double p);

enum class NoiseKind { kGaussian, kTable };

// Per-pixel noise law for the observation model  Y = truth + noise.
//
// Two kinds are supported:
//  - kGaussian: noise = sigma * eps with eps standard normal; cdf/quantile
//    describe eps, and pixel-level formulas apply the sigma scaling.
//  - kTable: an arbitrary known law given as a CDF table (value, cum mass).
//    The table describes the pixel noise directly, so sigma plays no role:
//    every formula uses the table CDF where the gaussian case uses F(./sigma).
//    Tables are step CDFs by default; interpolate=true treats the points as
//    knots of a piecewise-linear CDF instead.
class NoiseModel {
 public:
  static NoiseModel gaussian(double sigma);
  static NoiseModel empirical_table(std::vector<std::pair<double, double>> points,
                                    bool interpolate = false);
  // CSV with two columns "value,cum" (optional header line), sorted by value.
  static NoiseModel empirical_table_from_csv(const std::filesystem::path& path,
                                             bool interpolate = false);

  NoiseKind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  bool interpolated() const { return interpolate_; }
  const std::vector<double>& table_values() const { return values_; }
  const std::vector<double>& table_cum() const { return cum_; }

  // CDF / quantile of the base law (standard normal for gaussian kind, the
  // table law otherwise). quantile rejects p outside the open interval (0,1).
  double cdf(double x) const;
  double quantile(double p) const;

  // CDF / quantile of the actual pixel noise (sigma applied for gaussian).
  double pixel_cdf(double y) const;
  double pixel_quantile(double p) const;

  // P(white pixel observed >= y): the chance background noise alone pushes a
  // pixel to intensity y or darker.
  double white_exceed_prob(double y) const;
  // P(black pixel observed <= y): the chance noise drags an object pixel
  // (true intensity 1) down to y or lighter.
  double black_below_prob(double y) const;

  // One pixel-noise draw by inverse transform; bit-reproducible everywhere.
  double draw(std::mt19937_64& rng) const;
  std::vector<double> sample(std::uint64_t seed, std::size_t count) const;

  // Level crossings of the pixel CDF, used to bound feasible thresholds:
  //   upper_crossing(q) = inf{ x : pixel_cdf(x) > q }
  //   lower_crossing(q) = sup{ x : pixel_cdf(x) < q }
  // Both equal sigma * normal_quantile(q) for the gaussian kind; for step
  // tables they bracket the flat stretch of the CDF at level q.
  double upper_crossing(double q) const;
  double lower_crossing(double q) const;

  // Stable content hash (kind, parameters, table entries); cache key material.
  std::uint64_t hash() const;
  std::string descriptor() const;

 private:
  NoiseModel() = default;

  double table_cdf(double x) const;
  double table_quantile(double p) const;

  NoiseKind kind_ = NoiseKind::kGaussian;
  double sigma_ = 1.0;
  bool interpolate_ = false;
  std::vector<double> values_;  // sorted support points
  std::vector<double> cum_;     // cumulative mass at each point, ends at 1
};

}  // namespace pd
