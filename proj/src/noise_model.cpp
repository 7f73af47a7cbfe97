#include "pd/noise_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pd/rng.hpp"

namespace pd {

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

namespace {

// Rational approximation of the normal quantile (relative error ~1.15e-9),
// split into lower-tail / central / upper-tail branches.
double normal_quantile_approx(double p) {
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

constexpr double kSqrt2Pi = 2.5066282746310002;

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p must lie strictly between 0 and 1");
  double x = normal_quantile_approx(p);
  // One Halley refinement; skipped in the extreme tails where exp(x^2/2)
  // would overflow and the raw approximation is already ample.
  if (std::abs(x) < 37.0) {
    double e = normal_cdf(x) - p;
    double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

NoiseModel NoiseModel::gaussian(double sigma) {
  if (!(std::isfinite(sigma) && sigma > 0.0))
    throw std::invalid_argument("NoiseModel::gaussian: sigma must be finite and positive");
  NoiseModel m;
  m.kind_ = NoiseKind::kGaussian;
  m.sigma_ = sigma;
  return m;
}

NoiseModel NoiseModel::empirical_table(std::vector<std::pair<double, double>> points,
                                       bool interpolate) {
  if (points.empty())
    throw std::invalid_argument("noise table: at least one (value, cum) point required");
  NoiseModel m;
  m.kind_ = NoiseKind::kTable;
  m.interpolate_ = interpolate;
  m.values_.reserve(points.size());
  m.cum_.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double v = points[i].first;
    double c = points[i].second;
    if (!std::isfinite(v) || !std::isfinite(c))
      throw std::invalid_argument("noise table: non-finite entry at row " + std::to_string(i + 1));
    if (i > 0 && !(v > m.values_.back()))
      throw std::invalid_argument("noise table: values must be strictly increasing (row " +
                                  std::to_string(i + 1) + ")");
    if (c < 0.0 || c > 1.0 + 1e-9)
      throw std::invalid_argument("noise table: cumulative mass outside [0,1] at row " +
                                  std::to_string(i + 1));
    if (i > 0 && c < m.cum_.back() - 1e-12)
      throw std::invalid_argument("noise table: cumulative mass must be nondecreasing (row " +
                                  std::to_string(i + 1) + ")");
    m.values_.push_back(v);
    m.cum_.push_back(std::min(1.0, std::max(c, i > 0 ? m.cum_.back() : 0.0)));
  }
  if (std::abs(m.cum_.back() - 1.0) > 1e-9)
    throw std::invalid_argument("noise table: cumulative mass must reach 1 at the last row");
  m.cum_.back() = 1.0;
  return m;
}

NoiseModel NoiseModel::empirical_table_from_csv(const std::filesystem::path& path,
                                                bool interpolate) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("noise table: cannot open " + path.string());
  std::vector<std::pair<double, double>> points;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;  // blank line
    std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("noise table " + path.string() + " line " +
                               std::to_string(lineno) + ": expected value,cum");
    auto parse_field = [&](std::size_t from, std::size_t to, double& out) {
      while (from < to && (line[from] == ' ' || line[from] == '\t')) ++from;
      while (to > from && (line[to - 1] == ' ' || line[to - 1] == '\t')) --to;
      auto [ptr, ec] = std::from_chars(line.data() + from, line.data() + to, out);
      return ec == std::errc() && ptr == line.data() + to;
    };
    double v = 0.0, c = 0.0;
    bool ok = parse_field(start, comma, v) && parse_field(comma + 1, line.size(), c);
    if (!ok) {
      if (lineno == 1 && points.empty()) continue;  // header row
      throw std::runtime_error("noise table " + path.string() + " line " +
                               std::to_string(lineno) + ": expected two numbers");
    }
    points.emplace_back(v, c);
  }
  if (points.empty())
    throw std::runtime_error("noise table " + path.string() + ": no data rows");
  return empirical_table(std::move(points), interpolate);
}

double NoiseModel::table_cdf(double x) const {
  if (!interpolate_) {
    // Right-continuous step CDF: mass of all support points <= x.
    auto it = std::upper_bound(values_.begin(), values_.end(), x);
    if (it == values_.begin()) return 0.0;
    return cum_[static_cast<std::size_t>(it - values_.begin()) - 1];
  }
  if (x < values_.front()) return 0.0;
  if (x >= values_.back()) return 1.0;
  auto it = std::upper_bound(values_.begin(), values_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - values_.begin());  // values_[i-1] <= x < values_[i]
  double v0 = values_[i - 1], v1 = values_[i];
  double c0 = cum_[i - 1], c1 = cum_[i];
  return c0 + (x - v0) / (v1 - v0) * (c1 - c0);
}

double NoiseModel::table_quantile(double p) const {
  auto it = std::lower_bound(cum_.begin(), cum_.end(), p);
  std::size_t i = static_cast<std::size_t>(it - cum_.begin());
  if (!interpolate_) return values_[i];
  if (i == 0 || cum_[i - 1] >= p) return values_[i];
  double v0 = values_[i - 1], v1 = values_[i];
  double c0 = cum_[i - 1], c1 = cum_[i];
  return v0 + (p - c0) / (c1 - c0) * (v1 - v0);
}

double NoiseModel::cdf(double x) const {
  return kind_ == NoiseKind::kGaussian ? normal_cdf(x) : table_cdf(x);
}

double NoiseModel::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("NoiseModel::quantile: p must lie strictly between 0 and 1");
  return kind_ == NoiseKind::kGaussian ? normal_quantile(p) : table_quantile(p);
}

double NoiseModel::pixel_cdf(double y) const {
  return kind_ == NoiseKind::kGaussian ? cdf(y / sigma_) : cdf(y);
}

double NoiseModel::pixel_quantile(double p) const {
  return kind_ == NoiseKind::kGaussian ? sigma_ * quantile(p) : quantile(p);
}

double NoiseModel::white_exceed_prob(double y) const {
  return kind_ == NoiseKind::kGaussian ? 1.0 - cdf(y / sigma_) : 1.0 - cdf(y);
}

double NoiseModel::black_below_prob(double y) const {
  return kind_ == NoiseKind::kGaussian ? cdf((y - 1.0) / sigma_) : cdf(y - 1.0);
}

double NoiseModel::draw(std::mt19937_64& rng) const {
  double u = uniform01(rng);
  return kind_ == NoiseKind::kGaussian ? sigma_ * normal_quantile(u) : table_quantile(u);
}

std::vector<double> NoiseModel::sample(std::uint64_t seed, std::size_t count) const {
  std::vector<double> out(count);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) out[i] = draw(rng);
  return out;
}

double NoiseModel::upper_crossing(double q) const {
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("upper_crossing: level must lie strictly between 0 and 1");
  if (kind_ == NoiseKind::kGaussian) return sigma_ * normal_quantile(q);
  // First x where the table CDF strictly exceeds q.
  auto it = std::upper_bound(cum_.begin(), cum_.end(), q);
  std::size_t i = static_cast<std::size_t>(it - cum_.begin());  // first cum_[i] > q
  if (!interpolate_) return values_[i];
  if (i == 0 || cum_[i - 1] >= q) return values_[i == 0 ? 0 : i - 1];
  double v0 = values_[i - 1], v1 = values_[i];
  double c0 = cum_[i - 1], c1 = cum_[i];
  return v0 + (q - c0) / (c1 - c0) * (v1 - v0);
}

double NoiseModel::lower_crossing(double q) const {
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("lower_crossing: level must lie strictly between 0 and 1");
  if (kind_ == NoiseKind::kGaussian) return sigma_ * normal_quantile(q);
  // Supremum of {x : table CDF(x) < q}.
  auto it = std::lower_bound(cum_.begin(), cum_.end(), q);
  std::size_t i = static_cast<std::size_t>(it - cum_.begin());  // first cum_[i] >= q
  if (!interpolate_ || i == 0) return values_[i];
  double v0 = values_[i - 1], v1 = values_[i];
  double c0 = cum_[i - 1], c1 = cum_[i];
  return v0 + (q - c0) / (c1 - c0) * (v1 - v0);
}

std::uint64_t NoiseModel::hash() const {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  auto mix = [&h](const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  unsigned char kind = kind_ == NoiseKind::kGaussian ? 0 : 1;
  mix(&kind, 1);
  if (kind_ == NoiseKind::kGaussian) {
    mix(&sigma_, sizeof sigma_);
  } else {
    unsigned char interp = interpolate_ ? 1 : 0;
    mix(&interp, 1);
    mix(values_.data(), values_.size() * sizeof(double));
    mix(cum_.data(), cum_.size() * sizeof(double));
  }
  return h;
}

std::string NoiseModel::descriptor() const {
  std::ostringstream out;
  if (kind_ == NoiseKind::kGaussian) {
    out << "gaussian(sigma=" << sigma_ << ")";
  } else {
    out << "table(points=" << values_.size() << ", "
        << (interpolate_ ? "interpolated" : "step") << ")";
  }
  return out.str();
}

}  // namespace pd
