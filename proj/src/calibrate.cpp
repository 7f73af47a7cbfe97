#include "pd/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "json.hpp"
#include "pd/cluster.hpp"
#include "pd/io_util.hpp"
#include "pd/parallel.hpp"
#include "pd/rng.hpp"

namespace pd {

std::vector<int> simulate_null_max_clusters(int width, int height, const NoiseModel& model,
                                            double theta, int replicates, std::uint64_t seed,
                                            unsigned threads) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("simulate_null_max_clusters: dimensions must be positive");
  if (replicates < 1)
    throw std::invalid_argument("simulate_null_max_clusters: replicates must be at least 1");
  if (!std::isfinite(theta))
    throw std::invalid_argument("simulate_null_max_clusters: theta must be finite");

  std::vector<int> maxima(static_cast<std::size_t>(replicates), 0);
  detail::parallel_for(maxima.size(), threads, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(seed, r));
    BinaryImage black(width, height);
    // Noise-only observation thresholded in place; pixel order matches the
    // row-major draw order used when noising a truth image.
    for (auto& bit : black.bits) bit = model.draw(rng) >= theta ? 1 : 0;
    maxima[r] = max_cluster_size(label_components(black, CellColor::kBlack, false));
  });
  return maxima;
}

int phi_from_quantile(const std::vector<int>& samples, double alpha, double margin) {
  if (samples.empty())
    throw std::invalid_argument("phi_from_quantile: at least one null sample required");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("phi_from_quantile: alpha must lie strictly between 0 and 1");
  if (!(margin >= 1.0) || !std::isfinite(margin))
    throw std::invalid_argument("phi_from_quantile: margin must be finite and at least 1");

  std::vector<int> sorted(samples);
  std::sort(sorted.begin(), sorted.end());
  auto rank = static_cast<long long>(
      std::ceil((1.0 - alpha) * static_cast<double>(sorted.size()) - 1e-9));
  rank = std::clamp<long long>(rank, 1, static_cast<long long>(sorted.size()));
  int q = sorted[static_cast<std::size_t>(rank - 1)];
  // The 1e-9 slack keeps ceil from jumping one past an exactly-integer
  // product that binary arithmetic lands a hair above.
  auto phi = static_cast<long long>(std::ceil(margin * static_cast<double>(q) - 1e-9)) + 1;
  if (phi < 1) phi = 1;
  return static_cast<int>(phi);
}

namespace {

std::uint64_t cache_key(int width, int height, const NoiseModel& model, double theta,
                        int replicates, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix64 = [&h](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xff;
      h *= 1099511628211ULL;
    }
  };
  mix64(static_cast<std::uint64_t>(width));
  mix64(static_cast<std::uint64_t>(height));
  mix64(model.hash());
  std::uint64_t theta_bits;
  static_assert(sizeof theta_bits == sizeof theta);
  std::memcpy(&theta_bits, &theta, sizeof theta);
  mix64(theta_bits);
  mix64(static_cast<std::uint64_t>(replicates));
  mix64(seed);
  return h;
}

std::optional<std::vector<int>> load_cached_samples(const std::filesystem::path& file,
                                                    int width, int height,
                                                    const NoiseModel& model, double theta,
                                                    int replicates, std::uint64_t seed) {
  std::error_code ec;
  if (!std::filesystem::exists(file, ec) || ec) return std::nullopt;
  try {
    nlohmann::json doc = nlohmann::json::parse(detail::read_file_bytes(file));
    if (doc.at("width").get<int>() != width || doc.at("height").get<int>() != height ||
        doc.at("theta").get<double>() != theta ||
        doc.at("replicates").get<int>() != replicates ||
        doc.at("seed").get<std::uint64_t>() != seed ||
        doc.at("model").get<std::string>() != model.descriptor())
      return std::nullopt;
    auto samples = doc.at("samples").get<std::vector<int>>();
    if (static_cast<int>(samples.size()) != replicates) return std::nullopt;
    return samples;
  } catch (const std::exception&) {
    return std::nullopt;  // stale or corrupt cache entry; recompute
  }
}

}  // namespace

CalibrationResult calibrate(int width, int height, const NoiseModel& model, double theta,
                            double alpha, int replicates, std::uint64_t seed, double margin,
                            const std::optional<std::filesystem::path>& cache_dir,
                            unsigned threads) {
  CalibrationResult result;
  result.width = width;
  result.height = height;
  result.model = model.descriptor();
  result.theta = theta;
  result.alpha = alpha;
  result.replicates = replicates;
  result.seed = seed;
  result.margin = margin;

  std::optional<std::filesystem::path> cache_file;
  if (cache_dir) {
    char name[32];
    std::snprintf(name, sizeof name, "null-%016llx.json",
                  static_cast<unsigned long long>(
                      cache_key(width, height, model, theta, replicates, seed)));
    cache_file = *cache_dir / name;
    if (auto cached =
            load_cached_samples(*cache_file, width, height, model, theta, replicates, seed)) {
      result.samples = std::move(*cached);
      result.phi = phi_from_quantile(result.samples, alpha, margin);
      return result;
    }
  }

  result.samples =
      simulate_null_max_clusters(width, height, model, theta, replicates, seed, threads);
  result.phi = phi_from_quantile(result.samples, alpha, margin);

  if (cache_file) {
    nlohmann::json doc;
    doc["width"] = width;
    doc["height"] = height;
    doc["model"] = model.descriptor();
    doc["theta"] = theta;
    doc["replicates"] = replicates;
    doc["seed"] = seed;
    doc["samples"] = result.samples;
    std::error_code ec;
    std::filesystem::create_directories(*cache_dir, ec);
    if (!ec) detail::atomic_write_file(*cache_file, doc.dump(2) + "\n");
  }
  return result;
}

}  // namespace pd
