// Acceptance gate: one PASS/FAIL line per criterion, exit code = number of
// failed criteria. Every check recomputes its target from scratch with fixed
// seeds; nothing is cached between runs, so criterion 10 exercises genuine
// determinism rather than cache hits.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pd/calibrate.hpp"
#include "pd/cluster.hpp"
#include "pd/detect.hpp"
#include "pd/experiment.hpp"
#include "pd/image.hpp"
#include "pd/noise_model.hpp"
#include "pd/report_json.hpp"
#include "pd/rng.hpp"
#include "pd/threshold.hpp"

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("ACCEPT %02d %s — %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

constexpr double kPc = pd::kDefaultPcSite;
constexpr double kSigma = 1.8;
constexpr double kTheta = 0.5;
constexpr std::uint64_t kCalibSeed = 193;
constexpr std::uint64_t kNullSeed = 217;
constexpr std::uint64_t kPowerSeed = 331;

struct Artifacts {
  pd::CalibrationResult calib;
  double calib_seconds = 0.0;
  pd::ExperimentReport null_report;
  pd::ExperimentReport power_report;
  std::string calib_json, null_json, power_json;
};

Artifacts run_reference_experiments() {
  Artifacts a;
  pd::NoiseModel m = pd::NoiseModel::gaussian(kSigma);

  auto start = std::chrono::steady_clock::now();
  a.calib = pd::calibrate(450, 450, m, kTheta, 0.05, 1000, kCalibSeed, 1.3);
  a.calib_seconds = seconds_since(start);

  pd::BinaryImage empty(450, 450);
  a.null_report = pd::run_experiment(empty, m, kTheta, 250, 200, kNullSeed, "empty");

  pd::BinaryImage square = pd::make_square_object(450, 450, 40, 100, 100);
  a.power_report =
      pd::run_experiment(square, m, kTheta, 250, 200, kPowerSeed, "square(side=40 at 100,100)");

  a.calib_json = pd::canonical_dump(pd::to_report_json(a.calib));
  a.null_json = pd::canonical_dump(pd::to_report_json(a.null_report));
  a.power_json = pd::canonical_dump(pd::to_report_json(a.power_report));
  return a;
}

// --- criterion 1: null calibration quantile -------------------------------

int null_q95(const pd::CalibrationResult& calib) {
  std::vector<int> sorted(calib.samples);
  std::sort(sorted.begin(), sorted.end());
  return sorted[949];  // order statistic 950 of 1000 = empirical 95% quantile
}

void criterion_1(const Artifacts& a) {
  int q95 = null_q95(a.calib);
  bool in_range = q95 >= 170 && q95 <= 215;
  bool fast_enough = a.calib_seconds <= 600.0;
  report(1, in_range && fast_enough,
         fmt("null 95%% quantile %d vs required [170, 215]; 1000 replicates of "
             "450x450 took %.1f s (limit 600 s)",
             q95, a.calib_seconds));
}

// --- criterion 2 and 3: false alarms and power ----------------------------

void criterion_2(const Artifacts& a) {
  report(2, a.null_report.rate <= 0.05,
         fmt("false detections on empty truths: %d of %d (rate %.3f, required <= 0.05)",
             a.null_report.detections, a.null_report.runs, a.null_report.rate));
}

void criterion_3(const Artifacts& a) {
  report(3, a.power_report.rate >= 0.95,
         fmt("detections of the 40x40 square: %d of %d (rate %.3f, required >= 0.95)",
             a.power_report.detections, a.power_report.runs, a.power_report.rate));
}

// --- criterion 4: noise level where feasibility collapses -----------------

// A threshold grid point is usable when the background stays subcritical and
// the object supercritical. The detection problem is symmetric under video
// inversion (negate the image, swap theta for 1-theta), so the robust window
// is the set of grid thetas usable for both the image and its negative. For
// gaussian noise that window is (sigma*z, 1-sigma*z) with z = Phi^-1(p_c),
// collapsing at sigma = 1/(2z) ~ 2.1312.
bool symmetric_window_nonempty(double sigma) {
  pd::NoiseModel m = pd::NoiseModel::gaussian(sigma);
  std::vector<bool> feasible(1001);
  for (int k = 0; k <= 1000; ++k) {
    auto pr = pd::percolation_probs(m, k * 1e-3);
    feasible[k] = pr.p_out < kPc && kPc < pr.p_im;
  }
  for (int k = 0; k <= 1000; ++k) {
    if (feasible[k] && feasible[1000 - k]) return true;
  }
  return false;
}

void criterion_4() {
  double lo = 1.5, hi = 3.0;  // window alive at 1.5, gone at 3.0
  if (!symmetric_window_nonempty(lo) || symmetric_window_nonempty(hi)) {
    report(4, false, "bisection bracket invalid for the feasibility boundary");
    return;
  }
  for (int iter = 0; iter < 50; ++iter) {
    double mid = 0.5 * (lo + hi);
    (symmetric_window_nonempty(mid) ? lo : hi) = mid;
  }
  double sigma_star = 0.5 * (lo + hi);
  const double expected = 2.131156111578011;  // 1 / (2 * Phi^-1(0.592746))
  report(4, std::abs(sigma_star - expected) <= 0.02,
         fmt("feasibility window on the 1e-3 theta grid collapses at sigma %.4f, "
             "expected %.4f +/- 0.02",
             sigma_star, expected));
}

// --- criterion 5: runtime linear in pixel count ----------------------------

void criterion_5() {
  pd::NoiseModel m = pd::NoiseModel::gaussian(kSigma);
  std::vector<std::pair<double, double>> pts;  // (log pixels, log median ms)
  std::string sizes;
  for (int n : {256, 512, 1024, 2048}) {
    pd::BinaryImage empty(n, n);
    std::vector<double> times;
    for (int rep = 0; rep < 7; ++rep) {
      // Image generation happens outside the timed section: detect() times
      // only thresholding plus cluster search.
      pd::GrayImage img =
          pd::add_noise(empty, m, pd::derive_seed(12000 + n, rep));
      pd::DetectionConfig cfg;
      cfg.threshold.theta = kTheta;
      cfg.phi = n * n;  // unreachable: forces exhaustive exploration
      auto res = pd::detect(img, cfg);
      times.push_back(res.elapsed_ms);
    }
    std::sort(times.begin(), times.end());
    double median = times[3];
    pts.emplace_back(std::log(static_cast<double>(n) * n), std::log(median));
    sizes += fmt("%d:%.2fms ", n, median);
  }
  auto [slope, r2] = oracle::fit_line(pts);
  report(5, slope >= 0.8 && slope <= 1.2,
         fmt("median detect time vs pixel count has log-log slope %.3f "
             "(required [0.8, 1.2], r^2 %.3f): %s",
             slope, r2, sizes.c_str()));
}

// --- criterion 6: labeling equals the flood-fill oracle --------------------

bool labeling_matches(const pd::BinaryImage& img) {
  auto lab = pd::label_components(img, pd::CellColor::kBlack);
  auto ref = oracle::flood_fill(img, true);
  if (lab.labels != ref.labels) return false;
  if (lab.clusters.size() != ref.pixels.size()) return false;
  for (std::size_t i = 0; i < lab.clusters.size(); ++i) {
    if (lab.clusters[i].pixels != ref.pixels[i]) return false;
  }
  return true;
}

void criterion_6() {
  int mismatches = 0;
  for (int mask = 0; mask < 512; ++mask) {
    pd::BinaryImage img(3, 3);
    for (int i = 0; i < 9; ++i) img.bits[i] = (mask >> i) & 1;
    mismatches += !labeling_matches(img);
  }
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    double p = 0.2 + 0.6 * (seed % 11) / 10.0;
    mismatches += !labeling_matches(oracle::random_binary(16, 16, p, seed * 31 + 3));
  }
  report(6, mismatches == 0,
         fmt("labeling vs flood-fill oracle: %d mismatches across 512 exhaustive "
             "3x3 patterns and 1000 random 16x16 images",
             mismatches));
}

// --- criterion 7: subcritical cluster-size tails decay exponentially -------

void criterion_7() {
  auto fit04 = pd::estimate_tail_rate(0.4, 128, 2000, 555);
  auto fit01 = pd::estimate_tail_rate(0.1, 128, 2000, 556);
  if (!fit04 || !fit01) {
    report(7, false, "tail fit degenerate: too few sizes in the probability band");
    return;
  }
  bool pass = fit04->r_squared >= 0.9 && fit04->lambda_hat > 0.0 &&
              fit01->lambda_hat > fit04->lambda_hat;
  report(7, pass,
         fmt("tail of max cluster size at p=0.4: lambda %.4f, r^2 %.4f over %d "
             "sizes (required r^2 >= 0.9); lambda at p=0.1 is %.4f (must exceed)",
             fit04->lambda_hat, fit04->r_squared, fit04->points, fit01->lambda_hat));
}

// --- criterion 8: supercritical fields cross, subcritical ones do not ------

void criterion_8() {
  double high = pd::crossing_probability(0.7, 64, 500, 664);
  double low = pd::crossing_probability(0.4, 64, 500, 665);
  report(8, high >= 0.99 && low <= 0.10,
         fmt("left-right crossing frequency on 64x64: %.3f at p=0.7 (required >= "
             "0.99), %.3f at p=0.4 (required <= 0.10)",
             high, low));
}

// --- criterion 9: union bound dominates the observed false-alarm rate ------

void criterion_9(const Artifacts& a) {
  const double p_out = pd::percolation_probs(pd::NoiseModel::gaussian(kSigma), kTheta).p_out;
  auto fit = pd::estimate_tail_rate(p_out, 128, 2000, 557);
  if (!fit) {
    report(9, false, "tail fit at the background density was degenerate");
    return;
  }
  double bound = pd::false_detection_bound(450, 450, a.calib.phi, fit->lambda_hat);
  report(9, bound >= a.null_report.rate,
         fmt("union bound %.4f at calibrated phi %d (lambda %.4f at p %.4f) vs "
             "observed false-alarm rate %.4f",
             bound, a.calib.phi, fit->lambda_hat, p_out, a.null_report.rate));
}

// --- criterion 10: byte-identical reports on rerun --------------------------

void criterion_10(const Artifacts& first) {
  Artifacts second = run_reference_experiments();
  bool same = first.calib_json == second.calib_json &&
              first.null_json == second.null_json &&
              first.power_json == second.power_json;
  report(10, same,
         fmt("rerun with identical seeds: calibration report %s, false-alarm "
             "report %s, power report %s",
             first.calib_json == second.calib_json ? "identical" : "DIFFERS",
             first.null_json == second.null_json ? "identical" : "DIFFERS",
             first.power_json == second.power_json ? "identical" : "DIFFERS"));
}

}  // namespace

int main() {
  std::printf("acceptance: reference experiments (450x450, gaussian sigma %.1f, "
              "theta %.1f)\n",
              kSigma, kTheta);
  std::fflush(stdout);
  Artifacts artifacts = run_reference_experiments();

  criterion_1(artifacts);
  criterion_2(artifacts);
  criterion_3(artifacts);
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9(artifacts);
  criterion_10(artifacts);

  std::printf("acceptance: %d of 10 criteria passed\n", 10 - g_failures);
  return g_failures;
}
