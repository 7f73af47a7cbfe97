#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pd/calibrate.hpp"
#include "pd/detect.hpp"
#include "pd/experiment.hpp"
#include "pd/image_io.hpp"
#include "pd/io_util.hpp"
#include "pd/report_json.hpp"
#include "pd/threshold.hpp"

namespace {

std::uint64_t parse_seed(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("seed must not be empty");
  int base = 10;
  std::size_t start = 0;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    base = 16;
    start = 2;
  }
  std::size_t pos = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(text.substr(start), &pos, base);
  } catch (const std::exception&) {
    throw std::invalid_argument("seed '" + text + "' is not a decimal or 0x-hex integer");
  }
  if (pos != text.size() - start)
    throw std::invalid_argument("seed '" + text + "' is not a decimal or 0x-hex integer");
  return value;
}

double default_pc() {
  const char* env = std::getenv("PD_PC");
  if (env == nullptr || *env == '\0') return pd::kDefaultPcSite;
  char* end = nullptr;
  double value = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(value > 0.0 && value < 1.0))
    throw std::invalid_argument("PD_PC must be a number strictly between 0 and 1, got '" +
                                std::string(env) + "'");
  return value;
}

struct NoiseOpts {
  double sigma = 0.0;
  bool sigma_given = false;
  std::string spec = "gaussian";
  bool interpolate = false;
};

void add_noise_options(CLI::App* cmd, NoiseOpts& opts) {
  cmd->add_option("--sigma", opts.sigma, "Gaussian noise standard deviation")
      ->check(CLI::PositiveNumber)
      ->each([&opts](const std::string&) { opts.sigma_given = true; });
  cmd->add_option("--noise", opts.spec,
                  "Noise law: 'gaussian' or 'table:FILE' (CSV of value,cum rows)")
      ->capture_default_str();
  cmd->add_flag("--table-interpolate", opts.interpolate,
                "Treat table rows as knots of a piecewise-linear CDF");
}

pd::NoiseModel build_noise(const NoiseOpts& opts) {
  if (opts.spec == "gaussian") {
    if (!opts.sigma_given)
      throw std::invalid_argument("--sigma is required with gaussian noise");
    return pd::NoiseModel::gaussian(opts.sigma);
  }
  if (opts.spec.rfind("table:", 0) == 0) {
    std::string path = opts.spec.substr(6);
    if (path.empty()) throw std::invalid_argument("--noise table: needs a file path");
    return pd::NoiseModel::empirical_table_from_csv(path, opts.interpolate);
  }
  throw std::invalid_argument("--noise must be 'gaussian' or 'table:FILE', got '" + opts.spec +
                              "'");
}

pd::ImageFormat parse_format(const std::string& name) {
  if (name == "pgm") return pd::ImageFormat::kPgm;
  if (name == "csv") return pd::ImageFormat::kFloatCsv;
  throw std::invalid_argument("--format must be 'pgm' or 'csv', got '" + name + "'");
}

pd::ThetaObjective parse_objective(const std::string& name) {
  if (name == "quadratic") return pd::ThetaObjective::kQuadratic;
  if (name == "sign") return pd::ThetaObjective::kSign;
  throw std::invalid_argument("--objective must be 'quadratic' or 'sign', got '" + name + "'");
}

long long parse_int_field(const std::string& text, const char* what) {
  std::size_t pos = 0;
  long long value = 0;
  try {
    value = std::stoll(text, &pos, 10);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("bad ") + what + " '" + text + "'");
  }
  if (pos != text.size())
    throw std::invalid_argument(std::string("bad ") + what + " '" + text + "'");
  return value;
}

// Truth specs: "empty", "square:SIDE@ROW,COL", or an image file path.
pd::BinaryImage build_truth(const std::string& spec, int width, int height,
                            const std::string& format, bool invert, std::string& descriptor) {
  if (spec == "empty") {
    descriptor = "empty";
    return pd::BinaryImage(width, height);
  }
  if (spec.rfind("square:", 0) == 0) {
    std::string rest = spec.substr(7);
    std::size_t at = rest.find('@');
    std::size_t comma = rest.find(',', at == std::string::npos ? 0 : at);
    if (at == std::string::npos || comma == std::string::npos)
      throw std::invalid_argument("square truth must look like square:SIDE@ROW,COL");
    int side = static_cast<int>(parse_int_field(rest.substr(0, at), "square side"));
    int row = static_cast<int>(parse_int_field(rest.substr(at + 1, comma - at - 1), "square row"));
    int col = static_cast<int>(parse_int_field(rest.substr(comma + 1), "square col"));
    descriptor = "square(side=" + std::to_string(side) + " at " + std::to_string(row) + "," +
                 std::to_string(col) + ")";
    return pd::make_square_object(width, height, side, row, col);
  }
  pd::GrayImage gray = pd::read_image(spec, parse_format(format), invert);
  if (gray.width != width || gray.height != height)
    throw std::invalid_argument("truth image is " + std::to_string(gray.width) + "x" +
                                std::to_string(gray.height) + ", expected " +
                                std::to_string(width) + "x" + std::to_string(height));
  descriptor = "file(" + spec + ")";
  pd::BinaryImage truth(gray.width, gray.height);
  for (std::size_t i = 0; i < gray.values.size(); ++i)
    truth.bits[i] = gray.values[i] >= 0.5 ? 1 : 0;
  return truth;
}

void emit_report(const nlohmann::json& doc, const std::string& output_path) {
  std::cout << pd::canonical_dump(doc);
  if (!output_path.empty()) pd::write_report(doc, output_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Object detection in noisy lattice images via anomalously large black clusters"};
  app.require_subcommand(1);

  // ---- detect ----------------------------------------------------------
  struct {
    std::string input, format = "pgm", output;
    bool invert = false;
    NoiseOpts noise;
    double theta = 0.0;
    std::string auto_theta;
    double grid_step = 1e-3;
    int phi = 0;
    bool do_calibrate = false;
    int replicates = 1000;
    double alpha = 0.05;
    double margin = 1.3;
    std::string seed = "1";
    double pc = 0.0;
    bool pc_given = false;
    std::string cache_dir = ".calib-cache";
    bool no_cache = false;
    unsigned threads = 0;
  } d;
  CLI::App* detect_cmd = app.add_subcommand("detect", "Test one image for an object");
  detect_cmd->add_option("--input", d.input, "Image file to test")->required();
  detect_cmd->add_option("--format", d.format, "Input format: pgm or csv")
      ->capture_default_str();
  detect_cmd->add_flag("--invert", d.invert, "Flip the gray scale (source has black = 0)");
  add_noise_options(detect_cmd, d.noise);
  auto* theta_opt = detect_cmd->add_option("--theta", d.theta, "Fixed pixel threshold");
  auto* auto_theta_opt = detect_cmd->add_option(
      "--auto-theta", d.auto_theta, "Choose the threshold: 'quadratic' or 'sign'");
  theta_opt->excludes(auto_theta_opt);
  detect_cmd->add_option("--grid-step", d.grid_step, "Grid step for --auto-theta quadratic")
      ->capture_default_str();
  auto* phi_opt = detect_cmd->add_option("--phi", d.phi, "Fixed detection cluster size");
  auto* calib_opt = detect_cmd->add_flag("--calibrate", d.do_calibrate,
                                         "Calibrate the cluster size by null simulation");
  phi_opt->excludes(calib_opt);
  detect_cmd->add_option("--replicates", d.replicates, "Null replicates for --calibrate")
      ->capture_default_str();
  detect_cmd->add_option("--alpha", d.alpha, "False detection level for --calibrate")
      ->capture_default_str();
  detect_cmd->add_option("--margin", d.margin, "Safety margin on the null quantile")
      ->capture_default_str();
  detect_cmd->add_option("--seed", d.seed, "Seed (decimal or 0x-hex) for --calibrate")
      ->capture_default_str();
  detect_cmd->add_option("--pc", d.pc, "Critical site probability")
      ->each([&d](const std::string&) { d.pc_given = true; });
  detect_cmd->add_option("--cache-dir", d.cache_dir, "Null-sample cache directory")
      ->capture_default_str();
  detect_cmd->add_flag("--no-cache", d.no_cache, "Disable the calibration cache");
  detect_cmd->add_option("--threads", d.threads, "Worker threads (0 = hardware)");
  detect_cmd->add_option("--output", d.output, "Also write the JSON report here");

  // ---- calibrate -------------------------------------------------------
  struct {
    int width = 0, height = 0;
    NoiseOpts noise;
    double theta = 0.0;
    double alpha = 0.05;
    int replicates = 0;
    std::string seed;
    double margin = 1.3;
    std::string cache_dir = ".calib-cache";
    bool no_cache = false;
    std::string samples_csv, output;
    unsigned threads = 0;
  } c;
  CLI::App* calibrate_cmd =
      app.add_subcommand("calibrate", "Calibrate the detection cluster size on pure noise");
  calibrate_cmd->add_option("--width", c.width, "Lattice width")->required();
  calibrate_cmd->add_option("--height", c.height, "Lattice height")->required();
  add_noise_options(calibrate_cmd, c.noise);
  calibrate_cmd->add_option("--theta", c.theta, "Pixel threshold")->required();
  calibrate_cmd->add_option("--alpha", c.alpha, "False detection level")->capture_default_str();
  calibrate_cmd->add_option("--replicates", c.replicates, "Null replicates")->required();
  calibrate_cmd->add_option("--seed", c.seed, "Seed (decimal or 0x-hex)")->required();
  calibrate_cmd->add_option("--margin", c.margin, "Safety margin on the null quantile")
      ->capture_default_str();
  calibrate_cmd->add_option("--cache-dir", c.cache_dir, "Null-sample cache directory")
      ->capture_default_str();
  calibrate_cmd->add_flag("--no-cache", c.no_cache, "Disable the calibration cache");
  calibrate_cmd->add_option("--samples-csv", c.samples_csv, "Write null maxima as CSV here");
  calibrate_cmd->add_option("--threads", c.threads, "Worker threads (0 = hardware)");
  calibrate_cmd->add_option("--output", c.output, "Also write the JSON report here");

  // ---- optimize-theta --------------------------------------------------
  struct {
    NoiseOpts noise;
    double pc = 0.0;
    bool pc_given = false;
    std::string objective = "quadratic";
    double grid_step = 1e-3;
    std::string output;
  } t;
  CLI::App* theta_cmd =
      app.add_subcommand("optimize-theta", "Pick a threshold separating the two phases");
  add_noise_options(theta_cmd, t.noise);
  theta_cmd->add_option("--pc", t.pc, "Critical site probability")
      ->each([&t](const std::string&) { t.pc_given = true; });
  theta_cmd->add_option("--objective", t.objective, "'quadratic' or 'sign'")
      ->capture_default_str();
  theta_cmd->add_option("--grid-step", t.grid_step, "Search grid step")->capture_default_str();
  theta_cmd->add_option("--output", t.output, "Also write the JSON report here");

  // ---- simulate --------------------------------------------------------
  struct {
    std::string truth;
    int width = 0, height = 0;
    std::string format = "pgm";
    bool invert = false;
    NoiseOpts noise;
    double theta = 0.0;
    int phi = 0;
    int runs = 0;
    std::string seed;
    std::string out_csv, output;
    unsigned threads = 0;
  } s;
  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "Measure the detection rate on synthetic observations");
  simulate_cmd
      ->add_option("--truth", s.truth, "Truth: 'empty', 'square:SIDE@ROW,COL', or image path")
      ->required();
  simulate_cmd->add_option("--width", s.width, "Lattice width")->required();
  simulate_cmd->add_option("--height", s.height, "Lattice height")->required();
  simulate_cmd->add_option("--format", s.format, "Truth image format: pgm or csv")
      ->capture_default_str();
  simulate_cmd->add_flag("--invert", s.invert, "Flip the gray scale of a truth image");
  add_noise_options(simulate_cmd, s.noise);
  simulate_cmd->add_option("--theta", s.theta, "Pixel threshold")->required();
  simulate_cmd->add_option("--phi", s.phi, "Detection cluster size")->required();
  simulate_cmd->add_option("--runs", s.runs, "Number of noisy observations")->required();
  simulate_cmd->add_option("--seed", s.seed, "Seed (decimal or 0x-hex)")->required();
  simulate_cmd->add_option("--out-csv", s.out_csv, "Write per-run outcomes as CSV here");
  simulate_cmd->add_option("--threads", s.threads, "Worker threads (0 = hardware)");
  simulate_cmd->add_option("--output", s.output, "Also write the JSON report here");

  // ---- percolation-check -----------------------------------------------
  struct {
    std::string mode;
    double p = 0.0;
    int size = 0;
    int replicates = 0;
    std::string seed;
    double pc = 0.0;
    bool pc_given = false;
    unsigned threads = 0;
    std::string output;
  } k;
  CLI::App* check_cmd = app.add_subcommand(
      "percolation-check", "Empirical subcritical tail rate or crossing probability");
  check_cmd->add_option("--mode", k.mode, "'tail' or 'crossing'")->required();
  check_cmd->add_option("--p", k.p, "Site occupation probability")->required();
  check_cmd->add_option("--size", k.size, "Lattice side length")->required();
  check_cmd->add_option("--replicates", k.replicates, "Simulated fields")->required();
  check_cmd->add_option("--seed", k.seed, "Seed (decimal or 0x-hex)")->required();
  check_cmd->add_option("--pc", k.pc, "Critical site probability")
      ->each([&k](const std::string&) { k.pc_given = true; });
  check_cmd->add_option("--threads", k.threads, "Worker threads (0 = hardware)");
  check_cmd->add_option("--output", k.output, "Also write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*detect_cmd) {
      double pc = d.pc_given ? d.pc : default_pc();
      if (!(pc > 0.0 && pc < 1.0))
        throw std::invalid_argument("--pc must lie strictly between 0 and 1");
      // The noise model is consulted only for choosing theta or calibrating
      // phi; a fully pinned run (--theta with --phi) works without one. Build
      // it eagerly anyway when noise options were given, so typos still fail.
      std::optional<pd::NoiseModel> model;
      auto the_model = [&]() -> const pd::NoiseModel& {
        if (!model) model = build_noise(d.noise);
        return *model;
      };
      if (d.noise.sigma_given || d.noise.spec != "gaussian") (void)the_model();
      double theta;
      if (theta_opt->count() > 0) {
        theta = d.theta;
      } else if (auto_theta_opt->count() > 0) {
        theta =
            pd::optimize_theta(the_model(), pc, parse_objective(d.auto_theta), d.grid_step);
      } else {
        throw std::invalid_argument("one of --theta or --auto-theta is required");
      }
      if (phi_opt->count() == 0 && !d.do_calibrate)
        throw std::invalid_argument("one of --phi or --calibrate is required");

      pd::GrayImage img = pd::read_image(d.input, parse_format(d.format), d.invert);
      pd::DetectionConfig config;
      if (model) {
        config.threshold = pd::make_threshold_config(*model, theta, pc);
      } else {
        config.threshold.theta = theta;
        config.threshold.p_c = pc;
      }
      config.alpha = d.alpha;
      std::optional<std::uint64_t> report_seed;
      if (d.do_calibrate) {
        std::uint64_t seed = parse_seed(d.seed);
        std::optional<std::filesystem::path> cache;
        if (!d.no_cache && !d.cache_dir.empty()) cache = d.cache_dir;
        pd::CalibrationResult calib =
            pd::calibrate(img.width, img.height, the_model(), theta, d.alpha, d.replicates,
                          seed, d.margin, cache, d.threads);
        config.phi = calib.phi;
        config.source_of_phi = pd::PhiSource::kCalibrated;
        report_seed = seed;
      } else {
        config.phi = d.phi;
        config.source_of_phi = pd::PhiSource::kUserFixed;
      }
      pd::DetectionResult result = pd::detect(img, config);
      emit_report(pd::to_report_json(result, report_seed), d.output);
      return 0;
    }

    if (*calibrate_cmd) {
      pd::NoiseModel model = build_noise(c.noise);
      std::optional<std::filesystem::path> cache;
      if (!c.no_cache && !c.cache_dir.empty()) cache = c.cache_dir;
      pd::CalibrationResult result =
          pd::calibrate(c.width, c.height, model, c.theta, c.alpha, c.replicates,
                        parse_seed(c.seed), c.margin, cache, c.threads);
      if (!c.samples_csv.empty())
        pd::detail::atomic_write_file(c.samples_csv, pd::samples_csv(result));
      emit_report(pd::to_report_json(result), c.output);
      return 0;
    }

    if (*theta_cmd) {
      pd::NoiseModel model = build_noise(t.noise);
      double pc = t.pc_given ? t.pc : default_pc();
      if (!(pc > 0.0 && pc < 1.0))
        throw std::invalid_argument("--pc must lie strictly between 0 and 1");
      double theta = pd::optimize_theta(model, pc, parse_objective(t.objective), t.grid_step);
      auto interval = pd::feasible_theta_interval(model, pc);
      pd::PercolationProbs probs = pd::percolation_probs(model, theta);
      nlohmann::json doc{{"theta", theta},
                         {"objective", t.objective},
                         {"p_c", pc},
                         {"p_out", probs.p_out},
                         {"p_im", probs.p_im},
                         {"feasible_interval",
                          {{"lo", interval->lo}, {"hi", interval->hi}}}};
      emit_report(doc, t.output);
      return 0;
    }

    if (*simulate_cmd) {
      pd::NoiseModel model = build_noise(s.noise);
      std::string descriptor;
      pd::BinaryImage truth =
          build_truth(s.truth, s.width, s.height, s.format, s.invert, descriptor);
      pd::ExperimentReport report = pd::run_experiment(
          truth, model, s.theta, s.phi, s.runs, parse_seed(s.seed), descriptor, s.threads);
      std::cerr << "mean detect time: " << report.mean_elapsed_ms << " ms over " << report.runs
                << " runs\n";
      if (!s.out_csv.empty())
        pd::detail::atomic_write_file(s.out_csv, pd::outcomes_csv(report));
      emit_report(pd::to_report_json(report), s.output);
      return 0;
    }

    if (*check_cmd) {
      double pc = k.pc_given ? k.pc : default_pc();
      if (!(pc > 0.0 && pc < 1.0))
        throw std::invalid_argument("--pc must lie strictly between 0 and 1");
      std::uint64_t seed = parse_seed(k.seed);
      nlohmann::json doc{{"mode", k.mode}, {"p", k.p},       {"size", k.size},
                         {"replicates", k.replicates},       {"seed", seed}};
      if (k.mode == "tail") {
        doc["p_c"] = pc;
        auto fit = pd::estimate_tail_rate(k.p, k.size, k.replicates, seed, pc, k.threads);
        if (fit) {
          doc["fit"] = {{"lambda_hat", fit->lambda_hat},
                        {"r_squared", fit->r_squared},
                        {"points", fit->points}};
        } else {
          doc["fit"] = nullptr;
        }
      } else if (k.mode == "crossing") {
        doc["crossing_probability"] =
            pd::crossing_probability(k.p, k.size, k.replicates, seed, k.threads);
      } else {
        throw std::invalid_argument("--mode must be 'tail' or 'crossing', got '" + k.mode + "'");
      }
      emit_report(doc, k.output);
      return 0;
    }
  } catch (const pd::infeasible_error& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;  // unreachable: require_subcommand guarantees one branch ran
}
