#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "appletaste/game.hpp"

namespace appletaste {

struct SweepConfig {
  std::string learner;
  std::string adversary;
  std::vector<std::size_t> n;
  std::vector<std::size_t> T;
  std::vector<std::size_t> k{0};
  std::vector<std::uint64_t> seeds{1};
  bool n_equals_T = false;  // pair each T with n = T instead of crossing the grids

  // Class-game settings: a class file, or a random class sampled per cell
  // with domain size T (random_class_d > 0).
  std::string class_file;
  std::size_t random_class_d = 0;
  double c = 1.0;

  // Overrides of the learner's parameters (expert learners only).
  std::optional<double> eta;
  std::optional<double> L;
  // Version-space adversary threshold; default T^(d/2) for random classes.
  std::optional<std::size_t> vs_threshold;

  std::string output;
  std::size_t threads = 0;  // 0 = hardware concurrency
};

// INI-style text: a [sweep] section (learner, adversary, n, T, k, seeds,
// n_equals_T, output, threads) and an optional [params] section (eta, L, c,
// class_file, random_class_d, vs_threshold). Grid values are comma lists,
// "a..b" ranges, or "2^a..2^b" power-of-two ranges.
SweepConfig parse_sweep_config(std::istream& in);
SweepConfig load_sweep_config(const std::string& path);
std::vector<std::size_t> parse_grid(const std::string& text);

struct RunRow {
  std::string learner;
  std::string adversary;
  std::size_t n = 0;
  std::size_t T = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  bool skipped = false;
  std::string skip_reason;
  MistakeReport mistakes;
  std::optional<double> bound;  // learner upper bound, else the adversary's forced floor
  std::optional<double> upper;
  std::optional<double> floor;
  bool certificate_ok = true;
  bool within_bound = true;
};

const char* run_csv_header();
std::vector<RunRow> run_sweep(const SweepConfig& config);
void write_run_csv(std::ostream& out, const std::vector<RunRow>& rows);
// Runs the sweep, writes the CSV (to config.output or `fallback`), and
// returns the number of rows that failed a check.
std::size_t cmd_run(const SweepConfig& config, std::ostream& fallback);

struct ScalingFit {
  std::string group;
  double alpha = 0;  // exponent
  double a = 0;      // coefficient
  double residual = 0;  // RMS of log2 residuals
  std::size_t samples = 0;
};

// Ordinary least squares of log M = log a + alpha log T; needs >= 4 points
// with distinct x and non-constant positive y.
ScalingFit fit_power_law(const std::vector<std::pair<double, double>>& points);

// Groups rows of a run CSV by the given columns, takes the median mistakes
// per T over seeds, and fits each group.
std::vector<ScalingFit> cmd_fit(std::istream& csv, const std::vector<std::string>& group_by);
void write_fit_csv(std::ostream& out, const std::vector<ScalingFit>& fits);

}  // namespace appletaste
