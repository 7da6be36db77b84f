// Experiment orchestration: Monte Carlo, stratified and saturation-hunt
// sampling over collisions, summary statistics and persistence.

#pragma once

#include "naqtur/collision.hpp"
#include "naqtur/csv.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace naqtur {

enum class Strategy { MonteCarlo, Stratified, SaturationHunt };
enum class StratAxis { SSimple, BoundB };

std::string_view to_string(Strategy s);
std::string_view to_string(StratAxis a);
Strategy parse_strategy(std::string_view text);
StratAxis parse_strat_axis(std::string_view text);

// Violation thresholds for the chain Sigma >= D_bath >= B.
inline constexpr double kBoundViolationTol = 1e-9;
inline constexpr double kSigmaViolationTol = 1e-12;
inline constexpr double kSplitIdentityTol = 1e-10;

struct ExperimentConfig {
  CollisionConfig collision;
  int n_samples = 1000;
  Strategy strategy = Strategy::MonteCarlo;
  StratAxis strat_axis = StratAxis::SSimple;
  int n_bins = 20;
  double strat_min = 1e-4;
  double strat_max = 10.0;
  int hunt_rounds = 4;
  double hunt_keep_fraction = 0.2;
  // Initial Gaussian jitter widths of the saturation hunt; halved every round.
  double hunt_sigma_r = 0.05;
  double hunt_sigma_phi = 0.1;
  double hunt_sigma_log_eps = 0.5;
  double hunt_sigma_frame = 0.3;
  int quadrature_order = kDefaultQuadratureOrder;
  int summary_bins = 25;
  int workers = 1;
  std::string records_csv = "records.csv";
  std::string summary_json = "summary.json";

  void validate() const;
};

struct ExperimentRecord {
  std::uint64_t sample_id = 0;
  Strategy strategy = Strategy::MonteCarlo;
  int round = 0;
  std::optional<std::uint64_t> parent_id;
  CollisionRecord collision;
};

struct StratBins {
  StratAxis axis = StratAxis::SSimple;
  std::vector<double> edges;  // n_bins + 1, log-spaced
  std::vector<int> fill;
  int target = 0;
  std::uint64_t attempts = 0;

  std::vector<int> unreachable() const;
};

struct ExperimentResult {
  std::vector<ExperimentRecord> records;  // sorted by sample_id
  std::optional<StratBins> bins;
};

// splitmix64 avalanche of (master, index); injective in index for fixed master.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

ExperimentResult run_monte_carlo(const ExperimentConfig& config);
// Fills each log-spaced bin with ceil(n_samples / n_bins) records, within a total
// attempt budget of 10 x target per bin.
ExperimentResult run_stratified(const ExperimentConfig& config);
// Stratified baseline (round 0), then hunt_rounds of jittered resampling around the
// hunt_keep_fraction smallest-slack records per bin; only improving children are kept.
ExperimentResult run_saturation_hunt(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config);

double strat_value(const CollisionRecord& rec, StratAxis axis);

struct SlackBin {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct SummaryStats {
  std::size_t n_total = 0;
  std::size_t n_flagged = 0;
  std::size_t n_violations = 0;        // unflagged with d_bath < B - 1e-9
  std::size_t n_sigma_violations = 0;  // sigma < d_bath - 1e-12
  std::size_t n_split_violations = 0;  // |sigma - I - d_bath| > 1e-10
  double max_split_residual = 0.0;
  std::map<double, double> gap_quantiles;
  std::map<double, double> rel_slack_quantiles;
  std::vector<SlackBin> slack_bins;  // rel_slack vs ||dq||, log-spaced
  double min_rel_slack = 0.0;
  double frac_rel_slack_below_0_05 = 0.0;
  double corr_rel_slack_robertson_C = 0.0;
  std::optional<StratBins> strat_bins;
};

// Throws std::invalid_argument on an empty record list.
SummaryStats summarize(const std::vector<ExperimentRecord>& records, int n_slack_bins = 25);

// Linear-interpolated quantile of `values` (need not be sorted). NaNs are ignored.
double quantile(std::vector<double> values, double q);

// Equal-width bins in log10(x) between the smallest and largest positive x.
std::vector<SlackBin> binned_average(const std::vector<double>& x, const std::vector<double>& y,
                                     int n_bins);

const std::vector<std::string>& records_csv_columns();
void write_csv(const std::vector<ExperimentRecord>& records, const std::string& path);
std::string records_to_csv(const std::vector<ExperimentRecord>& records);
// Restores every CSV column; parameters not present in the CSV are left default.
std::vector<ExperimentRecord> read_records_csv(const std::string& path);

void write_summary_json(const SummaryStats& stats, const ExperimentConfig& config,
                        const std::string& path);

}  // namespace naqtur
