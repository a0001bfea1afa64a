#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vnrrt/gridmap.hpp"
#include "vnrrt/guidance.hpp"
#include "vnrrt/planner.hpp"

namespace vnrrt {

enum class AlgorithmName { RrtStar, NrrtStar, VnrrtStar, MVnrrtStar };

std::string_view algorithm_name(AlgorithmName name);
/// Accepts the canonical names and the short forms rrt, nrrt, vnrrt, m-vnrrt.
AlgorithmName parse_algorithm(std::string_view text);

struct GuidanceSource {
  enum class Kind { None, OraclePath, OracleVertex, File };

  Kind kind = Kind::None;
  /// For File: a raster path, a directory holding <map_id>.vgm, or a
  /// template containing "{map_id}".
  std::string path;

  /// "oracle-path", "oracle-vertex" or "file:<path>".
  static GuidanceSource parse(std::string_view text);
  std::string resolve(std::string_view map_id) const;
};

struct AlgorithmSpec {
  AlgorithmName name = AlgorithmName::RrtStar;
  std::optional<MaskThreshold> tau;
  GuidanceSource guidance;

  /// Fills the customary guidance source when none is given: oracle-path for
  /// nrrt_star, oracle-vertex for the vertex-guided variants.
  static AlgorithmSpec make(AlgorithmName name, std::optional<double> tau = std::nullopt,
                            std::optional<GuidanceSource> guidance = std::nullopt);

  /// tau iff m_vnrrt_star; guidance iff not rrt_star. Throws InvalidConfig.
  void validate() const;
  /// Name plus tau, e.g. "m_vnrrt_star[tau=0.9]".
  std::string label() const;
};

struct BenchInstance {
  std::string map_id;  // "<map_set>/<name>" groups maps into sets
  GridMap map;
};

std::string map_set_of(std::string_view map_id);

struct BenchConfig {
  PlannerConfig planner;  // seed, termination reference and mask are set per trial
  Termination::Kind termination = Termination::Kind::Initial;
  double epsilon = 0.02;
  int trials = 1;
  std::uint64_t base_seed = 0;
  double sigma = kDefaultSigma;
  int jobs = 1;
};

enum class TrialStatus { Solved, IterationBudgetExhausted, Error };

std::string_view trial_status_name(TrialStatus s);

struct TrialRecord {
  std::string map_id;
  std::string algorithm;
  std::optional<double> tau;
  int trial = 0;
  std::uint64_t seed = 0;
  TrialStatus status = TrialStatus::Error;
  std::optional<double> path_length;  // present iff Solved
  std::optional<double> time_s;
  int iterations = 0;
  std::optional<int> iters_to_first;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

std::uint64_t trial_seed(std::uint64_t base_seed, std::string_view map_id,
                         std::string_view algorithm, int trial);

/// Every (instance, algorithm, trial) in that order. Guidance rasters and A*
/// reference costs are computed once per instance. Planner errors become
/// Error records. Trials run on `config.jobs` OpenMP threads; the serial
/// variant is the reference and yields identical records apart from time_s.
/// Throws GuidanceFileMissing, InvalidConfig, NoPath.
std::vector<TrialRecord> run_benchmark(std::span<const BenchInstance> instances,
                                       std::span<const AlgorithmSpec> algorithms,
                                       const BenchConfig& config);
std::vector<TrialRecord> run_benchmark_serial(std::span<const BenchInstance> instances,
                                              std::span<const AlgorithmSpec> algorithms,
                                              const BenchConfig& config);

/// map_id,algorithm,tau,trial,seed,status,path_length,time_s,iterations,iters_to_first
std::string write_trials_csv(std::span<const TrialRecord> records, bool include_timing = true);
std::vector<TrialRecord> read_trials_csv(std::string_view text);

struct SummaryRow {
  std::string algorithm;
  std::string map_set;
  std::string metric;  // path_length, time_cost, iterations, success_rate
  double mean = 0.0;
  std::optional<double> std;  // sample std, n >= 2
  int n = 0;
  std::optional<double> improvement_pct;  // 100 * (rrt_star - alg) / alg

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

/// Throws EmptyInput.
std::vector<SummaryRow> summarize(std::span<const TrialRecord> records);

/// algorithm,map_set,metric,mean,std,n[,improvement_vs_rrtstar_pct]; the last
/// column is present only when some row carries an improvement.
std::string write_summary_csv(std::span<const SummaryRow> rows);
std::vector<SummaryRow> read_summary_csv(std::string_view text);

}  // namespace vnrrt
