#include "vnrrt/bench.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <map>
#include <memory>

#include "vnrrt/error.hpp"
#include "vnrrt/oracle.hpp"
#include "vnrrt/random.hpp"

namespace vnrrt {

std::string_view algorithm_name(AlgorithmName name) {
  switch (name) {
    case AlgorithmName::RrtStar: return "rrt_star";
    case AlgorithmName::NrrtStar: return "nrrt_star";
    case AlgorithmName::VnrrtStar: return "vnrrt_star";
    case AlgorithmName::MVnrrtStar: return "m_vnrrt_star";
  }
  return "?";
}

AlgorithmName parse_algorithm(std::string_view text) {
  if (text == "rrt_star" || text == "rrt") return AlgorithmName::RrtStar;
  if (text == "nrrt_star" || text == "nrrt") return AlgorithmName::NrrtStar;
  if (text == "vnrrt_star" || text == "vnrrt") return AlgorithmName::VnrrtStar;
  if (text == "m_vnrrt_star" || text == "m-vnrrt" || text == "m_vnrrt") return AlgorithmName::MVnrrtStar;
  throw InvalidConfig("unknown algorithm '" + std::string(text) + "'");
}

GuidanceSource GuidanceSource::parse(std::string_view text) {
  if (text == "oracle-path") return {Kind::OraclePath, {}};
  if (text == "oracle-vertex") return {Kind::OracleVertex, {}};
  if (text.starts_with("file:") && text.size() > 5) return {Kind::File, std::string(text.substr(5))};
  throw InvalidConfig("guidance source must be oracle-path, oracle-vertex or file:<path>, got '" +
                      std::string(text) + "'");
}

std::string GuidanceSource::resolve(std::string_view map_id) const {
  std::string id(map_id);
  std::replace(id.begin(), id.end(), '/', '_');
  if (const auto at = path.find("{map_id}"); at != std::string::npos) {
    return path.substr(0, at) + id + path.substr(at + 8);
  }
  if (std::filesystem::is_directory(path)) return (std::filesystem::path(path) / (id + ".vgm")).string();
  return path;
}

AlgorithmSpec AlgorithmSpec::make(AlgorithmName name, std::optional<double> tau,
                                  std::optional<GuidanceSource> guidance) {
  AlgorithmSpec spec;
  spec.name = name;
  if (tau) spec.tau.emplace(*tau);
  if (guidance) {
    spec.guidance = *guidance;
  } else if (name == AlgorithmName::NrrtStar) {
    spec.guidance.kind = GuidanceSource::Kind::OraclePath;
  } else if (name != AlgorithmName::RrtStar) {
    spec.guidance.kind = GuidanceSource::Kind::OracleVertex;
  }
  spec.validate();
  return spec;
}

void AlgorithmSpec::validate() const {
  if (tau.has_value() != (name == AlgorithmName::MVnrrtStar)) {
    throw InvalidConfig("a mask threshold is required for m_vnrrt_star and only for it");
  }
  const bool has_guidance = guidance.kind != GuidanceSource::Kind::None;
  if (has_guidance == (name == AlgorithmName::RrtStar)) {
    throw InvalidConfig(name == AlgorithmName::RrtStar ? "rrt_star takes no guidance source"
                                                       : "guided algorithms need a guidance source");
  }
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

}  // namespace

std::string AlgorithmSpec::label() const {
  std::string s(algorithm_name(name));
  if (tau) s += "[tau=" + format_double(tau->value()) + "]";
  return s;
}

std::string map_set_of(std::string_view map_id) {
  const auto slash = map_id.rfind('/');
  return slash == std::string_view::npos ? "all" : std::string(map_id.substr(0, slash));
}

std::string_view trial_status_name(TrialStatus s) {
  switch (s) {
    case TrialStatus::Solved: return "Solved";
    case TrialStatus::IterationBudgetExhausted: return "IterationBudgetExhausted";
    case TrialStatus::Error: return "Error";
  }
  return "?";
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::string_view map_id,
                         std::string_view algorithm, int trial) {
  std::uint64_t h = combine_seed(base_seed, fnv1a(map_id));
  h = combine_seed(h, fnv1a(algorithm));
  return combine_seed(h, static_cast<std::uint64_t>(trial));
}

// ---------------------------------------------------------------------------

namespace {

struct Prepared {
  double reference_cost = 0.0;
  // One raster per algorithm; null for rrt_star.
  std::vector<std::shared_ptr<const GuidanceMap>> guidance;
};

struct Job {
  std::size_t instance;
  std::size_t algorithm;
  int trial;
};

void check_inputs(std::span<const BenchInstance> instances, std::span<const AlgorithmSpec> algorithms,
                  const BenchConfig& config) {
  if (config.trials < 1) throw InvalidConfig("trials must be >= 1");
  if (config.jobs < 1) throw InvalidConfig("jobs must be >= 1");
  for (const auto& a : algorithms) a.validate();
  for (const auto& inst : instances) {
    if (inst.map_id.empty() || inst.map_id.find_first_of(",\n\r") != std::string::npos) {
      throw InvalidConfig("map id '" + inst.map_id + "' must be nonempty without commas or newlines");
    }
  }
}

std::vector<Prepared> prepare(std::span<const BenchInstance> instances,
                              std::span<const AlgorithmSpec> algorithms, const BenchConfig& config) {
  std::vector<Prepared> out(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    out[i].reference_cost = astar(inst.map).cost;
    std::shared_ptr<const GuidanceMap> path_mode, vertex_mode;
    for (const auto& algo : algorithms) {
      std::shared_ptr<const GuidanceMap> g;
      switch (algo.guidance.kind) {
        case GuidanceSource::Kind::None:
          break;
        case GuidanceSource::Kind::OraclePath:
          if (!path_mode) {
            path_mode = std::make_shared<const GuidanceMap>(oracle_guidance(
                inst.map, inst.map.start(), inst.map.goal(), GuidanceMode::Path, config.sigma));
          }
          g = path_mode;
          break;
        case GuidanceSource::Kind::OracleVertex:
          if (!vertex_mode) {
            vertex_mode = std::make_shared<const GuidanceMap>(oracle_guidance(
                inst.map, inst.map.start(), inst.map.goal(), GuidanceMode::Vertex, config.sigma));
          }
          g = vertex_mode;
          break;
        case GuidanceSource::Kind::File: {
          const auto file = algo.guidance.resolve(inst.map_id);
          if (!std::filesystem::is_regular_file(file)) {
            throw GuidanceFileMissing("guidance raster '" + file + "' for map '" + inst.map_id +
                                      "' does not exist");
          }
          g = std::make_shared<const GuidanceMap>(load_guidance(file));
          break;
        }
      }
      out[i].guidance.push_back(std::move(g));
    }
  }
  return out;
}

std::vector<Job> enumerate_jobs(std::size_t n_instances, std::size_t n_algorithms, int trials) {
  std::vector<Job> jobs;
  jobs.reserve(n_instances * n_algorithms * static_cast<std::size_t>(trials));
  for (std::size_t i = 0; i < n_instances; ++i) {
    for (std::size_t a = 0; a < n_algorithms; ++a) {
      for (int t = 0; t < trials; ++t) jobs.push_back({i, a, t});
    }
  }
  return jobs;
}

TrialRecord run_trial(const BenchInstance& inst, const AlgorithmSpec& algo, const Prepared& prep,
                      std::size_t algo_index, const BenchConfig& config, int trial) {
  TrialRecord rec;
  rec.map_id = inst.map_id;
  rec.algorithm = std::string(algorithm_name(algo.name));
  if (algo.tau) rec.tau = algo.tau->value();
  rec.trial = trial;
  rec.seed = trial_seed(config.base_seed, inst.map_id, rec.algorithm, trial);

  PlannerConfig pc = config.planner;
  pc.seed = rec.seed;
  pc.mask = algo.tau;
  if (algo.name == AlgorithmName::RrtStar) pc.guided_mix = 0.0;
  pc.termination = config.termination == Termination::Kind::Initial
                       ? Termination::initial()
                       : Termination::optimal(config.epsilon, prep.reference_cost);
  try {
    const PlanResult r = plan(inst.map, pc, prep.guidance[algo_index].get());
    rec.status = r.status == PlanStatus::Solved ? TrialStatus::Solved
                                                : TrialStatus::IterationBudgetExhausted;
    if (rec.status == TrialStatus::Solved) rec.path_length = r.best_cost;
    rec.time_s = r.wall_time_s;
    rec.iterations = r.iterations_used;
    rec.iters_to_first = r.iterations_to_first_solution;
  } catch (const Error&) {
    rec.status = TrialStatus::Error;
  }
  return rec;
}

}  // namespace

std::vector<TrialRecord> run_benchmark_serial(std::span<const BenchInstance> instances,
                                              std::span<const AlgorithmSpec> algorithms,
                                              const BenchConfig& config) {
  check_inputs(instances, algorithms, config);
  const auto prepared = prepare(instances, algorithms, config);
  std::vector<TrialRecord> records;
  for (const auto& job : enumerate_jobs(instances.size(), algorithms.size(), config.trials)) {
    records.push_back(run_trial(instances[job.instance], algorithms[job.algorithm],
                                prepared[job.instance], job.algorithm, config, job.trial));
  }
  return records;
}

std::vector<TrialRecord> run_benchmark(std::span<const BenchInstance> instances,
                                       std::span<const AlgorithmSpec> algorithms,
                                       const BenchConfig& config) {
  check_inputs(instances, algorithms, config);
  const auto prepared = prepare(instances, algorithms, config);
  const auto jobs = enumerate_jobs(instances.size(), algorithms.size(), config.trials);
  std::vector<TrialRecord> records(jobs.size());
  const auto n = static_cast<std::int64_t>(jobs.size());
#pragma omp parallel for schedule(dynamic) num_threads(config.jobs)
  for (std::int64_t j = 0; j < n; ++j) {
    const auto& job = jobs[static_cast<std::size_t>(j)];
    records[static_cast<std::size_t>(j)] =
        run_trial(instances[job.instance], algorithms[job.algorithm], prepared[job.instance],
                  job.algorithm, config, job.trial);
  }
  return records;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.push_back(line.substr(pos, next == std::string_view::npos ? next : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

template <class T>
T parse_number(std::string_view field, int line, int column) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError("invalid number '" + std::string(field) + "'", line, column);
  }
  return value;
}

template <class T>
std::optional<T> parse_optional(std::string_view field, int line, int column) {
  if (field.empty()) return std::nullopt;
  return parse_number<T>(field, line, column);
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

TrialStatus parse_status(std::string_view s, int line, int column) {
  for (auto st : {TrialStatus::Solved, TrialStatus::IterationBudgetExhausted, TrialStatus::Error}) {
    if (trial_status_name(st) == s) return st;
  }
  throw ParseError("unknown status '" + std::string(s) + "'", line, column);
}

constexpr std::string_view kTrialHeader =
    "map_id,algorithm,tau,trial,seed,status,path_length,time_s,iterations,iters_to_first";
constexpr std::string_view kSummaryHeader = "algorithm,map_set,metric,mean,std,n";
constexpr std::string_view kImprovementColumn = "improvement_vs_rrtstar_pct";

}  // namespace

std::string write_trials_csv(std::span<const TrialRecord> records, bool include_timing) {
  std::string out(kTrialHeader);
  out += '\n';
  for (const auto& r : records) {
    out += r.map_id + ',' + r.algorithm + ',' + opt(r.tau) + ',' + std::to_string(r.trial) + ',' +
           std::to_string(r.seed) + ',' + std::string(trial_status_name(r.status)) + ',' +
           opt(r.path_length) + ',' + (include_timing ? opt(r.time_s) : std::string()) + ',' +
           std::to_string(r.iterations) + ',' +
           (r.iters_to_first ? std::to_string(*r.iters_to_first) : std::string()) + '\n';
  }
  return out;
}

std::vector<TrialRecord> read_trials_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != kTrialHeader) throw ParseError("unexpected trial CSV header", 1, 1);
  std::vector<TrialRecord> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const int ln = static_cast<int>(i) + 1;
    const auto f = split(lines[i], ',');
    if (f.size() != 10) throw ParseError("expected 10 fields, got " + std::to_string(f.size()), ln, 1);
    TrialRecord r;
    r.map_id = std::string(f[0]);
    r.algorithm = std::string(f[1]);
    r.tau = parse_optional<double>(f[2], ln, 3);
    r.trial = parse_number<int>(f[3], ln, 4);
    r.seed = parse_number<std::uint64_t>(f[4], ln, 5);
    r.status = parse_status(f[5], ln, 6);
    r.path_length = parse_optional<double>(f[6], ln, 7);
    r.time_s = parse_optional<double>(f[7], ln, 8);
    r.iterations = parse_number<int>(f[8], ln, 9);
    r.iters_to_first = parse_optional<int>(f[9], ln, 10);
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string record_label(const TrialRecord& r) {
  std::string s = r.algorithm;
  if (r.tau) s += "[tau=" + format_double(*r.tau) + "]";
  return s;
}

SummaryRow stats_row(std::string algorithm, std::string map_set, std::string metric,
                     const std::vector<double>& xs) {
  SummaryRow row;
  row.algorithm = std::move(algorithm);
  row.map_set = std::move(map_set);
  row.metric = std::move(metric);
  row.n = static_cast<int>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  row.mean = sum / static_cast<double>(xs.size());
  if (xs.size() >= 2) {
    double ss = 0.0;
    for (double x : xs) ss += (x - row.mean) * (x - row.mean);
    row.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return row;
}

}  // namespace

std::vector<SummaryRow> summarize(std::span<const TrialRecord> records) {
  if (records.empty()) throw EmptyInput("no trial records to summarize");

  struct Group {
    std::vector<double> path_length, time_cost, iterations, success;
  };
  // Keyed by (map_set, algorithm label) in first-appearance order.
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, Group> groups;
  for (const auto& r : records) {
    std::pair key{map_set_of(r.map_id), record_label(r)};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    auto& g = it->second;
    g.success.push_back(r.status == TrialStatus::Solved ? 1.0 : 0.0);
    if (r.status == TrialStatus::Error) continue;
    if (r.status == TrialStatus::Solved && r.path_length) g.path_length.push_back(*r.path_length);
    if (r.time_s) g.time_cost.push_back(*r.time_s);
    g.iterations.push_back(static_cast<double>(r.iterations));
  }

  std::vector<SummaryRow> rows;
  for (const auto& key : order) {
    const auto& g = groups.at(key);
    const auto& [set, label] = key;
    for (const auto& [metric, xs] : {std::pair{"path_length", &g.path_length},
                                     std::pair{"time_cost", &g.time_cost},
                                     std::pair{"iterations", &g.iterations},
                                     std::pair{"success_rate", &g.success}}) {
      if (!xs->empty()) rows.push_back(stats_row(label, set, metric, *xs));
    }
  }

  const std::string baseline(algorithm_name(AlgorithmName::RrtStar));
  for (auto& row : rows) {
    if (row.algorithm == baseline || (row.metric != "time_cost" && row.metric != "iterations")) continue;
    const auto base = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& b) {
      return b.algorithm == baseline && b.map_set == row.map_set && b.metric == row.metric;
    });
    if (base != rows.end() && row.mean > 0.0) {
      row.improvement_pct = 100.0 * (base->mean - row.mean) / row.mean;
    }
  }
  return rows;
}

std::string write_summary_csv(std::span<const SummaryRow> rows) {
  const bool with_improvement =
      std::any_of(rows.begin(), rows.end(), [](const SummaryRow& r) { return r.improvement_pct.has_value(); });
  std::string out(kSummaryHeader);
  if (with_improvement) out += "," + std::string(kImprovementColumn);
  out += '\n';
  for (const auto& r : rows) {
    out += r.algorithm + ',' + r.map_set + ',' + r.metric + ',' + format_double(r.mean) + ',' +
           opt(r.std) + ',' + std::to_string(r.n);
    if (with_improvement) out += ',' + opt(r.improvement_pct);
    out += '\n';
  }
  return out;
}

std::vector<SummaryRow> read_summary_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ParseError("empty summary CSV", 1, 1);
  bool with_improvement = false;
  if (lines[0] == std::string(kSummaryHeader) + "," + std::string(kImprovementColumn)) {
    with_improvement = true;
  } else if (lines[0] != kSummaryHeader) {
    throw ParseError("unexpected summary CSV header", 1, 1);
  }
  const std::size_t fields = with_improvement ? 7 : 6;
  std::vector<SummaryRow> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const int ln = static_cast<int>(i) + 1;
    const auto f = split(lines[i], ',');
    if (f.size() != fields) throw ParseError("expected " + std::to_string(fields) + " fields", ln, 1);
    SummaryRow r;
    r.algorithm = std::string(f[0]);
    r.map_set = std::string(f[1]);
    r.metric = std::string(f[2]);
    r.mean = parse_number<double>(f[3], ln, 4);
    r.std = parse_optional<double>(f[4], ln, 5);
    r.n = parse_number<int>(f[5], ln, 6);
    if (with_improvement) r.improvement_pct = parse_optional<double>(f[6], ln, 7);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace vnrrt
