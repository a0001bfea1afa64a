#include "doctest.h"

#include <cmath>
#include <map>
#include <set>

#include "oracles.hpp"
#include "vnrrt/bench.hpp"
#include "vnrrt/error.hpp"

using namespace vnrrt;

namespace {

std::vector<BenchInstance> instances(int n, std::uint64_t seed = 1, const std::string& set = "random") {
  MapGenConfig cfg;
  cfg.width = cfg.height = 64;
  cfg.min_size = 5;
  cfg.max_size = 15;
  cfg.seed = seed;
  std::vector<BenchInstance> out;
  int i = 0;
  for (auto& m : generate_maps(cfg, n)) out.push_back({set + "/m" + std::to_string(i++), std::move(m)});
  return out;
}

TrialRecord rec(std::string map_id, std::string algo, TrialStatus st, std::optional<double> len,
                std::optional<double> t, int its) {
  TrialRecord r;
  r.map_id = std::move(map_id);
  r.algorithm = std::move(algo);
  r.status = st;
  r.path_length = len;
  r.time_s = t;
  r.iterations = its;
  r.iters_to_first = its;
  return r;
}

const SummaryRow& find_row(const std::vector<SummaryRow>& rows, const std::string& algo,
                           const std::string& set, const std::string& metric) {
  const auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& r) {
    return r.algorithm == algo && r.map_set == set && r.metric == metric;
  });
  REQUIRE(it != rows.end());
  return *it;
}

}  // namespace

TEST_CASE("algorithm names") {
  for (auto a : {AlgorithmName::RrtStar, AlgorithmName::NrrtStar, AlgorithmName::VnrrtStar,
                 AlgorithmName::MVnrrtStar}) {
    CHECK(parse_algorithm(algorithm_name(a)) == a);
  }
  CHECK(parse_algorithm("vnrrt") == AlgorithmName::VnrrtStar);
  CHECK(parse_algorithm("m-vnrrt") == AlgorithmName::MVnrrtStar);
  CHECK(parse_algorithm("rrt") == AlgorithmName::RrtStar);
  CHECK_THROWS_AS(parse_algorithm("prm"), InvalidConfig);
}

TEST_CASE("AlgorithmSpec invariants") {
  CHECK(AlgorithmSpec::make(AlgorithmName::RrtStar).guidance.kind == GuidanceSource::Kind::None);
  CHECK(AlgorithmSpec::make(AlgorithmName::NrrtStar).guidance.kind == GuidanceSource::Kind::OraclePath);
  CHECK(AlgorithmSpec::make(AlgorithmName::VnrrtStar).guidance.kind == GuidanceSource::Kind::OracleVertex);
  const auto m = AlgorithmSpec::make(AlgorithmName::MVnrrtStar, 0.9);
  CHECK(m.label() == "m_vnrrt_star[tau=0.9]");
  CHECK(AlgorithmSpec::make(AlgorithmName::VnrrtStar).label() == "vnrrt_star");
  CHECK_THROWS_AS(AlgorithmSpec::make(AlgorithmName::MVnrrtStar), InvalidConfig);
  CHECK_THROWS_AS(AlgorithmSpec::make(AlgorithmName::VnrrtStar, 0.5), InvalidConfig);
  CHECK_THROWS_AS(AlgorithmSpec::make(AlgorithmName::MVnrrtStar, 1.0), InvalidConfig);
  CHECK_THROWS_AS(AlgorithmSpec::make(AlgorithmName::RrtStar, std::nullopt,
                                      GuidanceSource::parse("oracle-vertex")),
                  InvalidConfig);
}

TEST_CASE("guidance sources") {
  CHECK(GuidanceSource::parse("oracle-path").kind == GuidanceSource::Kind::OraclePath);
  const auto f = GuidanceSource::parse("file:out/{map_id}.vgm");
  CHECK(f.kind == GuidanceSource::Kind::File);
  CHECK(f.resolve("random/m3") == "out/random_m3.vgm");
  CHECK(GuidanceSource::parse("file:x.vgm").resolve("any") == "x.vgm");
  oracles::TempDir dir;
  CHECK(GuidanceSource::parse("file:" + dir.path().string()).resolve("a/b") ==
        (dir.path() / "a_b.vgm").string());
  CHECK_THROWS_AS(GuidanceSource::parse("file:"), InvalidConfig);
  CHECK_THROWS_AS(GuidanceSource::parse("network"), InvalidConfig);
}

TEST_CASE("map sets") {
  CHECK(map_set_of("bugtrap/map_01") == "bugtrap");
  CHECK(map_set_of("a/b/c") == "a/b");
  CHECK(map_set_of("plain") == "all");
}

TEST_CASE("trial seeds are a stable hash of their inputs") {
  const auto s = trial_seed(1, "random/m0", "rrt_star", 0);
  CHECK(s == trial_seed(1, "random/m0", "rrt_star", 0));
  std::set<std::uint64_t> seen{s, trial_seed(2, "random/m0", "rrt_star", 0),
                               trial_seed(1, "random/m1", "rrt_star", 0),
                               trial_seed(1, "random/m0", "vnrrt_star", 0),
                               trial_seed(1, "random/m0", "rrt_star", 1)};
  CHECK(seen.size() == 5);
}

TEST_CASE("one map, one algorithm, three trials") {
  const auto inst = instances(1);
  const std::vector<AlgorithmSpec> algos{AlgorithmSpec::make(AlgorithmName::RrtStar)};
  BenchConfig cfg;
  cfg.trials = 3;
  cfg.base_seed = 5;
  const auto recs = run_benchmark(inst, algos, cfg);
  REQUIRE(recs.size() == 3);
  std::set<std::uint64_t> seeds;
  for (int t = 0; t < 3; ++t) {
    const auto& r = recs[static_cast<std::size_t>(t)];
    CHECK(r.trial == t);
    CHECK(r.map_id == "random/m0");
    CHECK(r.algorithm == "rrt_star");
    CHECK(r.seed == trial_seed(5, "random/m0", "rrt_star", t));
    CHECK(r.status == TrialStatus::Solved);
    CHECK(r.path_length.has_value());
    seeds.insert(r.seed);
  }
  CHECK(seeds.size() == 3);
}

TEST_CASE("adding an algorithm does not perturb existing trials") {
  const auto inst = instances(2);
  BenchConfig cfg;
  cfg.trials = 2;
  const std::vector<AlgorithmSpec> one{AlgorithmSpec::make(AlgorithmName::VnrrtStar)};
  const std::vector<AlgorithmSpec> two{AlgorithmSpec::make(AlgorithmName::RrtStar),
                                       AlgorithmSpec::make(AlgorithmName::VnrrtStar)};
  auto a = run_benchmark(inst, one, cfg);
  auto b = run_benchmark(inst, two, cfg);
  std::erase_if(b, [](const TrialRecord& r) { return r.algorithm == "rrt_star"; });
  for (auto* v : {&a, &b}) {
    for (auto& r : *v) r.time_s.reset();
  }
  CHECK(a == b);
}

TEST_CASE("reruns are identical except for wall time; CSV round-trips") {
  const auto inst = instances(3);
  const std::vector<AlgorithmSpec> algos{AlgorithmSpec::make(AlgorithmName::RrtStar),
                                         AlgorithmSpec::make(AlgorithmName::NrrtStar),
                                         AlgorithmSpec::make(AlgorithmName::MVnrrtStar, 0.5)};
  BenchConfig cfg;
  cfg.trials = 2;
  cfg.base_seed = 11;
  cfg.termination = Termination::Kind::Optimal;
  cfg.epsilon = 0.1;
  cfg.planner.max_iterations = 4000;
  const auto a = run_benchmark(inst, algos, cfg);
  const auto b = run_benchmark(inst, algos, cfg);
  CHECK(write_trials_csv(a, false) == write_trials_csv(b, false));
  CHECK(read_trials_csv(write_trials_csv(a)) == a);
  for (const auto& r : a) {
    CHECK(r.path_length.has_value() == (r.status == TrialStatus::Solved));
    CHECK(r.tau.has_value() == (r.algorithm == "m_vnrrt_star"));
  }
}

TEST_CASE("missing guidance files abort the benchmark") {
  const auto inst = instances(1);
  oracles::TempDir dir;
  const std::vector<AlgorithmSpec> algos{AlgorithmSpec::make(
      AlgorithmName::VnrrtStar, std::nullopt,
      GuidanceSource::parse("file:" + (dir.path() / "{map_id}.vgm").string()))};
  CHECK_THROWS_AS(run_benchmark(inst, algos, BenchConfig{}), GuidanceFileMissing);

  save_guidance(oracle_guidance(inst[0].map, inst[0].map.start(), inst[0].map.goal(),
                                GuidanceMode::Vertex),
                (dir.path() / "random_m0.vgm").string());
  const auto recs = run_benchmark(inst, algos, BenchConfig{});
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].status == TrialStatus::Solved);
}

TEST_CASE("planner errors become failed trials") {
  const auto inst = instances(1);
  oracles::TempDir dir;
  // Raster of the wrong size: the planner rejects it per trial.
  save_guidance(GuidanceMap(3, 3, std::vector<float>(9, 0.5f)), (dir.path() / "g.vgm").string());
  const std::vector<AlgorithmSpec> algos{AlgorithmSpec::make(
      AlgorithmName::VnrrtStar, std::nullopt,
      GuidanceSource::parse("file:" + (dir.path() / "g.vgm").string()))};
  BenchConfig cfg;
  cfg.trials = 2;
  const auto recs = run_benchmark(inst, algos, cfg);
  REQUIRE(recs.size() == 2);
  for (const auto& r : recs) {
    CHECK(r.status == TrialStatus::Error);
    CHECK_FALSE(r.path_length.has_value());
  }
  const auto rows = summarize(recs);
  CHECK(find_row(rows, "vnrrt_star", "random", "success_rate").mean == 0.0);
}

TEST_CASE("bench config validation") {
  const auto inst = instances(1);
  const std::vector<AlgorithmSpec> algos{AlgorithmSpec::make(AlgorithmName::RrtStar)};
  BenchConfig cfg;
  cfg.trials = 0;
  CHECK_THROWS_AS(run_benchmark(inst, algos, cfg), InvalidConfig);
  cfg.trials = 1;
  cfg.jobs = 0;
  CHECK_THROWS_AS(run_benchmark(inst, algos, cfg), InvalidConfig);
  cfg.jobs = 1;
  auto bad = inst;
  bad[0].map_id = "a,b";
  CHECK_THROWS_AS(run_benchmark(bad, algos, cfg), InvalidConfig);
}

TEST_CASE("summary statistics: two-point sample and improvement") {
  const std::vector<TrialRecord> recs{
      rec("s/a", "rrt_star", TrialStatus::Solved, 10.0, 25.0, 100),
      rec("s/b", "rrt_star", TrialStatus::Solved, 12.0, 25.0, 300),
      rec("s/a", "vnrrt_star", TrialStatus::Solved, 9.0, 5.0, 50),
      rec("s/b", "vnrrt_star", TrialStatus::IterationBudgetExhausted, std::nullopt, 5.0, 50),
  };
  const auto rows = summarize(recs);
  const auto& pl = find_row(rows, "rrt_star", "s", "path_length");
  CHECK(pl.mean == 11.0);
  CHECK(pl.std.value() == doctest::Approx(std::sqrt(2.0)));
  CHECK(pl.n == 2);
  CHECK_FALSE(pl.improvement_pct.has_value());

  const auto& vpl = find_row(rows, "vnrrt_star", "s", "path_length");
  CHECK(vpl.n == 1);
  CHECK_FALSE(vpl.std.has_value());
  CHECK(find_row(rows, "vnrrt_star", "s", "time_cost").improvement_pct.value() == doctest::Approx(400.0));
  CHECK(find_row(rows, "vnrrt_star", "s", "iterations").improvement_pct.value() == doctest::Approx(300.0));
  CHECK(find_row(rows, "vnrrt_star", "s", "success_rate").mean == 0.5);
  CHECK_FALSE(find_row(rows, "vnrrt_star", "s", "path_length").improvement_pct.has_value());

  const auto csv = write_summary_csv(rows);
  CHECK(csv.starts_with("algorithm,map_set,metric,mean,std,n,improvement_vs_rrtstar_pct\n"));
  CHECK(read_summary_csv(csv) == rows);
}

TEST_CASE("single-algorithm summaries have no improvement column") {
  const std::vector<TrialRecord> recs{rec("x", "vnrrt_star", TrialStatus::Solved, 3.0, 1.0, 7)};
  const auto rows = summarize(recs);
  for (const auto& r : rows) CHECK(r.map_set == "all");
  const auto csv = write_summary_csv(rows);
  CHECK(csv.starts_with("algorithm,map_set,metric,mean,std,n\n"));
  CHECK(read_summary_csv(csv) == rows);
  CHECK_THROWS_AS(summarize(std::vector<TrialRecord>{}), EmptyInput);
}

TEST_CASE("summary means equal brute-force recomputation") {
  const auto inst = instances(4, 9, "setA");
  auto inst_b = instances(2, 10, "setB");
  std::vector<BenchInstance> all = inst;
  all.insert(all.end(), inst_b.begin(), inst_b.end());
  const std::vector<AlgorithmSpec> algos{AlgorithmSpec::make(AlgorithmName::RrtStar),
                                         AlgorithmSpec::make(AlgorithmName::VnrrtStar),
                                         AlgorithmSpec::make(AlgorithmName::MVnrrtStar, 0.99)};
  BenchConfig cfg;
  cfg.trials = 3;
  cfg.planner.max_iterations = 3000;
  const auto recs = run_benchmark(all, algos, cfg);
  const auto rows = summarize(recs);

  std::map<std::tuple<std::string, std::string, std::string>, std::vector<double>> ref;
  for (const auto& r : recs) {
    std::string label = r.algorithm + (r.tau ? "[tau=0.99]" : "");
    const auto set = map_set_of(r.map_id);
    ref[{label, set, "success_rate"}].push_back(r.status == TrialStatus::Solved);
    if (r.status == TrialStatus::Error) continue;
    ref[{label, set, "iterations"}].push_back(r.iterations);
    ref[{label, set, "time_cost"}].push_back(*r.time_s);
    if (r.status == TrialStatus::Solved) ref[{label, set, "path_length"}].push_back(*r.path_length);
  }
  CHECK(rows.size() == ref.size());
  for (const auto& [key, xs] : ref) {
    const auto& [label, set, metric] = key;
    const auto& row = find_row(rows, label, set, metric);
    double sum = 0.0;
    for (double x : xs) sum += x;
    CHECK(row.mean == sum / static_cast<double>(xs.size()));
    CHECK(row.n == static_cast<int>(xs.size()));
  }
  CHECK(read_summary_csv(write_summary_csv(rows)) == rows);
}

TEST_CASE("CSV parse errors") {
  CHECK_THROWS_AS(read_trials_csv("nope\n"), ParseError);
  const std::string header =
      "map_id,algorithm,tau,trial,seed,status,path_length,time_s,iterations,iters_to_first\n";
  CHECK(read_trials_csv(header).empty());
  CHECK_THROWS_AS(read_trials_csv(header + "a,b,,x,1,Solved,1,1,1,1\n"), ParseError);
  CHECK_THROWS_AS(read_trials_csv(header + "a,b,,0,1,Weird,1,1,1,1\n"), ParseError);
  CHECK_THROWS_AS(read_trials_csv(header + "a,b,,0,1,Solved\n"), ParseError);
  CHECK_THROWS_AS(read_summary_csv("algorithm,map_set\n"), ParseError);
  CHECK_THROWS_AS(read_summary_csv("algorithm,map_set,metric,mean,std,n\nx,y,z,abc,,1\n"), ParseError);
}
