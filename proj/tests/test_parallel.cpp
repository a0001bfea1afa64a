// The OpenMP kernels against their serial references.
#include "doctest.h"

#include <omp.h>

#include <bit>

#include "oracles.hpp"
#include "vnrrt/bench.hpp"
#include "vnrrt/error.hpp"
#include "vnrrt/guidance.hpp"

using namespace vnrrt;

TEST_CASE("parallel gaussian deposit is bitwise equal to the serial one") {
  std::mt19937_64 rng(4);
  for (int threads : {1, 2, 4, 7}) {
    omp_set_num_threads(threads);
    for (int t = 0; t < 10; ++t) {
      const int w = 20 + static_cast<int>(rng() % 100), h = 20 + static_cast<int>(rng() % 100);
      std::vector<CellIndex> centers;
      for (int i = 0; i < 60; ++i) {
        centers.push_back({static_cast<int>(rng() % static_cast<unsigned>(w)),
                           static_cast<int>(rng() % static_cast<unsigned>(h))});
      }
      for (double sigma : {0.0, 0.7, 4.0, 9.5}) {
        const auto p = deposit_gaussians(w, h, centers, sigma);
        const auto s = deposit_gaussians_serial(w, h, centers, sigma);
        REQUIRE(p.size() == s.size());
        bool same = true;
        for (std::size_t i = 0; i < p.size(); ++i) {
          same = same && std::bit_cast<std::uint32_t>(p[i]) == std::bit_cast<std::uint32_t>(s[i]);
        }
        CHECK(same);
      }
    }
  }
  omp_set_num_threads(1);
}

TEST_CASE("parallel map generation equals the serial batch") {
  MapGenConfig cfg;
  cfg.width = cfg.height = 80;
  cfg.seed = 31;
  for (int threads : {1, 3, 8}) {
    omp_set_num_threads(threads);
    CHECK(generate_maps(cfg, 12) == generate_maps_serial(cfg, 12));
  }
  omp_set_num_threads(1);
  CHECK(generate_maps(cfg, 0).empty());
}

TEST_CASE("parallel map generation surfaces generation failures") {
  MapGenConfig cfg;
  cfg.width = cfg.height = 8;
  cfg.shapes = {ShapeKind::Square};
  cfg.min_obstacles = cfg.max_obstacles = 40;
  cfg.min_size = 20;
  cfg.max_size = 30;
  omp_set_num_threads(4);
  CHECK_THROWS_AS(generate_maps(cfg, 4), GenerationFailed);
  omp_set_num_threads(1);
}

TEST_CASE("benchmark records do not depend on the worker count") {
  MapGenConfig cfg;
  cfg.width = cfg.height = 64;
  cfg.min_size = 5;
  cfg.max_size = 15;
  cfg.seed = 8;
  std::vector<BenchInstance> inst;
  int i = 0;
  for (auto& m : generate_maps(cfg, 4)) inst.push_back({"p/" + std::to_string(i++), std::move(m)});
  const std::vector<AlgorithmSpec> algos{AlgorithmSpec::make(AlgorithmName::RrtStar),
                                         AlgorithmSpec::make(AlgorithmName::NrrtStar),
                                         AlgorithmSpec::make(AlgorithmName::MVnrrtStar, 0.9)};
  BenchConfig bc;
  bc.trials = 3;
  bc.base_seed = 99;
  const auto strip = [](std::vector<TrialRecord> v) {
    for (auto& r : v) r.time_s.reset();
    return v;
  };
  const auto serial = strip(run_benchmark_serial(inst, algos, bc));
  for (int jobs : {1, 2, 5}) {
    bc.jobs = jobs;
    CHECK(strip(run_benchmark(inst, algos, bc)) == serial);
  }
}
