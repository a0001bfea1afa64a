#include "vnrrt/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vnrrt/bench.hpp"
#include "vnrrt/dataset.hpp"
#include "vnrrt/error.hpp"
#include "vnrrt/gridmap.hpp"
#include "vnrrt/guidance.hpp"
#include "vnrrt/oracle.hpp"
#include "vnrrt/planner.hpp"

namespace fs = std::filesystem;

namespace vnrrt {

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
};

struct GenOptions {
  int count = 1;
  MapGenConfig cfg;
  std::vector<std::string> shapes;
};

struct PlannerOptions {
  std::string algo = "rrt";
  std::string guidance;
  std::optional<double> tau;
  std::string termination = "initial";
  double epsilon = 0.02;
  double sigma = kDefaultSigma;
  PlannerConfig cfg;
  bool no_timing = false;
};

void add_planner_flags(CLI::App* cmd, PlannerOptions& o) {
  cmd->add_option("--termination", o.termination, "initial | optimal")
      ->check(CLI::IsMember({"initial", "optimal"}));
  cmd->add_option("--epsilon", o.epsilon, "Optimal termination slack over the A* cost");
  cmd->add_option("--max-iterations", o.cfg.max_iterations, "Iteration cap");
  cmd->add_option("--eta", o.cfg.steer_step, "Steer step (px)");
  cmd->add_option("--delta", o.cfg.goal_radius, "Goal connection radius (px)");
  cmd->add_option("--gamma", o.cfg.rewire_gamma, "Rewire radius constant (px)");
  cmd->add_option("--mix", o.cfg.guided_mix, "Probability of sampling from guidance")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--sigma", o.sigma, "Oracle guidance kernel std (px)");
  cmd->add_flag("--no-timing", o.no_timing, "Suppress wall-clock fields");
}

void configure_gen(CLI::App* cmd, GenOptions& o) {
  cmd->add_option("--width", o.cfg.width, "Map width (cells)");
  cmd->add_option("--height", o.cfg.height, "Map height (cells)");
  cmd->add_option("--min-obstacles", o.cfg.min_obstacles);
  cmd->add_option("--max-obstacles", o.cfg.max_obstacles);
  cmd->add_option("--min-size", o.cfg.min_size, "Smallest obstacle extent (px)");
  cmd->add_option("--max-size", o.cfg.max_size, "Largest obstacle extent (px)");
  cmd->add_option("--shapes", o.shapes, "triangle,circle,square,bar,u_shape")->delimiter(',');
}

void apply_shapes(GenOptions& o) {
  if (o.shapes.empty()) return;
  o.cfg.shapes.clear();
  for (const auto& s : o.shapes) o.cfg.shapes.push_back(parse_shape(s));
}

CellIndex parse_cell(const std::string& text) {
  const auto comma = text.find(',');
  CellIndex c;
  const auto parse = [&](std::string_view s, int& v) {
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size()) {
      throw InvalidConfig("expected a cell as 'x,y', got '" + text + "'");
    }
  };
  if (comma == std::string::npos) throw InvalidConfig("expected a cell as 'x,y', got '" + text + "'");
  parse(std::string_view(text).substr(0, comma), c.x);
  parse(std::string_view(text).substr(comma + 1), c.y);
  return c;
}

nlohmann::json cells_json(std::span<const CellIndex> cells) {
  auto arr = nlohmann::json::array();
  for (const auto& c : cells) arr.push_back({c.x, c.y});
  return arr;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw IoError("failed writing '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

std::string map_file_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "map_%05d.vmap", i);
  return buf;
}

GuidanceMap build_guidance(const GridMap& map, const AlgorithmSpec& spec, double sigma,
                           const std::string& map_id) {
  switch (spec.guidance.kind) {
    case GuidanceSource::Kind::OraclePath:
      return oracle_guidance(map, map.start(), map.goal(), GuidanceMode::Path, sigma);
    case GuidanceSource::Kind::OracleVertex:
      return oracle_guidance(map, map.start(), map.goal(), GuidanceMode::Vertex, sigma);
    case GuidanceSource::Kind::File: {
      const auto file = spec.guidance.resolve(map_id);
      if (!fs::is_regular_file(file)) throw GuidanceFileMissing("guidance raster '" + file + "' does not exist");
      return load_guidance(file);
    }
    case GuidanceSource::Kind::None:
      break;
  }
  throw InvalidConfig("algorithm has no guidance source");
}

AlgorithmSpec make_spec(const std::string& algo, const std::string& guidance, std::optional<double> tau) {
  const AlgorithmName name = parse_algorithm(algo);
  std::optional<GuidanceSource> source;
  if (!guidance.empty() && name != AlgorithmName::RrtStar) source = GuidanceSource::parse(guidance);
  if (!guidance.empty() && name == AlgorithmName::RrtStar) {
    throw InvalidConfig("rrt_star takes no guidance source");
  }
  return AlgorithmSpec::make(name, name == AlgorithmName::MVnrrtStar ? tau : std::nullopt, source);
}

// ---------------------------------------------------------------------------

void cmd_gen_maps(const Globals& g, GenOptions& o, std::ostream& out) {
  if (g.out.empty()) throw InvalidConfig("gen-maps requires --out <dir>");
  apply_shapes(o);
  o.cfg.seed = g.seed;
  fs::create_directories(g.out);
  const auto maps = generate_maps(o.cfg, o.count);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto path = (fs::path(g.out) / map_file_name(static_cast<int>(i))).string();
    save_map(maps[i], path);
    out << path << '\n';
  }
}

void cmd_plan(const Globals& g, PlannerOptions& o, const std::string& map_path, std::ostream& out,
              std::ostream& err) {
  const GridMap map = load_map(map_path);
  const AlgorithmSpec spec = make_spec(o.algo, o.guidance, o.tau);
  PlannerConfig cfg = o.cfg;
  cfg.seed = g.seed;
  cfg.mask = spec.tau;
  if (o.termination == "optimal") {
    cfg.termination = Termination::optimal(o.epsilon, astar(map).cost);
  }
  std::optional<GuidanceMap> guidance;
  if (spec.name == AlgorithmName::RrtStar) {
    cfg.guided_mix = 0.0;
  } else {
    guidance.emplace(build_guidance(map, spec, o.sigma, fs::path(map_path).stem().string()));
  }
  const PlanResult r = plan(map, cfg, guidance ? &*guidance : nullptr);
  if (r.mask_fell_back) err << "warning: mask removed all guidance mass; using the unmasked map\n";
  const auto text = to_json(r, !o.no_timing).dump() + "\n";
  out << text;
  if (!g.out.empty()) write_text(g.out, text);
}

void cmd_extract(const Globals& g, const std::string& map_path, const std::string& start,
                 const std::string& goal, std::ostream& out) {
  const GridMap map = load_map(map_path);
  const CellIndex s = start.empty() ? map.start() : parse_cell(start);
  const CellIndex t = goal.empty() ? map.goal() : parse_cell(goal);
  const GridPath path = astar(map, s, t);
  const VertexSet vs = extract_vertices(path.cells);
  nlohmann::json j;
  j["cost"] = path.cost;
  j["path"] = cells_json(path.cells);
  j["vertices"] = cells_json(vs.vertices);
  const auto text = j.dump() + "\n";
  out << text;
  if (!g.out.empty()) write_text(g.out, text);
}

void cmd_make_guidance(const Globals& g, const std::string& map_path, const std::string& mode,
                       double sigma, std::optional<double> tau, std::ostream& out) {
  if (g.out.empty()) throw InvalidConfig("make-guidance requires --out <file.vgm>");
  const GridMap map = load_map(map_path);
  GuidanceMap gm = oracle_guidance(map, map.start(), map.goal(),
                                   mode == "path" ? GuidanceMode::Path : GuidanceMode::Vertex, sigma);
  if (tau) gm = apply_mask(gm, MaskThreshold(*tau));
  save_guidance(gm, g.out);
  out << g.out << '\n';
}

void cmd_export(const Globals& g, GenOptions& o, int starts, int goals, double split, std::ostream& out) {
  if (g.out.empty()) throw InvalidConfig("export-dataset requires --out <dir>");
  apply_shapes(o);
  o.cfg.seed = g.seed;
  std::vector<DatasetMap> maps;
  int i = 0;
  for (auto& m : generate_maps(o.cfg, o.count)) {
    auto pairs = sample_start_goal_pairs(m, starts, goals, combine_seed(g.seed ^ 0x5eedULL, static_cast<std::uint64_t>(i++)));
    maps.push_back({std::move(m), std::move(pairs)});
  }
  const auto manifest = export_dataset(maps, g.out, split, g.seed);
  out << (fs::path(g.out) / "manifest.json").string() << '\n';
  out << manifest["instances"].size() << " instances\n";
}

struct BenchOptions {
  std::string maps_dir;
  int generate = 0;
  GenOptions gen;
  std::vector<std::string> algos{"rrt", "vnrrt"};
  std::vector<double> taus{0.5};
  int trials = 1;
  int jobs = 1;
  std::string summary;
  PlannerOptions planner;
};

void cmd_bench(const Globals& g, BenchOptions& o, std::ostream& out) {
  std::vector<BenchInstance> instances;
  if (!o.maps_dir.empty()) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(o.maps_dir)) {
      if (e.is_regular_file() && e.path().extension() == ".vmap") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    auto set = fs::path(o.maps_dir).lexically_normal().filename().string();
    if (set.empty()) set = fs::path(o.maps_dir).lexically_normal().parent_path().filename().string();
    for (const auto& f : files) instances.push_back({set + "/" + f.stem().string(), load_map(f.string())});
  } else if (o.generate > 0) {
    apply_shapes(o.gen);
    o.gen.cfg.seed = g.seed;
    int i = 0;
    for (auto& m : generate_maps(o.gen.cfg, o.generate)) {
      instances.push_back({"random/" + fs::path(map_file_name(i++)).stem().string(), std::move(m)});
    }
  } else {
    throw InvalidConfig("bench requires --maps <dir> or --generate <count>");
  }
  if (instances.empty()) throw InvalidConfig("no .vmap files found in '" + o.maps_dir + "'");

  std::vector<AlgorithmSpec> algorithms;
  for (const auto& a : o.algos) {
    if (parse_algorithm(a) == AlgorithmName::MVnrrtStar) {
      for (double tau : o.taus) algorithms.push_back(make_spec(a, o.planner.guidance, tau));
    } else {
      algorithms.push_back(make_spec(a, parse_algorithm(a) == AlgorithmName::RrtStar ? "" : o.planner.guidance,
                                     std::nullopt));
    }
  }

  BenchConfig cfg;
  cfg.planner = o.planner.cfg;
  cfg.termination = o.planner.termination == "optimal" ? Termination::Kind::Optimal : Termination::Kind::Initial;
  cfg.epsilon = o.planner.epsilon;
  cfg.trials = o.trials;
  cfg.base_seed = g.seed;
  cfg.sigma = o.planner.sigma;
  cfg.jobs = o.jobs;

  auto records = run_benchmark(instances, algorithms, cfg);
  if (o.planner.no_timing) {
    for (auto& r : records) r.time_s.reset();
  }
  const auto csv = write_trials_csv(records, !o.planner.no_timing);
  if (g.out.empty()) {
    out << csv;
  } else {
    write_text(g.out, csv);
  }
  if (!o.summary.empty()) write_text(o.summary, write_summary_csv(summarize(records)));
}

void cmd_summarize(const Globals& g, const std::string& in, std::ostream& out) {
  const auto rows = summarize(read_trials_csv(read_text(in)));
  const auto csv = write_summary_csv(rows);
  out << csv;
  if (!g.out.empty()) write_text(g.out, csv);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vertex-guided RRT* planning toolkit", "vnrrt"};
  app.require_subcommand(1);
  Globals globals;
  app.add_option("--seed", globals.seed, "Seed for every randomized step")->default_val(0);
  app.add_option("--out", globals.out, "Output file or directory");

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-maps", "Generate random VMAP1 maps");
  gen_cmd->add_option("--count", gen.count, "Number of maps")->check(CLI::PositiveNumber);
  configure_gen(gen_cmd, gen);

  PlannerOptions plan_opts;
  std::string plan_map;
  auto* plan_cmd = app.add_subcommand("plan", "Run one planner on a map and print PlanResult JSON");
  plan_cmd->add_option("--map", plan_map, "VMAP1 file")->required();
  plan_cmd->add_option("--algo", plan_opts.algo, "rrt | nrrt | vnrrt | m-vnrrt");
  plan_cmd->add_option("--guidance", plan_opts.guidance, "oracle-path | oracle-vertex | file:<path>");
  plan_cmd->add_option("--tau", plan_opts.tau, "Mask threshold for m-vnrrt");
  add_planner_flags(plan_cmd, plan_opts);

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a seeded multi-algorithm benchmark");
  bench_cmd->add_option("--maps", bench.maps_dir, "Directory of .vmap files");
  bench_cmd->add_option("--generate", bench.generate, "Generate this many maps instead of --maps");
  configure_gen(bench_cmd, bench.gen);
  bench_cmd->add_option("--algos", bench.algos, "Comma-separated algorithms")->delimiter(',');
  bench_cmd->add_option("--tau", bench.taus, "Mask thresholds for m-vnrrt (comma-separated)")->delimiter(',');
  bench_cmd->add_option("--guidance", bench.planner.guidance, "Guidance source for guided algorithms");
  bench_cmd->add_option("--trials", bench.trials, "Trials per map and algorithm")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--jobs", bench.jobs, "Worker threads")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--summary", bench.summary, "Also write the summary CSV here");
  add_planner_flags(bench_cmd, bench.planner);

  std::string ev_map, ev_start, ev_goal;
  auto* ev_cmd = app.add_subcommand("extract-vertices", "Print the A* path and its vertices as JSON");
  ev_cmd->add_option("--map", ev_map, "VMAP1 file")->required();
  ev_cmd->add_option("--start", ev_start, "x,y (defaults to the map's start)");
  ev_cmd->add_option("--goal", ev_goal, "x,y (defaults to the map's goal)");

  std::string mg_map, mg_mode = "vertex";
  double mg_sigma = kDefaultSigma;
  std::optional<double> mg_tau;
  auto* mg_cmd = app.add_subcommand("make-guidance", "Write an oracle guidance raster (VGM1)");
  mg_cmd->add_option("--map", mg_map, "VMAP1 file")->required();
  mg_cmd->add_option("--mode", mg_mode, "path | vertex")->check(CLI::IsMember({"path", "vertex"}));
  mg_cmd->add_option("--sigma", mg_sigma, "Kernel std (px)");
  mg_cmd->add_option("--tau", mg_tau, "Apply a mask threshold");

  GenOptions ex_gen;
  int ex_starts = 12, ex_goals = 12;
  double ex_split = 0.7;
  auto* ex_cmd = app.add_subcommand("export-dataset", "Generate maps and export training targets");
  ex_cmd->add_option("--count", ex_gen.count, "Number of maps")->check(CLI::PositiveNumber);
  configure_gen(ex_cmd, ex_gen);
  ex_cmd->add_option("--starts", ex_starts, "Start cells per map")->check(CLI::PositiveNumber);
  ex_cmd->add_option("--goals", ex_goals, "Goal cells per map")->check(CLI::PositiveNumber);
  ex_cmd->add_option("--split", ex_split, "Training fraction of maps")->check(CLI::Range(0.0, 1.0));

  std::string sum_in;
  auto* sum_cmd = app.add_subcommand("summarize", "Summarize a raw trial CSV");
  sum_cmd->add_option("--in", sum_in, "Trial CSV")->required();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (*gen_cmd) cmd_gen_maps(globals, gen, out);
    else if (*plan_cmd) cmd_plan(globals, plan_opts, plan_map, out, err);
    else if (*bench_cmd) cmd_bench(globals, bench, out);
    else if (*ev_cmd) cmd_extract(globals, ev_map, ev_start, ev_goal, out);
    else if (*mg_cmd) cmd_make_guidance(globals, mg_map, mg_mode, mg_sigma, mg_tau, out);
    else if (*ex_cmd) cmd_export(globals, ex_gen, ex_starts, ex_goals, ex_split, out);
    else if (*sum_cmd) cmd_summarize(globals, sum_in, out);
  } catch (const InvalidConfig& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  }
  return kExitOk;
}

}  // namespace vnrrt
