#include "vnrrt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "vnrrt/error.hpp"

namespace vnrrt {

std::size_t VertexRaster::zero_count() const {
  return static_cast<std::size_t>(std::count(values.begin(), values.end(), std::uint8_t{0}));
}

VertexRaster rasterize_vertices(int width, int height, const VertexSet& vertices) {
  VertexRaster r{width, height,
                 std::vector<std::uint8_t>(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 1)};
  for (const auto& v : vertices.vertices) {
    r.values[static_cast<std::size_t>(v.y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(v.x)] = 0;
  }
  return r;
}

VertexRaster make_ground_truth(const GridMap& map, CellIndex start, CellIndex goal) {
  const GridPath path = astar(map, start, goal);
  return rasterize_vertices(map.width(), map.height(), extract_vertices(path.cells));
}

GuidanceMap to_guidance_target(const VertexRaster& raster) {
  std::vector<float> prob(raster.values.size());
  std::transform(raster.values.begin(), raster.values.end(), prob.begin(),
                 [](std::uint8_t v) { return v == 0 ? 1.0f : 0.0f; });
  return {raster.width, raster.height, std::move(prob)};
}

double focal_loss(double p_t, FocalParams params) {
  if (!(p_t > 0.0 && p_t <= 1.0)) throw DomainError("focal loss needs 0 < p_t <= 1");
  if (!(params.gamma >= 0.0) || !std::isfinite(params.gamma)) {
    throw DomainError("focal gamma must be finite and >= 0");
  }
  if (params.gamma == 0.0) return -std::log(p_t);
  return -std::pow(1.0 - p_t, params.gamma) * std::log(p_t);
}

namespace {

std::string numbered(const char* stem, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06zu.%s", stem, i, ext);
  return buf;
}

}  // namespace

nlohmann::json export_dataset(std::span<const DatasetMap> maps,
                              const std::filesystem::path& out_dir, double train_fraction,
                              std::uint64_t seed) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) {
    throw InvalidConfig("train fraction must lie in [0, 1]");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(maps.size())));
  auto instances = nlohmann::json::array();
  std::size_t k = 0;
  for (std::size_t m = 0; m < maps.size(); ++m) {
    for (const auto& [start, goal] : maps[m].pairs) {
      const GridMap stamped = maps[m].map.with_endpoints(start, goal);
      const auto map_file = numbered("map", k, "vmap");
      const auto target_file = numbered("target", k, "vgm");
      save_map(stamped, (out_dir / map_file).string());
      save_guidance(to_guidance_target(make_ground_truth(stamped, start, goal)),
                    (out_dir / target_file).string());
      instances.push_back({{"map_file", map_file},
                           {"target_file", target_file},
                           {"start", {start.x, start.y}},
                           {"goal", {goal.x, goal.y}},
                           {"split", m < n_train ? "train" : "test"}});
      ++k;
    }
  }

  nlohmann::json manifest;
  manifest["seed"] = seed;
  manifest["sigma_note"] =
      "targets are unblurred vertex rasters (sigma = 0) in guidance polarity: vertex pixels are "
      "1.0 and all other pixels 0.0, the inverse of the 0-at-vertex image convention";
  manifest["train_fraction"] = train_fraction;
  manifest["instances"] = std::move(instances);

  const auto manifest_path = out_dir / "manifest.json";
  std::ofstream out(manifest_path);
  if (!out) throw IoError("cannot open '" + manifest_path.string() + "' for writing");
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + manifest_path.string() + "'");
  return manifest;
}

}  // namespace vnrrt
