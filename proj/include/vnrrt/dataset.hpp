#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"
#include "vnrrt/gridmap.hpp"
#include "vnrrt/guidance.hpp"
#include "vnrrt/oracle.hpp"

namespace vnrrt {

/// Ground-truth image: 0 at vertex pixels, 1 everywhere else.
struct VertexRaster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;

  std::size_t zero_count() const;
};

VertexRaster rasterize_vertices(int width, int height, const VertexSet& vertices);

/// astar -> extract_vertices -> rasterize. Throws NoPath.
VertexRaster make_ground_truth(const GridMap& map, CellIndex start, CellIndex goal);

/// Guidance-polarity training target: 1.0 at vertex pixels, 0.0 elsewhere.
GuidanceMap to_guidance_target(const VertexRaster& raster);

struct FocalParams {
  double gamma = 2.0;
};

/// -(1 - p_t)^gamma * ln(p_t). Throws DomainError unless 0 < p_t <= 1 and
/// gamma is finite and >= 0.
double focal_loss(double p_t, FocalParams params = {});

struct DatasetMap {
  GridMap map;
  std::vector<StartGoalPair> pairs;
};

/// Writes one VMAP1 map (endpoints stamped) and one VGM1 target per
/// (map, pair) into out_dir plus manifest.json, and returns the manifest.
/// The first round(train_fraction * maps) maps form the training split.
/// Throws IoError.
nlohmann::json export_dataset(std::span<const DatasetMap> maps,
                              const std::filesystem::path& out_dir, double train_fraction,
                              std::uint64_t seed);

}  // namespace vnrrt
