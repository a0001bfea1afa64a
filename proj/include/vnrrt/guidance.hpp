#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vnrrt/geometry.hpp"
#include "vnrrt/gridmap.hpp"
#include "vnrrt/random.hpp"

namespace vnrrt {

/// Per-pixel vertex-ness probabilities, row-major with row 0 at the top.
/// Values are finite, in [0, 1], and at least one is positive.
class GuidanceMap {
 public:
  GuidanceMap(int width, int height, std::vector<float> prob);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const float> values() const noexcept { return prob_; }
  float at(int x, int y) const {
    return prob_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                 static_cast<std::size_t>(x)];
  }

  std::size_t nonzero_count() const;
  /// First index of the maximum value.
  std::size_t argmax() const;

  /// Bitwise equality of the rasters.
  friend bool operator==(const GuidanceMap& a, const GuidanceMap& b);

 private:
  int width_;
  int height_;
  std::vector<float> prob_;
};

class MaskThreshold {
 public:
  /// Throws InvalidConfig unless 0 < tau < 1.
  explicit MaskThreshold(double tau);
  double value() const noexcept { return tau_; }

 private:
  double tau_;
};

enum class GuidanceMode { Path, Vertex };

inline constexpr double kDefaultSigma = 4.0;

/// Gaussian blobs (peak 1, std `sigma`, cut off beyond 3 sigma) summed over
/// `centers` and clamped to 1. sigma == 0 marks exactly the center pixels.
/// Rows are computed in parallel; each pixel accumulates centers in input
/// order, so the result is bitwise equal to deposit_gaussians_serial.
std::vector<float> deposit_gaussians(int width, int height, std::span<const CellIndex> centers,
                                     double sigma);
std::vector<float> deposit_gaussians_serial(int width, int height,
                                            std::span<const CellIndex> centers, double sigma);

/// Stand-in for a trained network: blobs on every A* path cell (path mode,
/// the Neural RRT* objective) or only on the extracted vertices (vertex mode).
GuidanceMap oracle_guidance(const GridMap& map, CellIndex start, CellIndex goal, GuidanceMode mode,
                            double sigma = kDefaultSigma);

/// Zeroes every value below tau. Throws AllMasked if nothing survives.
GuidanceMap apply_mask(const GuidanceMap& g, MaskThreshold tau);

/// Exact multinomial pixel sampling by inversion of a prefix-sum table,
/// followed by a uniform point inside the chosen pixel.
class GuidanceSampler {
 public:
  explicit GuidanceSampler(const GuidanceMap& g);

  /// Pixel index for a cumulative-mass coordinate u in [0, 1).
  std::size_t pixel_for(double u) const;
  ContinuousPoint sample(Rng& rng) const;

 private:
  int width_;
  std::vector<double> cumulative_;
};

ContinuousPoint sample_point(const GuidanceMap& g, Rng& rng);

// VGM1 binary format: "VGM1", u32 width, u32 height, width*height binary32,
// all little-endian.
std::string write_guidance(const GuidanceMap& g);
GuidanceMap read_guidance(std::string_view bytes);

void save_guidance(const GuidanceMap& g, const std::string& path);
GuidanceMap load_guidance(const std::string& path);

}  // namespace vnrrt
