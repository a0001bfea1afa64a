#include "vnrrt/guidance.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "vnrrt/error.hpp"
#include "vnrrt/oracle.hpp"

namespace vnrrt {

GuidanceMap::GuidanceMap(int width, int height, std::vector<float> prob)
    : width_(width), height_(height), prob_(std::move(prob)) {
  if (width < 1 || height < 1) throw InvalidConfig("guidance dimensions must be positive");
  if (prob_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InvalidConfig("guidance array length does not match width x height");
  }
  bool any = false;
  for (float p : prob_) {
    if (!(p >= 0.0f && p <= 1.0f)) throw InvalidConfig("guidance value outside [0, 1]");
    any = any || p > 0.0f;
  }
  if (!any) throw NotSamplable("guidance map has no positive value");
}

std::size_t GuidanceMap::nonzero_count() const {
  return static_cast<std::size_t>(
      std::count_if(prob_.begin(), prob_.end(), [](float p) { return p > 0.0f; }));
}

std::size_t GuidanceMap::argmax() const {
  return static_cast<std::size_t>(std::max_element(prob_.begin(), prob_.end()) - prob_.begin());
}

bool operator==(const GuidanceMap& a, const GuidanceMap& b) {
  return a.width_ == b.width_ && a.height_ == b.height_ &&
         std::equal(a.prob_.begin(), a.prob_.end(), b.prob_.begin(), b.prob_.end(),
                    [](float x, float y) {
                      return std::bit_cast<std::uint32_t>(x) == std::bit_cast<std::uint32_t>(y);
                    });
}

MaskThreshold::MaskThreshold(double tau) : tau_(tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidConfig("mask threshold must lie in (0, 1)");
}

// ---------------------------------------------------------------------------

namespace {

void check_sigma(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidConfig("sigma must be finite and >= 0");
}

int kernel_reach(double sigma) { return static_cast<int>(std::floor(3.0 * sigma)); }

// Contribution of a blob at offset (dx, dy); 0 outside the 3-sigma disk.
double kernel(int dx, int dy, double sigma) {
  const double d2 = static_cast<double>(dx) * dx + static_cast<double>(dy) * dy;
  if (sigma == 0.0) return d2 == 0.0 ? 1.0 : 0.0;
  if (d2 > 9.0 * sigma * sigma) return 0.0;
  return std::exp(-d2 / (2.0 * sigma * sigma));
}

float saturate(double v) { return static_cast<float>(std::min(v, 1.0)); }

}  // namespace

std::vector<float> deposit_gaussians_serial(int width, int height,
                                            std::span<const CellIndex> centers, double sigma) {
  check_sigma(sigma);
  const int reach = kernel_reach(sigma);
  std::vector<double> acc(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0);
  for (const auto& c : centers) {
    for (int y = std::max(0, c.y - reach); y <= std::min(height - 1, c.y + reach); ++y) {
      for (int x = std::max(0, c.x - reach); x <= std::min(width - 1, c.x + reach); ++x) {
        const double k = kernel(x - c.x, y - c.y, sigma);
        if (k > 0.0) acc[static_cast<std::size_t>(y) * width + x] += k;
      }
    }
  }
  std::vector<float> out(acc.size());
  std::transform(acc.begin(), acc.end(), out.begin(), saturate);
  return out;
}

std::vector<float> deposit_gaussians(int width, int height, std::span<const CellIndex> centers,
                                     double sigma) {
  check_sigma(sigma);
  const int reach = kernel_reach(sigma);
  std::vector<float> out(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0f);
#pragma omp parallel
  {
    std::vector<double> row(static_cast<std::size_t>(width));
#pragma omp for schedule(static)
    for (int y = 0; y < height; ++y) {
      std::fill(row.begin(), row.end(), 0.0);
      for (const auto& c : centers) {
        if (std::abs(c.y - y) > reach) continue;
        for (int x = std::max(0, c.x - reach); x <= std::min(width - 1, c.x + reach); ++x) {
          const double k = kernel(x - c.x, y - c.y, sigma);
          if (k > 0.0) row[static_cast<std::size_t>(x)] += k;
        }
      }
      std::transform(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(y) * width,
                     saturate);
    }
  }
  return out;
}

GuidanceMap oracle_guidance(const GridMap& map, CellIndex start, CellIndex goal, GuidanceMode mode,
                            double sigma) {
  const GridPath path = astar(map, start, goal);
  if (mode == GuidanceMode::Path) {
    return {map.width(), map.height(), deposit_gaussians(map.width(), map.height(), path.cells, sigma)};
  }
  const VertexSet vs = extract_vertices(path.cells);
  return {map.width(), map.height(), deposit_gaussians(map.width(), map.height(), vs.vertices, sigma)};
}

GuidanceMap apply_mask(const GuidanceMap& g, MaskThreshold tau) {
  std::vector<float> out(g.values().begin(), g.values().end());
  bool any = false;
  for (float& p : out) {
    if (static_cast<double>(p) < tau.value()) p = 0.0f;
    any = any || p > 0.0f;
  }
  if (!any) {
    throw AllMasked("no guidance value reaches the mask threshold " + std::to_string(tau.value()));
  }
  return {g.width(), g.height(), std::move(out)};
}

// ---------------------------------------------------------------------------

GuidanceSampler::GuidanceSampler(const GuidanceMap& g) : width_(g.width()) {
  cumulative_.reserve(g.values().size());
  double total = 0.0;
  for (float p : g.values()) {
    total += static_cast<double>(p);
    cumulative_.push_back(total);
  }
  if (!(total > 0.0)) throw NotSamplable("guidance map has no positive value");
}

std::size_t GuidanceSampler::pixel_for(double u) const {
  const double total = cumulative_.back();
  const double target = u * total;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) {
    // u rounded up to the total; take the last pixel with positive mass.
    it = std::lower_bound(cumulative_.begin(), cumulative_.end(), total);
  }
  return static_cast<std::size_t>(it - cumulative_.begin());
}

ContinuousPoint GuidanceSampler::sample(Rng& rng) const {
  const std::size_t i = pixel_for(uniform01(rng));
  const double jx = uniform01(rng);
  const double jy = uniform01(rng);
  const auto w = static_cast<std::size_t>(width_);
  return {static_cast<double>(i % w) + jx, static_cast<double>(i / w) + jy};
}

ContinuousPoint sample_point(const GuidanceMap& g, Rng& rng) { return GuidanceSampler(g).sample(rng); }

// ---------------------------------------------------------------------------

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + static_cast<std::size_t>(i)]))
         << (8 * i);
  }
  return v;
}

constexpr std::size_t kHeaderBytes = 12;

}  // namespace

std::string write_guidance(const GuidanceMap& g) {
  std::string out = "VGM1";
  out.reserve(kHeaderBytes + 4 * g.values().size());
  put_u32(out, static_cast<std::uint32_t>(g.width()));
  put_u32(out, static_cast<std::uint32_t>(g.height()));
  for (float p : g.values()) put_u32(out, std::bit_cast<std::uint32_t>(p));
  return out;
}

GuidanceMap read_guidance(std::string_view bytes) {
  if (bytes.size() < kHeaderBytes || bytes.substr(0, 4) != "VGM1") {
    throw ParseError("bad VGM1 magic or truncated header");
  }
  const std::uint64_t w = get_u32(bytes, 4);
  const std::uint64_t h = get_u32(bytes, 8);
  if (w == 0 || h == 0) throw ParseError("VGM1 dimensions must be positive");
  if (w > static_cast<std::uint64_t>(std::numeric_limits<int>::max()) ||
      h > static_cast<std::uint64_t>(std::numeric_limits<int>::max()) ||
      w * h > (std::numeric_limits<std::uint64_t>::max() - kHeaderBytes) / 4) {
    throw ParseError("VGM1 dimensions overflow");
  }
  if (bytes.size() != kHeaderBytes + 4 * w * h) {
    throw ParseError("VGM1 payload is " + std::to_string(bytes.size() - kHeaderBytes) +
                     " bytes, expected " + std::to_string(4 * w * h));
  }
  std::vector<float> prob(static_cast<std::size_t>(w * h));
  bool any = false;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    const float p = std::bit_cast<float>(get_u32(bytes, kHeaderBytes + 4 * i));
    if (!(p >= 0.0f && p <= 1.0f)) {
      throw ParseError("VGM1 value " + std::to_string(p) + " at index " + std::to_string(i) +
                       " outside [0, 1]");
    }
    any = any || p > 0.0f;
    prob[i] = p;
  }
  if (!any) throw ParseError("VGM1 raster has no positive value");
  return {static_cast<int>(w), static_cast<int>(h), std::move(prob)};
}

void save_guidance(const GuidanceMap& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const auto bytes = write_guidance(g);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

GuidanceMap load_guidance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open guidance file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_guidance(buf.str());
}

}  // namespace vnrrt
