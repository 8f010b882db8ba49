#include "neutroseg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "neutroseg/errors.hpp"

namespace neutroseg {
namespace {

struct Disk {
  double row;
  double col;
  double radius;
};

}  // namespace

Phantom make_phantom(const PhantomSpec& spec) {
  if (spec.rows < 3 || spec.cols < 3) throw DimensionError("phantom must be at least 3x3");
  if (spec.rpe_thickness < 1) throw ParameterError("RPE band needs at least one row");
  std::mt19937_64 rng(spec.seed);

  Phantom p;
  p.image.pixels = Matrix(spec.rows, spec.cols);
  p.rpe = {std::vector<int>(spec.cols), Layer::kRpe};
  p.choroid = {std::vector<int>(spec.cols), Layer::kChoroid};
  const int max_row = static_cast<int>(spec.rows) - 1;
  // Last row of each band; the reported boundaries are one row further down.
  std::vector<int> rpe_last(spec.cols);
  std::vector<int> choroid_last(spec.cols);
  for (std::size_t c = 0; c < spec.cols; ++c) {
    const double x = static_cast<double>(c);
    const double rpe = spec.rpe_row + spec.rpe_slope * x;
    rpe_last[c] = std::clamp(static_cast<int>(std::lround(rpe)), 0, max_row);
    choroid_last[c] = std::clamp(
        static_cast<int>(std::lround(rpe + spec.choroid_thickness + spec.choroid_slope * x)), 0,
        max_row);
    p.rpe.rows[c] = std::min(rpe_last[c] + 1, max_row);
    p.choroid.rows[c] = std::min(choroid_last[c] + 1, max_row);
  }

  // Vessels sit inside the choroid band of their center column, close to its
  // lower edge.
  std::vector<Disk> vessels;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int v = 0; v < spec.vessel_count; ++v) {
    const double radius =
        spec.vessel_min_radius + unit(rng) * (spec.vessel_max_radius - spec.vessel_min_radius);
    const auto col = static_cast<std::size_t>(unit(rng) * static_cast<double>(spec.cols - 1));
    const double gap = 1.0 + unit(rng) * std::max(0.0, spec.vessel_max_gap - 1.0);
    const double center = choroid_last[col] - gap - radius;
    if (center - radius <= rpe_last[col] + 1) continue;
    vessels.push_back({center, static_cast<double>(col), radius});
  }

  std::normal_distribution<double> speckle(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
  for (std::size_t c = 0; c < spec.cols; ++c) {
    const int rpe_end = rpe_last[c];
    const int rpe_first = rpe_end - spec.rpe_thickness + 1;
    const int choroid_end = choroid_last[c];
    const double ilm = spec.ilm_row + spec.rpe_slope * static_cast<double>(c);
    for (std::size_t r = 0; r < spec.rows; ++r) {
      const int row = static_cast<int>(r);
      double v;
      if (row < ilm) {
        v = spec.vitreous_level;
      } else if (row < rpe_first) {
        v = spec.retina_level;
      } else if (row <= rpe_end) {
        v = spec.rpe_level;
      } else if (row <= choroid_end) {
        v = spec.choroid_level;
        for (const Disk& d : vessels) {
          const double dr = row - d.row;
          const double dc = static_cast<double>(c) - d.col;
          if (dr * dr + dc * dc <= d.radius * d.radius) {
            v = spec.vessel_level;
            break;
          }
        }
      } else {
        // Sclera fades slowly with depth.
        const double depth = row - choroid_end - 1;
        v = spec.vitreous_level + (spec.sclera_level - spec.vitreous_level) * std::exp(-depth / 250.0);
      }
      p.image.pixels(r, c) = v;
    }
  }
  if (spec.noise_sigma > 0.0) {
    for (double& v : p.image.pixels.data()) v = std::clamp(v + speckle(rng), 0.0, kMaxGray);
  }
  return p;
}

PhantomSpec random_phantom_spec(std::uint64_t seed, bool with_vessels) {
  std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ULL);
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  PhantomSpec s;
  s.seed = seed;
  s.rpe_slope = uniform(-0.08, 0.08);
  // Keep the whole RPE line between rows 200 and 290.
  const double span = s.rpe_slope * static_cast<double>(s.cols - 1);
  const double lo = 200.0 - std::min(0.0, span);
  const double hi = 290.0 - std::max(0.0, span);
  s.rpe_row = uniform(std::min(lo, hi), std::max(lo, hi));
  s.ilm_row = s.rpe_row - uniform(110.0, 150.0);
  s.rpe_thickness = static_cast<int>(uniform(5.0, 9.0));
  s.choroid_thickness = uniform(45.0, 90.0);
  s.choroid_slope = uniform(-0.02, 0.02);
  s.noise_sigma = uniform(3.0, 8.0);
  s.vessel_count = with_vessels ? static_cast<int>(uniform(12.0, 24.0)) : 0;
  return s;
}

}  // namespace neutroseg
