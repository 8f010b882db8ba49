#pragma once

#include <cstdint>
#include <vector>

#include "neutroseg/types.hpp"

namespace neutroseg {

/// Synthetic EDI-OCT-like B-scan: dark vitreous, moderately bright retina,
/// bright RPE band, choroid band with dark vessel disks near its lower edge,
/// slightly brighter sclera fading with depth. Boundaries are straight lines with the given
/// slopes so the ground truth is known exactly.
struct PhantomSpec {
  std::size_t rows = 496;
  std::size_t cols = 768;
  double ilm_row = 110.0;        // top of the retina at column 0
  double rpe_row = 250.0;        // last RPE band row at column 0
  double rpe_slope = 0.0;        // rows per column
  int rpe_thickness = 6;
  double choroid_thickness = 60.0;
  double choroid_slope = 0.0;    // added to rpe_slope for the lower boundary
  double vitreous_level = 15.0;
  double retina_level = 140.0;
  double rpe_level = 235.0;
  double choroid_level = 130.0;
  double vessel_level = 15.0;
  double sclera_level = 150.0;
  int vessel_count = 0;
  double vessel_min_radius = 8.0;
  double vessel_max_radius = 16.0;
  /// Rows between a vessel's lowest pixel and the last choroid row are drawn
  /// from [1, vessel_max_gap], mimicking large vessels next to the sclera.
  double vessel_max_gap = 10.0;
  double noise_sigma = 0.0;      // additive Gaussian speckle
  std::uint64_t seed = 1;
};

struct Phantom {
  GrayImage image;
  /// First row below the RPE band per column.
  Boundary rpe;
  /// First sclera row per column.
  Boundary choroid;
};

Phantom make_phantom(const PhantomSpec& spec);

/// Randomized spec within the acceptance ranges (slopes <= 1/10, speckle <= 8).
PhantomSpec random_phantom_spec(std::uint64_t seed, bool with_vessels);

}  // namespace neutroseg
