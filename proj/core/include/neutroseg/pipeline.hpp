#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "neutroseg/filters.hpp"
#include "neutroseg/graph_segment.hpp"
#include "neutroseg/neutrosophic.hpp"
#include "neutroseg/scan_io.hpp"
#include "neutroseg/types.hpp"

namespace neutroseg {

enum class EnhancementOrder { kGammaFirst, kHomomorphicFirst };

struct PipelineConfig {
  NeutroConfig neutro;
  bool apply_alpha_mean = false;
  HomomorphicParams homomorphic;
  bool homomorphic_enabled = true;
  double gamma = 0.2;
  EnhancementOrder order = EnhancementOrder::kGammaFirst;
  WeightConfig weight_rpe{WeightMode::kRpe};
  WeightConfig weight_choroid{WeightMode::kDarkToLight};
  /// Guard band below the flattened RPE before the choroid search starts.
  int roi_offset_px = 5;
  /// Mean |score| of the RPE search below which the result is low confidence.
  double min_gradient_energy = 1.0;
};

/// Throws ParameterError on any out-of-range field.
void validate(const PipelineConfig& cfg);

struct ThicknessProfile {
  std::vector<int> per_column_px;
  std::vector<double> per_column_mm;
  double mean_px = 0.0;
  double mean_mm = 0.0;
};

struct RpeDetection {
  Boundary boundary;
  /// Mean absolute node score fed to the search.
  double gradient_energy = 0.0;
  bool low_confidence = false;
};

struct ChoroidDetection {
  Boundary boundary;
  FlattenMap flatten_map;
  int roi_top = 0;  // first ROI row in flattened coordinates
};

struct Correction {
  Layer layer = Layer::kChoroid;
  Point a;
  Point b;
  friend bool operator==(const Correction&, const Correction&) = default;
};

struct ResultFlags {
  /// Some column has the choroid above the RPE.
  bool choroid_above_rpe = false;
  bool low_confidence = false;
};

struct SegmentationResult {
  std::size_t image_rows = 0;
  std::size_t image_cols = 0;
  double axial_resolution_um = kDefaultAxialResolutionUm;
  Boundary rpe;
  Boundary choroid;
  FlattenMap flatten_map;
  ThicknessProfile thickness;
  PipelineConfig config;
  ResultFlags flags;
  double gradient_energy = 0.0;
  std::vector<Correction> corrections;
  /// Stage name -> wall time in milliseconds.
  std::map<std::string, double> stage_timings_ms;
};

/// T set (alpha-mean first when enabled) -> vertical gradient of 255 * T ->
/// RPE-mode shortest boundary. The brightness term reads the raw pixels.
RpeDetection detect_rpe(const GrayImage& image, const PipelineConfig& cfg = {});

/// Flatten by the RPE, crop the ROI below it, take the F set of the ROI,
/// enhance (gamma + homomorphic), then search dark-to-light. Because F
/// inverts polarity, the image-polarity gradient is -VerGrad(F).
/// Throws GeometryError when the ROI is shorter than three rows.
ChoroidDetection detect_choroid(const GrayImage& image, const Boundary& rpe,
                                const PipelineConfig& cfg = {});

/// The enhanced F set of an already cropped ROI (exposed for debugging dumps).
Matrix enhance_falsity(const GrayImage& roi, const PipelineConfig& cfg);

ThicknessProfile thickness_profile(const Boundary& rpe, const Boundary& choroid,
                                   double resolution_um = kDefaultAxialResolutionUm);

/// Recomputes thickness and flags from the stored boundaries.
void refresh_derived(SegmentationResult& result);

/// detect_rpe + detect_choroid + thickness, with per-stage timings. When the
/// RPE is low confidence and leaves no room for the choroid search, the
/// choroid is set equal to the RPE instead of failing.
SegmentationResult segment(const GrayImage& image, const PipelineConfig& cfg = {});

/// Replaces the boundary strictly between the two columns by the straight
/// line through a and b (rounded to the nearest row) and pins both points.
/// Throws DegenerateSelectionError for equal columns and DimensionError for
/// points outside [0, size) x [0, image_rows).
Boundary apply_manual_correction(const Boundary& b, Point a, Point c, std::size_t image_rows);

/// Applies a correction to the matching layer and records it.
void apply_correction(SegmentationResult& result, const Correction& correction);

struct PointError {
  int col = 0;
  int labeled_row = 0;
  int predicted_row = 0;
  int abs_diff = 0;
};

struct ErrorReport {
  Layer layer = Layer::kChoroid;
  std::size_t n_points = 0;
  double mean_unsigned_px = 0.0;
  double mean_unsigned_mm = 0.0;
  std::vector<PointError> per_point;
};

/// Mean unsigned row error at the labeled columns. Throws ParameterError on a
/// layer mismatch, UndefinedMetricError for no labels and DimensionError for
/// points outside the boundary (or outside image_rows when given).
ErrorReport evaluate(const Boundary& b, const LabelSet& labels,
                     double resolution_um = kDefaultAxialResolutionUm,
                     std::optional<std::size_t> image_rows = std::nullopt);

/// Blue (thinnest) to red (thickest) linear colormap; a flat range maps to
/// the midpoint color.
Rgb thickness_color(double value, double lo, double hi);

/// Writes `<stem>.csv` (scan x column thickness in mm), `<stem>.png` (one
/// colored row per scan) and `<stem>.txt` (colormap range). Any extension on
/// `out` is replaced.
void thickness_map(std::span<const SegmentationResult> volume, const std::filesystem::path& out);

/// `col,thickness_px,thickness_mm` table.
std::string thickness_csv(const ThicknessProfile& t);

}  // namespace neutroseg
