#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "neutroseg/matrix.hpp"

namespace neutroseg {

inline constexpr double kDefaultAxialResolutionUm = 3.87167;
inline constexpr double kMaxGray = 255.0;

/// Grayscale B-scan. Pixels stay real-valued through the filter chain and
/// are only quantized on export.
struct GrayImage {
  Matrix pixels;
  double axial_resolution_um = kDefaultAxialResolutionUm;

  std::size_t rows() const noexcept { return pixels.rows(); }
  std::size_t cols() const noexcept { return pixels.cols(); }

  /// Millimeters per pixel row.
  double mm_per_pixel() const noexcept { return axial_resolution_um / 1000.0; }
};

/// Throws DimensionError (below 3x3), DomainError (pixel outside [0, 255])
/// or ParameterError (non-positive resolution).
void validate(const GrayImage& image);

enum class Layer { kRpe, kChoroid };

std::string_view to_string(Layer layer) noexcept;
/// Accepts "RPE" and "CHOROID" (case sensitive).
std::optional<Layer> parse_layer(std::string_view text) noexcept;

struct Point {
  int col = 0;
  int row = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// One row coordinate per image column.
struct Boundary {
  std::vector<int> rows;
  Layer layer = Layer::kRpe;

  std::size_t size() const noexcept { return rows.size(); }
  friend bool operator==(const Boundary&, const Boundary&) = default;
};

/// Sparse expert-marked points for one layer.
struct LabelSet {
  Layer layer = Layer::kRpe;
  std::vector<Point> points;
};

}  // namespace neutroseg
