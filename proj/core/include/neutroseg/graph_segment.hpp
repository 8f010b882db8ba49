#pragma once

#include <cstddef>
#include <vector>

#include "neutroseg/matrix.hpp"
#include "neutroseg/types.hpp"

namespace neutroseg {

enum class WeightMode {
  /// score = gradient, minus the mean brightness of the pixels above.
  kRpe,
  /// score = -gradient, no brightness term.
  kDarkToLight,
};

struct WeightConfig {
  WeightMode mode = WeightMode::kRpe;
  /// Pixels above a node averaged into the brightness term.
  int d_above = 10;
  /// Weight of edges running inside the first or last column.
  double w_min = 1e-5;
  /// Lower clamp for every other edge weight.
  double weight_floor = 1e-5;
  /// Average the brightness term over both endpoints instead of using n1's.
  bool symmetric_brightness = false;
};

/// Throws ParameterError unless d_above >= 1, w_min > 0 and weight_floor > 0.
void validate(const WeightConfig& cfg);

/// RPE mode: the gradient itself. Dark-to-light mode: its negation.
Matrix node_gradient_score(const Matrix& grad, WeightMode mode);

struct GridNode {
  int row = 0;
  int col = 0;
  friend bool operator==(const GridNode&, const GridNode&) = default;
};

/// Mean of the up to d_above pixels directly above `n` in its column; 0 when
/// there are none.
double brightness_above(const Matrix& image, GridNode n, int d_above);

/// max(4 * 255 - score(n1) - score(n2) - brightness, weight_floor). The
/// brightness term is taken at n1 (or averaged, see WeightConfig) in RPE mode
/// and is zero otherwise. Throws TopologyError unless n1, n2 are distinct
/// 8-neighbors inside the grid.
double edge_weight(const Matrix& score, const Matrix& image, GridNode n1, GridNode n2,
                   const WeightConfig& cfg);

/// The undirected graph orders every edge so that n1 is the endpoint with
/// the smaller (col, row); returns the weight actually used by the search,
/// including the w_min override for edges inside the border columns.
double graph_edge_weight(const Matrix& score, const Matrix& image, GridNode a, GridNode b,
                         const WeightConfig& cfg);

struct GridPath {
  std::vector<GridNode> nodes;  // source first
  double cost = 0.0;            // sum of graph_edge_weight along nodes
};

/// Dijkstra on the implicit 8-connected grid from (0, 0) to
/// (rows - 1, cols - 1). Ties pop the lower row first, then the lower column.
GridPath shortest_path(const Matrix& score, const Matrix& image, const WeightConfig& cfg);

/// Collapses a path into one row per column. Interior columns take the
/// rounded mean of the visited rows. The first column takes the row where the
/// path leaves it and the last column the row where the path enters it, so
/// the free slide along the border columns does not leak into the boundary.
/// Columns the path never visits are linearly interpolated.
Boundary path_to_boundary(const GridPath& path, std::size_t rows, std::size_t cols, Layer layer);

/// shortest_path + path_to_boundary. Throws DimensionError for fewer than two
/// columns or mismatched matrices.
Boundary shortest_boundary(const Matrix& score, const Matrix& image, const WeightConfig& cfg,
                           Layer layer = Layer::kRpe);

}  // namespace neutroseg
