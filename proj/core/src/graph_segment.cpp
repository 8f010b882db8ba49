#include "neutroseg/graph_segment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <utility>

#include "neutroseg/errors.hpp"

namespace neutroseg {
namespace {

constexpr double kMaxEdgeScore = 4.0 * kMaxGray;

// Shared by edge_weight and the search so both evaluate identical arithmetic.
double clamped_weight(double s1, double s2, double brightness, double floor) {
  const double raw = kMaxEdgeScore - s1 - s2 - brightness;
  return std::max(raw, floor);
}

bool in_grid(const Matrix& m, GridNode n) {
  return n.row >= 0 && n.col >= 0 && static_cast<std::size_t>(n.row) < m.rows() &&
         static_cast<std::size_t>(n.col) < m.cols();
}

bool is_neighbor(GridNode a, GridNode b) {
  const int dr = std::abs(a.row - b.row);
  const int dc = std::abs(a.col - b.col);
  return dr <= 1 && dc <= 1 && (dr + dc) > 0;
}

bool canonical_first(GridNode a, GridNode b) {
  return a.col != b.col ? a.col < b.col : a.row < b.row;
}

double brightness_term(const Matrix& image, GridNode n1, GridNode n2, const WeightConfig& cfg) {
  if (cfg.mode != WeightMode::kRpe) return 0.0;
  const double b1 = brightness_above(image, n1, cfg.d_above);
  if (!cfg.symmetric_brightness) return b1;
  return 0.5 * (b1 + brightness_above(image, n2, cfg.d_above));
}

void check_inputs(const Matrix& score, const Matrix& image, const WeightConfig& cfg) {
  validate(cfg);
  if (!score.same_shape(image)) throw DimensionError("score and image dimensions differ");
  if (score.cols() < 2) throw DimensionError("boundary search needs at least 2 columns");
  if (score.rows() < 1) throw DimensionError("boundary search needs at least 1 row");
}

}  // namespace

void validate(const WeightConfig& cfg) {
  if (cfg.d_above < 1) throw ParameterError("d_above must be >= 1");
  if (!(cfg.w_min > 0.0)) throw ParameterError("w_min must be positive");
  if (!(cfg.weight_floor > 0.0)) throw ParameterError("weight_floor must be positive");
}

Matrix node_gradient_score(const Matrix& grad, WeightMode mode) {
  if (mode == WeightMode::kRpe) return grad;
  Matrix out = grad;
  for (double& v : out.data()) v = -v;
  return out;
}

double brightness_above(const Matrix& image, GridNode n, int d_above) {
  const int first = std::max(0, n.row - d_above);
  if (first >= n.row) return 0.0;
  double sum = 0.0;
  for (int r = n.row - 1; r >= first; --r) {
    sum += image(static_cast<std::size_t>(r), static_cast<std::size_t>(n.col));
  }
  return sum / static_cast<double>(n.row - first);
}

double edge_weight(const Matrix& score, const Matrix& image, GridNode n1, GridNode n2,
                   const WeightConfig& cfg) {
  if (!score.same_shape(image)) throw DimensionError("score and image dimensions differ");
  if (!in_grid(score, n1) || !in_grid(score, n2)) throw TopologyError("edge endpoint outside grid");
  if (!is_neighbor(n1, n2)) throw TopologyError("edge endpoints are not 8-neighbors");
  const auto s = [&](GridNode n) {
    return score(static_cast<std::size_t>(n.row), static_cast<std::size_t>(n.col));
  };
  return clamped_weight(s(n1), s(n2), brightness_term(image, n1, n2, cfg), cfg.weight_floor);
}

double graph_edge_weight(const Matrix& score, const Matrix& image, GridNode a, GridNode b,
                         const WeightConfig& cfg) {
  const int last = static_cast<int>(score.cols()) - 1;
  if (a.col == b.col && (a.col == 0 || a.col == last) && is_neighbor(a, b) && in_grid(score, a) &&
      in_grid(score, b)) {
    return cfg.w_min;
  }
  return canonical_first(a, b) ? edge_weight(score, image, a, b, cfg)
                               : edge_weight(score, image, b, a, cfg);
}

GridPath shortest_path(const Matrix& score, const Matrix& image, const WeightConfig& cfg) {
  check_inputs(score, image, cfg);
  const int rows = static_cast<int>(score.rows());
  const int cols = static_cast<int>(score.cols());
  const std::size_t n_nodes = score.size();

  std::vector<double> brightness(n_nodes, 0.0);
  if (cfg.mode == WeightMode::kRpe) {
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        brightness[static_cast<std::size_t>(r) * cols + c] = brightness_above(image, {r, c}, cfg.d_above);
      }
    }
  }
  const auto s = score.data();
  const auto weight = [&](std::size_t u, std::size_t v) {
    const int ur = static_cast<int>(u) / cols, uc = static_cast<int>(u) % cols;
    const int vr = static_cast<int>(v) / cols, vc = static_cast<int>(v) % cols;
    if (uc == vc && (uc == 0 || uc == cols - 1)) return cfg.w_min;
    const bool u_first = uc != vc ? uc < vc : ur < vr;
    const std::size_t n1 = u_first ? u : v;
    const std::size_t n2 = u_first ? v : u;
    double bt = 0.0;
    if (cfg.mode == WeightMode::kRpe) {
      bt = cfg.symmetric_brightness ? 0.5 * (brightness[n1] + brightness[n2]) : brightness[n1];
    }
    return clamped_weight(s[n1], s[n2], bt, cfg.weight_floor);
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n_nodes, kInf);
  std::vector<std::int64_t> prev(n_nodes, -1);
  std::vector<bool> settled(n_nodes, false);
  using Entry = std::pair<double, std::size_t>;
  // Min-heap on (distance, row-major index): ties pop the lower row, then column.
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;

  const std::size_t source = 0;
  const std::size_t sink = n_nodes - 1;
  dist[source] = 0.0;
  frontier.emplace(0.0, source);
  while (!frontier.empty()) {
    const auto [d, u] = frontier.top();
    frontier.pop();
    if (settled[u]) continue;
    settled[u] = true;
    if (u == sink) break;
    const int ur = static_cast<int>(u) / cols;
    const int uc = static_cast<int>(u) % cols;
    for (int dr = -1; dr <= 1; ++dr) {
      const int vr = ur + dr;
      if (vr < 0 || vr >= rows) continue;
      for (int dc = -1; dc <= 1; ++dc) {
        const int vc = uc + dc;
        if ((dr == 0 && dc == 0) || vc < 0 || vc >= cols) continue;
        const std::size_t v = static_cast<std::size_t>(vr) * cols + vc;
        if (settled[v]) continue;
        const double nd = d + weight(u, v);
        if (nd < dist[v]) {
          dist[v] = nd;
          prev[v] = static_cast<std::int64_t>(u);
          frontier.emplace(nd, v);
        }
      }
    }
  }

  GridPath path;
  path.cost = dist[sink];
  for (std::int64_t v = static_cast<std::int64_t>(sink); v >= 0; v = prev[static_cast<std::size_t>(v)]) {
    path.nodes.push_back({static_cast<int>(v / cols), static_cast<int>(v % cols)});
  }
  std::reverse(path.nodes.begin(), path.nodes.end());
  return path;
}

Boundary path_to_boundary(const GridPath& path, std::size_t rows, std::size_t cols, Layer layer) {
  if (cols == 0) throw DimensionError("boundary needs at least one column");
  std::vector<long> sum(cols, 0);
  std::vector<long> count(cols, 0);
  std::vector<int> first_in_col(cols, -1);
  std::vector<int> last_in_col(cols, -1);
  for (const GridNode& n : path.nodes) {
    if (n.col < 0 || static_cast<std::size_t>(n.col) >= cols || n.row < 0 ||
        static_cast<std::size_t>(n.row) >= rows) {
      throw DimensionError("path node outside the grid");
    }
    const auto c = static_cast<std::size_t>(n.col);
    sum[c] += n.row;
    ++count[c];
    if (first_in_col[c] < 0) first_in_col[c] = n.row;
    last_in_col[c] = n.row;
  }

  Boundary b{std::vector<int>(cols, 0), layer};
  std::vector<bool> known(cols, false);
  for (std::size_t c = 0; c < cols; ++c) {
    if (count[c] == 0) continue;
    known[c] = true;
    if (cols > 1 && c == 0) {
      b.rows[c] = last_in_col[c];
    } else if (cols > 1 && c == cols - 1) {
      b.rows[c] = first_in_col[c];
    } else {
      b.rows[c] = static_cast<int>(std::lround(static_cast<double>(sum[c]) / count[c]));
    }
  }

  // Defensive: a connected left-to-right path visits every column.
  std::ptrdiff_t prev_known = -1;
  for (std::size_t c = 0; c < cols; ++c) {
    if (known[c]) {
      prev_known = static_cast<std::ptrdiff_t>(c);
      continue;
    }
    std::size_t next = c + 1;
    while (next < cols && !known[next]) ++next;
    if (prev_known < 0 && next >= cols) break;
    if (prev_known < 0) {
      b.rows[c] = b.rows[next];
    } else if (next >= cols) {
      b.rows[c] = b.rows[static_cast<std::size_t>(prev_known)];
    } else {
      const double t = static_cast<double>(static_cast<std::ptrdiff_t>(c) - prev_known) /
                       static_cast<double>(static_cast<std::ptrdiff_t>(next) - prev_known);
      const double r0 = b.rows[static_cast<std::size_t>(prev_known)];
      const double r1 = b.rows[next];
      b.rows[c] = static_cast<int>(std::lround(r0 + t * (r1 - r0)));
    }
  }
  return b;
}

Boundary shortest_boundary(const Matrix& score, const Matrix& image, const WeightConfig& cfg,
                           Layer layer) {
  const GridPath path = shortest_path(score, image, cfg);
  return path_to_boundary(path, score.rows(), score.cols(), layer);
}

}  // namespace neutroseg
