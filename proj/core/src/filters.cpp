#include "neutroseg/filters.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "neutroseg/errors.hpp"
#include "neutroseg/fft.hpp"

namespace neutroseg {

Matrix vertical_gradient(const Matrix& m) {
  if (m.rows() < 3) {
    throw DimensionError("vertical gradient needs at least 3 rows, got " +
                         std::to_string(m.rows()));
  }
  const std::size_t rows = m.rows();
  Matrix out(rows, m.cols());
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t up = i == 0 ? 0 : i - 1;
    const std::size_t down = i + 1 == rows ? rows - 1 : i + 1;
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = 2.0 * m(up, j) - 2.0 * m(down, j);
  }
  return out;
}

Matrix gamma_correct(const Matrix& m, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ParameterError("gamma must lie in (0, 1]");
  Matrix out(m.rows(), m.cols());
  auto src = m.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!(src[i] >= 0.0)) throw DomainError("gamma correction input must be non-negative");
    dst[i] = gamma == 1.0 ? src[i] : kMaxGray * std::pow(src[i] / kMaxGray, gamma);
  }
  return out;
}

double homomorphic_gain(double u, double v, std::size_t rows, std::size_t cols,
                        const HomomorphicParams& p) {
  const double du = u - static_cast<double>(rows / 2);
  const double dv = v - static_cast<double>(cols / 2);
  const double d2 = du * du + dv * dv;
  return (p.gamma_h - p.gamma_l) * (1.0 - std::exp(-d2 / (2.0 * p.sigma * p.sigma))) + p.gamma_l;
}

Matrix homomorphic_transfer(std::size_t rows, std::size_t cols, const HomomorphicParams& p) {
  if (!(p.sigma > 0.0)) throw ParameterError("homomorphic sigma must be positive");
  Matrix h(rows, cols);
  for (std::size_t u = 0; u < rows; ++u) {
    for (std::size_t v = 0; v < cols; ++v) {
      h(u, v) = homomorphic_gain(static_cast<double>(u), static_cast<double>(v), rows, cols, p);
    }
  }
  return h;
}

Matrix homomorphic_filter(const Matrix& m, const HomomorphicParams& p) {
  if (!(p.sigma > 0.0)) throw ParameterError("homomorphic sigma must be positive");
  if (m.empty()) throw DimensionError("homomorphic filter of empty matrix");
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  if (m.min() < 0.0) throw DomainError("homomorphic filter input must be non-negative");
  if (m.min() == m.max()) return Matrix(rows, cols, kMaxGray / 2.0);

  ComplexPlane plane(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) plane[i] = std::log1p(m.data()[i]);
  dft2d(plane, rows, cols, false);

  // Unshifted index k sits at centered position (k + size / 2) mod size.
  const Matrix h = homomorphic_transfer(rows, cols, p);
  for (std::size_t k = 0; k < rows; ++k) {
    const std::size_t u = (k + rows / 2) % rows;
    for (std::size_t l = 0; l < cols; ++l) {
      const std::size_t v = (l + cols / 2) % cols;
      plane[k * cols + l] *= h(u, v);
    }
  }
  dft2d(plane, rows, cols, true);

  Matrix out(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) out.data()[i] = std::expm1(plane[i].real());
  const double lo = out.min();
  const double hi = out.max();
  if (hi - lo <= 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)))) {
    return Matrix(rows, cols, kMaxGray / 2.0);
  }
  for (double& v : out.data()) v = (v - lo) / (hi - lo) * kMaxGray;
  return out;
}

Flattened flatten(const GrayImage& image, const Boundary& rpe) {
  const std::size_t rows = image.rows();
  const std::size_t cols = image.cols();
  if (rpe.size() != cols) {
    throw DimensionError("RPE boundary has " + std::to_string(rpe.size()) +
                         " columns, image has " + std::to_string(cols));
  }
  for (int r : rpe.rows) {
    if (r < 0 || static_cast<std::size_t>(r) >= rows) {
      throw DimensionError("RPE row " + std::to_string(r) + " outside the image");
    }
  }

  Flattened result;
  result.map.rows = rows;
  result.map.pivot_row = cols == 0 ? 0 : *std::max_element(rpe.rows.begin(), rpe.rows.end());
  result.map.shifts.resize(cols);
  result.image.axial_resolution_um = image.axial_resolution_um;
  result.image.pixels = Matrix(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    const int shift = result.map.pivot_row - rpe.rows[c];
    result.map.shifts[c] = shift;
    for (std::size_t r = 0; r < rows; ++r) {
      result.image.pixels((r + static_cast<std::size_t>(shift)) % rows, c) = image.pixels(r, c);
    }
  }
  return result;
}

Boundary unflatten_boundary(const Boundary& b, const FlattenMap& fm) {
  if (b.size() != fm.shifts.size()) {
    throw DimensionError("boundary and flatten map lengths differ");
  }
  Boundary out{std::vector<int>(b.size()), b.layer};
  const int max_row = fm.rows == 0 ? 0 : static_cast<int>(fm.rows) - 1;
  for (std::size_t c = 0; c < b.size(); ++c) {
    out.rows[c] = std::clamp(b.rows[c] - fm.shifts[c], 0, max_row);
  }
  return out;
}

}  // namespace neutroseg
