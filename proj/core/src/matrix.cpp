#include "neutroseg/matrix.hpp"

#include <algorithm>
#include <string>

#include "neutroseg/errors.hpp"

namespace neutroseg {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("matrix data has " + std::to_string(data_.size()) +
                         " elements, expected " + std::to_string(rows * cols));
  }
}

double Matrix::min() const {
  if (data_.empty()) throw DimensionError("min of empty matrix");
  return *std::min_element(data_.begin(), data_.end());
}

double Matrix::max() const {
  if (data_.empty()) throw DimensionError("max of empty matrix");
  return *std::max_element(data_.begin(), data_.end());
}

Matrix crop_rows(const Matrix& m, std::size_t first, std::size_t count) {
  if (first + count > m.rows()) throw DimensionError("row crop exceeds matrix height");
  Matrix out(count, m.cols());
  const auto src = m.data().subspan(first * m.cols(), count * m.cols());
  std::copy(src.begin(), src.end(), out.data().begin());
  return out;
}

Matrix affine(const Matrix& m, double a, double b) {
  Matrix out = m;
  for (double& v : out.data()) v = a * v + b;
  return out;
}

}  // namespace neutroseg
