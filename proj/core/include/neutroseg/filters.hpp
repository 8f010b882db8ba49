#pragma once

#include <cstddef>
#include <vector>

#include "neutroseg/matrix.hpp"
#include "neutroseg/types.hpp"

namespace neutroseg {

/// Correlation with the column kernel [2; 0; -2] and replicated borders:
/// out(i, j) = 2 m(i-1, j) - 2 m(i+1, j). Bright-above-dark is positive.
Matrix vertical_gradient(const Matrix& m);

/// 255^(1-gamma) * m^gamma, evaluated as 255 * (m / 255)^gamma so that 0 and
/// 255 are exact fixed points.
Matrix gamma_correct(const Matrix& m, double gamma);

struct HomomorphicParams {
  double sigma = 3.2;
  double gamma_h = 1.0;
  double gamma_l = 0.0;
};

/// Gaussian high-emphasis gain at spectrum-centered coordinates (u, v) of a
/// rows x cols spectrum. The center is (rows / 2, cols / 2) in integer
/// division, i.e. where the zero frequency lands after an fftshift.
double homomorphic_gain(double u, double v, std::size_t rows, std::size_t cols,
                        const HomomorphicParams& p);

/// Full centered transfer function H(u, v).
Matrix homomorphic_transfer(std::size_t rows, std::size_t cols, const HomomorphicParams& p);

/// ln(1 + m) -> DFT -> multiply by H -> inverse DFT (real part) -> exp - 1 ->
/// linear rescale to [0, 255]. A constant result is pinned to 127.5.
Matrix homomorphic_filter(const Matrix& m, const HomomorphicParams& p = {});

/// Per-column circular shifts that make a boundary horizontal.
struct FlattenMap {
  std::vector<int> shifts;
  int pivot_row = 0;
  std::size_t rows = 0;  // image height, for clamping on the way back
};

struct Flattened {
  GrayImage image;
  FlattenMap map;
};

/// Shifts every column down by pivot_row - rpe[c], wrapping the pixels that
/// fall off the bottom back to the top. pivot_row is the deepest RPE row.
Flattened flatten(const GrayImage& image, const Boundary& rpe);

/// out[c] = b[c] - shifts[c], clamped to [0, rows - 1].
Boundary unflatten_boundary(const Boundary& b, const FlattenMap& fm);

}  // namespace neutroseg
