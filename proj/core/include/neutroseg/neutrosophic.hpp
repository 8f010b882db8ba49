#pragma once

#include <cstddef>

#include "neutroseg/matrix.hpp"
#include "neutroseg/types.hpp"

namespace neutroseg {

/// Truth, indeterminacy and falsity memberships, each elementwise in [0, 1].
struct NeutrosophicImage {
  Matrix truth;
  Matrix indeterminacy;
  Matrix falsity;

  std::size_t rows() const noexcept { return truth.rows(); }
  std::size_t cols() const noexcept { return truth.cols(); }
};

struct NeutroConfig {
  /// Odd side length of the local-mean window.
  int window = 5;
  /// Use a 1 x window horizontal strip instead of the square window.
  bool row_window = false;
  /// Indeterminacy threshold for the alpha-mean operation, in (0, 1).
  double alpha = 0.85;
};

/// Throws ParameterError unless window is odd and >= 3 and 0 < alpha < 1.
void validate(const NeutroConfig& cfg);

/// Box mean over a window_rows x window_cols neighborhood with clamped
/// (replicated) borders. Both sides must be odd and >= 1.
Matrix local_mean(const Matrix& m, int window_rows, int window_cols);

/// Square window variant.
inline Matrix local_mean(const Matrix& m, int window) { return local_mean(m, window, window); }

/// Min-max normalization to [0, 1]. A constant matrix maps to `degenerate`.
Matrix normalize(const Matrix& m, double degenerate);

/// Gray image -> (T, I, F). T is the normalized local mean, F = 1 - T and I is
/// the normalized absolute deviation from the local mean. A constant local
/// mean yields T = F = 0.5; a constant deviation yields I = 0.
NeutrosophicImage to_neutrosophic(const GrayImage& image, const NeutroConfig& cfg = {});

inline constexpr std::size_t kDefaultEntropyBins = 256;

/// Shannon entropy (natural log) of values in [0, 1] histogrammed into `bins`
/// equal-width bins; value 1 falls into the last bin.
double set_entropy(const Matrix& m, std::size_t bins = kDefaultEntropyBins);

/// Sum of the T, I and F set entropies.
double total_entropy(const NeutrosophicImage& ns, std::size_t bins = kDefaultEntropyBins);

/// Alpha-mean smoothing. T and F are replaced by their local means where
/// I >= alpha. The new indeterminacy is the normalized deviation of the
/// local-mean T from its own local mean, computed over the whole image.
NeutrosophicImage alpha_mean(const NeutrosophicImage& ns, const NeutroConfig& cfg = {});

}  // namespace neutroseg
