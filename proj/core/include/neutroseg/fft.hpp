#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace neutroseg {

using ComplexPlane = std::vector<std::complex<double>>;

/// In-place unnormalized 2-D DFT of a rows x cols row-major array of any
/// size. The inverse direction is scaled by 1 / (rows * cols).
void dft2d(std::span<std::complex<double>> data, std::size_t rows, std::size_t cols,
           bool inverse);

}  // namespace neutroseg
