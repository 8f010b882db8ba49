#include "neutroseg/neutrosophic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "neutroseg/errors.hpp"

namespace neutroseg {
namespace {

std::size_t clamp_index(std::ptrdiff_t i, std::size_t n) {
  if (i < 0) return 0;
  if (static_cast<std::size_t>(i) >= n) return n - 1;
  return static_cast<std::size_t>(i);
}

Matrix window_mean(const Matrix& m, const NeutroConfig& cfg) {
  return cfg.row_window ? local_mean(m, 1, cfg.window) : local_mean(m, cfg.window);
}

}  // namespace

void validate(const NeutroConfig& cfg) {
  if (cfg.window < 3 || cfg.window % 2 == 0) {
    throw ParameterError("neutrosophic window must be odd and >= 3, got " +
                         std::to_string(cfg.window));
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
}

Matrix local_mean(const Matrix& m, int window_rows, int window_cols) {
  if (window_rows < 1 || window_cols < 1 || window_rows % 2 == 0 || window_cols % 2 == 0) {
    throw ParameterError("local mean window sides must be odd and >= 1");
  }
  if (m.empty()) throw DimensionError("local mean of empty matrix");
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  const std::ptrdiff_t hr = window_rows / 2;
  const std::ptrdiff_t hc = window_cols / 2;

  // Clamped borders make the window separable: horizontal sums, then vertical.
  Matrix horizontal(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      double sum = 0.0;
      for (std::ptrdiff_t n = -hc; n <= hc; ++n) {
        sum += m(i, clamp_index(static_cast<std::ptrdiff_t>(j) + n, cols));
      }
      horizontal(i, j) = sum;
    }
  }
  Matrix out(rows, cols);
  const double area = static_cast<double>(window_rows) * static_cast<double>(window_cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      double sum = 0.0;
      for (std::ptrdiff_t k = -hr; k <= hr; ++k) {
        sum += horizontal(clamp_index(static_cast<std::ptrdiff_t>(i) + k, rows), j);
      }
      out(i, j) = sum / area;
    }
  }
  return out;
}

Matrix normalize(const Matrix& m, double degenerate) {
  const double lo = m.min();
  const double hi = m.max();
  Matrix out(m.rows(), m.cols(), degenerate);
  if (hi == lo) return out;
  const double span = hi - lo;
  auto src = m.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = (src[i] - lo) / span;
  return out;
}

NeutrosophicImage to_neutrosophic(const GrayImage& image, const NeutroConfig& cfg) {
  validate(cfg);
  const Matrix& g = image.pixels;
  const Matrix mean = window_mean(g, cfg);

  NeutrosophicImage ns;
  ns.truth = normalize(mean, 0.5);
  ns.falsity = Matrix(g.rows(), g.cols());
  for (std::size_t i = 0; i < g.size(); ++i) ns.falsity.data()[i] = 1.0 - ns.truth.data()[i];

  Matrix deviation(g.rows(), g.cols());
  for (std::size_t i = 0; i < g.size(); ++i) {
    deviation.data()[i] = std::abs(g.data()[i] - mean.data()[i]);
  }
  ns.indeterminacy = normalize(deviation, 0.0);
  return ns;
}

double set_entropy(const Matrix& m, std::size_t bins) {
  if (bins == 0) throw ParameterError("entropy needs at least one bin");
  if (m.empty()) throw UndefinedInputError("entropy of an empty matrix is undefined");
  std::vector<std::size_t> counts(bins, 0);
  const double nbins = static_cast<double>(bins);
  for (double v : m.data()) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("entropy input outside [0, 1]");
    const auto bin = std::min(static_cast<std::size_t>(v * nbins), bins - 1);
    ++counts[bin];
  }
  const double total = static_cast<double>(m.size());
  double entropy = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    entropy -= p * std::log(p);
  }
  return entropy;
}

double total_entropy(const NeutrosophicImage& ns, std::size_t bins) {
  return set_entropy(ns.truth, bins) + set_entropy(ns.indeterminacy, bins) +
         set_entropy(ns.falsity, bins);
}

NeutrosophicImage alpha_mean(const NeutrosophicImage& ns, const NeutroConfig& cfg) {
  validate(cfg);
  if (!ns.truth.same_shape(ns.indeterminacy) || !ns.truth.same_shape(ns.falsity)) {
    throw DimensionError("T, I and F must share dimensions");
  }
  const Matrix truth_mean = window_mean(ns.truth, cfg);
  const Matrix falsity_mean = window_mean(ns.falsity, cfg);

  NeutrosophicImage out{ns.truth, Matrix{}, ns.falsity};
  const auto indet = ns.indeterminacy.data();
  for (std::size_t i = 0; i < indet.size(); ++i) {
    if (indet[i] >= cfg.alpha) {
      out.truth.data()[i] = truth_mean.data()[i];
      out.falsity.data()[i] = falsity_mean.data()[i];
    }
  }

  const Matrix truth_mean2 = window_mean(truth_mean, cfg);
  Matrix deviation(ns.rows(), ns.cols());
  for (std::size_t i = 0; i < deviation.size(); ++i) {
    deviation.data()[i] = std::abs(truth_mean.data()[i] - truth_mean2.data()[i]);
  }
  out.indeterminacy = normalize(deviation, 0.0);
  return out;
}

}  // namespace neutroseg
