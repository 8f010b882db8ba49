#include "neutroseg/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

#include "neutroseg/errors.hpp"

namespace neutroseg {
namespace {

// The FFTW planner is not re-entrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

}  // namespace

void dft2d(std::span<std::complex<double>> data, std::size_t rows, std::size_t cols,
           bool inverse) {
  if (data.size() != rows * cols || rows == 0 || cols == 0) {
    throw DimensionError("dft2d buffer does not match its dimensions");
  }
  // Always plan on an fftw_malloc'd buffer so the SIMD path (and therefore the
  // rounding) does not depend on the caller's allocation alignment.
  std::unique_ptr<fftw_complex[], FftwFree> buffer(fftw_alloc_complex(data.size()));
  if (!buffer) throw std::bad_alloc();
  auto* typed = reinterpret_cast<std::complex<double>*>(buffer.get());
  std::copy(data.begin(), data.end(), typed);

  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), buffer.get(),
                            buffer.get(), inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error("FFTW planning failed");
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  const double scale = inverse ? 1.0 / static_cast<double>(data.size()) : 1.0;
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = typed[i] * scale;
}

}  // namespace neutroseg
