#include "rlab/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace rlab {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void execute(std::vector<cd>& data, int rank, const int* dims, FftDir dir) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft(rank, dims, p, p, static_cast<int>(dir), FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw std::runtime_error("fftw: plan creation failed");
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace

void fft2d(std::vector<cd>& data, std::size_t nx, std::size_t ny, FftDir dir) {
  if (data.size() != nx * ny) throw std::invalid_argument("fft2d: size mismatch");
  if (data.empty()) return;
  const int dims[2] = {static_cast<int>(ny), static_cast<int>(nx)};
  execute(data, 2, dims, dir);
}

void fft1d(std::vector<cd>& data, FftDir dir) {
  if (data.empty()) return;
  const int dims[1] = {static_cast<int>(data.size())};
  execute(data, 1, dims, dir);
}

std::size_t next_fast_size(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t f : {2, 3, 5, 7})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

}  // namespace rlab
