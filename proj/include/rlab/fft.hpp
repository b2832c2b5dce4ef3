#pragma once

// Thin FFTW wrapper. Planning is serialised behind a mutex (FFTW's planner is
// not thread-safe); execution of distinct plans may run concurrently.

#include <complex>
#include <cstddef>
#include <vector>

namespace rlab {

using cd = std::complex<double>;

enum class FftDir { forward = -1, inverse = +1 };

/// Unnormalised in-place 2D transform of `ny` rows of `nx` samples (row-major).
/// forward: X[k] = sum x[n] e^{-2 pi i k n / M}; inverse uses e^{+...}.
void fft2d(std::vector<cd>& data, std::size_t nx, std::size_t ny, FftDir dir);

/// Unnormalised in-place transform of a single 1D sequence.
void fft1d(std::vector<cd>& data, FftDir dir);

/// Smallest n' >= n of the form 2^a 3^b 5^c 7^e.
std::size_t next_fast_size(std::size_t n);

/// Signed frequency index of DFT bin k for length n, in [-n/2, n/2).
inline std::ptrdiff_t signed_bin(std::size_t k, std::size_t n) {
  return k < (n + 1) / 2 ? static_cast<std::ptrdiff_t>(k) : static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(n);
}

}  // namespace rlab
