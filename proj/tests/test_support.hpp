#ifndef QNP_TEST_SUPPORT_HPP
#define QNP_TEST_SUPPORT_HPP

// Fixed-seed generators and independent reference computations shared by
// the unit tests.

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qnp/grid.hpp"

namespace qnp::testing {

inline constexpr std::uint64_t kSeed = 20240917;

class Gen {
 public:
  explicit Gen(std::uint64_t seed = kSeed) : rng_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Array2D array(int rows, int cols, double lo = -1.0, double hi = 1.0) {
    Array2D a(rows, cols);
    for (auto& x : a.storage()) x = uniform(lo, hi);
    return a;
  }
  Kernel3x3 kernel() {
    std::array<double, 9> c{};
    for (auto& x : c) x = uniform();
    return Kernel3x3(c);
  }

 private:
  std::mt19937_64 rng_;
};

/// Owned copy of an array's cells; safe to iterate when `a` is a temporary.
inline std::vector<double> cells(const Array2D& a) { return a.storage(); }

/// Valid-mode cross-correlation with the CNN-style weight layout w(p, q),
/// p = row offset 0..2 from the window's first row. A kernel in translation
/// form k corresponds to w = k.rotated180().
inline Array2D correlate_valid(const Array2D& a, const Kernel3x3& k) {
  const Kernel3x3 w = k.rotated180();
  Array2D out(a.rows() - 2, a.cols() - 2);
  for (int i = 0; i < out.rows(); ++i) {
    for (int j = 0; j < out.cols(); ++j) {
      double acc = 0.0;
      for (int p = 0; p < 3; ++p) {
        for (int q = 0; q < 3; ++q) acc += w.at(p - 1, q - 1) * a(i + p, j + q);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

/// Naive O(N^2) unitary DFT, F[k] = N^{-1/2} sum_j x[j] e^{+2 pi i j k / N}.
inline std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += x[j] * std::polar(1.0, 2.0 * M_PI * static_cast<double>(j * k) / static_cast<double>(n));
    }
    y[k] = acc / std::sqrt(static_cast<double>(n));
  }
  return y;
}

/// Gate total of the K x K circuit under the counting convention: two
/// 16-amplitude rotation trees, one 16-phase diagonal (each 1+2+4+8 rotations
/// and 2+4+8 CNOTs = 29 gates), four QFTs of m qubits and 3m controlled
/// phases per data register in SELECT.
inline std::size_t expected_gate_count(int window) {
  int m = 0;
  while ((1 << m) < window) ++m;
  const int qft = m + m * (m - 1) / 2 + m / 2;
  return static_cast<std::size_t>(3 * 29 + 4 * qft + 2 * 3 * m);
}

}  // namespace qnp::testing

#endif  // QNP_TEST_SUPPORT_HPP
