#ifndef QNP_GRID_HPP
#define QNP_GRID_HPP

// Uniform 2D grids, 3x3 kernels and classical kernel application.
//
// Orientation: row index i grows with +y, column index j grows with +x; a
// cell's centre sits at x = (j + 0.5) h, y = (i + 0.5) h.
//
// Kernel semantics: entry (dr, dc) with dr, dc in {-1, 0, 1} is the weight of
// the translation by (dr, dc), so applying a kernel k to f gives
//
//     out(i, j) = sum_{dr,dc} k(dr, dc) * f(i - dr, j - dc).
//
// This is the same translation operator the LCU circuit realises with QFT
// phases. Read as a CNN cross-correlation the weights are k rotated by 180
// degrees (see Kernel3x3::rotated180).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "qnp/errors.hpp"

namespace qnp {

/// Dense row-major 2D array of doubles.
class Array2D {
 public:
  Array2D() = default;
  Array2D(int rows, int cols, double fill = 0.0) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw InvalidArgument("negative array dimension");
    data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
  }
  Array2D(int rows, int cols, std::vector<double> data) : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows < 0 || cols < 0 || data_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
      throw ShapeMismatch("array data does not match " + std::to_string(rows) + "x" + std::to_string(cols));
    }
  }
  /// Row-major nested initializer, e.g. {{1, 2}, {3, 4}}.
  Array2D(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ ? static_cast<int>(rows.begin()->size()) : 0;
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != cols_) throw ShapeMismatch("ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(int i, int j) { return data_[index(i, j)]; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::vector<double>& storage() noexcept { return data_; }
  const std::vector<double>& storage() const noexcept { return data_; }

  bool same_shape(const Array2D& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

  /// Copy of the rectangle starting at (i0, j0).
  Array2D sub(int i0, int j0, int rows, int cols) const {
    if (i0 < 0 || j0 < 0 || i0 + rows > rows_ || j0 + cols > cols_) throw InvalidArgument("sub-block out of range");
    Array2D out(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) out(i, j) = (*this)(i0 + i, j0 + j);
    }
    return out;
  }

  friend bool operator==(const Array2D&, const Array2D&) = default;

 private:
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

enum class BoundaryKind {
  kDirichletZero,  ///< ghost cells hold 0 (the wall sits one spacing outside the last cell)
  kNeumannZero,    ///< ghost cells replicate the adjacent cell
};

/// Boundary rule per side. "bottom" is row 0 (lowest y), "left" is column 0.
struct BoundarySpec {
  BoundaryKind bottom = BoundaryKind::kDirichletZero;
  BoundaryKind top = BoundaryKind::kDirichletZero;
  BoundaryKind left = BoundaryKind::kDirichletZero;
  BoundaryKind right = BoundaryKind::kDirichletZero;

  static BoundarySpec dirichlet() { return {}; }
  static BoundarySpec neumann() {
    return {BoundaryKind::kNeumannZero, BoundaryKind::kNeumannZero, BoundaryKind::kNeumannZero,
            BoundaryKind::kNeumannZero};
  }
  bool all(BoundaryKind k) const { return bottom == k && top == k && left == k && right == k; }
  bool is_mixed() const { return !all(BoundaryKind::kDirichletZero) && !all(BoundaryKind::kNeumannZero); }
  friend bool operator==(const BoundarySpec&, const BoundarySpec&) = default;
};

/// Scalar field on an H x W uniform grid with spacing h and a boundary rule.
struct Field2D {
  Array2D values;
  double h = 1.0;
  BoundarySpec bc{};

  Field2D() = default;
  Field2D(int rows, int cols, double spacing, BoundarySpec boundary = {}, double fill = 0.0)
      : values(rows, cols, fill), h(spacing), bc(boundary) {
    if (!(spacing > 0.0)) throw InvalidArgument("grid spacing must be positive");
  }
  Field2D(Array2D v, double spacing, BoundarySpec boundary = {}) : values(std::move(v)), h(spacing), bc(boundary) {
    if (!(spacing > 0.0)) throw InvalidArgument("grid spacing must be positive");
  }

  int rows() const noexcept { return values.rows(); }
  int cols() const noexcept { return values.cols(); }
  double& operator()(int i, int j) { return values(i, j); }
  double operator()(int i, int j) const { return values(i, j); }

  /// A field of the same shape, spacing and boundary rule, filled with `fill`.
  Field2D like(double fill = 0.0) const { return Field2D(rows(), cols(), h, bc, fill); }

  bool all_finite() const {
    return std::all_of(values.storage().begin(), values.storage().end(), [](double v) { return std::isfinite(v); });
  }
};

/// The nine coefficients of a 3x3 stencil, row-major with offsets -1..1.
class Kernel3x3 {
 public:
  Kernel3x3() { c_.fill(0.0); }
  explicit Kernel3x3(const std::array<double, 9>& coefficients) : c_(coefficients) {}
  /// Rows from dr = -1 to dr = +1.
  Kernel3x3(std::initializer_list<std::initializer_list<double>> rows) {
    if (rows.size() != 3) throw InvalidArgument("kernel needs 3 rows");
    std::size_t k = 0;
    for (const auto& r : rows) {
      if (r.size() != 3) throw InvalidArgument("kernel rows need 3 entries");
      for (double v : r) c_[k++] = v;
    }
  }

  static Kernel3x3 identity() {
    Kernel3x3 k;
    k.at(0, 0) = 1.0;
    return k;
  }

  double& at(int dr, int dc) { return c_[slot(dr, dc)]; }
  double at(int dr, int dc) const { return c_[slot(dr, dc)]; }
  const std::array<double, 9>& coefficients() const noexcept { return c_; }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](double v) { return v == 0.0; });
  }
  double sum() const {
    double s = 0.0;
    for (double v : c_) s += v;
    return s;
  }
  double abs_sum() const {
    double s = 0.0;
    for (double v : c_) s += std::abs(v);
    return s;
  }

  /// Weights as a CNN cross-correlation reads them.
  Kernel3x3 rotated180() const {
    Kernel3x3 r;
    for (int k = 0; k < 9; ++k) r.c_[8 - k] = c_[k];
    return r;
  }

  Kernel3x3& operator+=(const Kernel3x3& o) {
    for (int k = 0; k < 9; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Kernel3x3& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  friend Kernel3x3 operator+(Kernel3x3 a, const Kernel3x3& b) { return a += b; }
  friend Kernel3x3 operator*(double s, Kernel3x3 k) { return k *= s; }
  friend bool operator==(const Kernel3x3&, const Kernel3x3&) = default;

  double max_abs_diff(const Kernel3x3& o) const {
    double d = 0.0;
    for (int k = 0; k < 9; ++k) d = std::max(d, std::abs(c_[k] - o.c_[k]));
    return d;
  }

 private:
  static std::size_t slot(int dr, int dc) {
    if (dr < -1 || dr > 1 || dc < -1 || dc > 1) throw InvalidArgument("kernel offset outside -1..1");
    return static_cast<std::size_t>((dr + 1) * 3 + (dc + 1));
  }

  std::array<double, 9> c_{};
};

enum class Padding {
  kNone,       ///< valid mode, output shrinks by 2 per axis
  kZero,       ///< same-size output, zero ghost ring
  kReplicate,  ///< same-size output, edge-replicated ghost ring
};

/// (H+2) x (W+2) copy of the field with its ghost ring filled per boundary rule.
inline Array2D pad_field(const Field2D& f) {
  const int H = f.rows();
  const int W = f.cols();
  Array2D p(H + 2, W + 2, 0.0);
  for (int i = 0; i < H; ++i) {
    for (int j = 0; j < W; ++j) p(i + 1, j + 1) = f(i, j);
  }
  const bool nb = f.bc.bottom == BoundaryKind::kNeumannZero;
  const bool nt = f.bc.top == BoundaryKind::kNeumannZero;
  const bool nl = f.bc.left == BoundaryKind::kNeumannZero;
  const bool nr = f.bc.right == BoundaryKind::kNeumannZero;
  for (int j = 1; j <= W; ++j) {
    p(0, j) = nb ? p(1, j) : 0.0;
    p(H + 1, j) = nt ? p(H, j) : 0.0;
  }
  for (int i = 0; i <= H + 1; ++i) {
    p(i, 0) = nl ? p(i, 1) : 0.0;
    p(i, W + 1) = nr ? p(i, W) : 0.0;
  }
  // a corner ghost is zero as soon as either adjacent side is Dirichlet
  if (!nb || !nl) p(0, 0) = 0.0;
  if (!nb || !nr) p(0, W + 1) = 0.0;
  if (!nt || !nl) p(H + 1, 0) = 0.0;
  if (!nt || !nr) p(H + 1, W + 1) = 0.0;
  return p;
}

/// Kernel value at output cell (i, j) of a valid convolution over `src`,
/// where (i, j) indexes the output (= src cell (i + 1, j + 1)).
inline double kernel_at_valid(const Array2D& src, const Kernel3x3& k, int i, int j) {
  double acc = 0.0;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const double w = k.at(dr, dc);
      if (w != 0.0) acc += w * src(i + 1 - dr, j + 1 - dc);
    }
  }
  return acc;
}

/// Direct nine-term application of the kernel. kNone returns the
/// (H-2) x (W-2) valid region; the padded modes return an H x W result.
inline Array2D classical_convolve_block(const Array2D& block, const Kernel3x3& kernel, Padding padding = Padding::kNone) {
  if (padding == Padding::kNone) {
    if (block.rows() < 3 || block.cols() < 3) throw InvalidArgument("valid convolution needs at least a 3x3 block");
    Array2D out(block.rows() - 2, block.cols() - 2);
    for (int i = 0; i < out.rows(); ++i) {
      for (int j = 0; j < out.cols(); ++j) out(i, j) = kernel_at_valid(block, kernel, i, j);
    }
    return out;
  }
  Field2D f(block, 1.0, padding == Padding::kZero ? BoundarySpec::dirichlet() : BoundarySpec::neumann());
  return classical_convolve_block(pad_field(f), kernel, Padding::kNone);
}

/// Kernel applied to a field with its own boundary rule, same-size output.
inline Array2D apply_kernel(const Field2D& f, const Kernel3x3& kernel) {
  return classical_convolve_block(pad_field(f), kernel, Padding::kNone);
}

// ---- small field algebra used by the solvers ----

inline double dot(const Array2D& a, const Array2D& b) {
  if (!a.same_shape(b)) throw ShapeMismatch("dot of differently shaped arrays");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a.storage()[k] * b.storage()[k];
  return s;
}

inline double l2_norm(const Array2D& a) { return std::sqrt(dot(a, a)); }

inline double max_abs(const Array2D& a) {
  double m = 0.0;
  for (double v : a.storage()) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs_diff(const Array2D& a, const Array2D& b) {
  if (!a.same_shape(b)) throw ShapeMismatch("comparing differently shaped arrays");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.storage()[k] - b.storage()[k]));
  return m;
}

inline double sum(const Array2D& a) {
  double s = 0.0;
  for (double v : a.storage()) s += v;
  return s;
}

/// a += s * b
inline void axpy(Array2D& a, double s, const Array2D& b) {
  if (!a.same_shape(b)) throw ShapeMismatch("axpy of differently shaped arrays");
  for (std::size_t k = 0; k < a.size(); ++k) a.storage()[k] += s * b.storage()[k];
}

/// ||a - b|| / ||b||, or ||a|| when b vanishes.
inline double relative_l2_error(const Array2D& a, const Array2D& b) {
  if (!a.same_shape(b)) throw ShapeMismatch("comparing differently shaped arrays");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a.storage()[k] - b.storage()[k];
    num += d * d;
    den += b.storage()[k] * b.storage()[k];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace qnp

#endif  // QNP_GRID_HPP
