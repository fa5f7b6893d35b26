#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dyadic/geometry.hpp"

namespace dyadic {

/// Piecewise-constant function on the cell grid of T^N; one value per finest cell.
class GridSignal {
 public:
  GridSignal() = default;
  explicit GridSignal(Shape shape) : shape_(std::move(shape)), values_(shape_.size(), 0.0) {}
  GridSignal(Shape shape, std::vector<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t n_params() const { return shape_.n_params(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::vector<double>& raw() { return values_; }

  double operator[](std::size_t flat) const { return values_[flat]; }
  double& operator[](std::size_t flat) { return values_[flat]; }
  double at(std::span<const std::int64_t> cell) const { return values_[shape_.flat(cell)]; }

  /// Integral over T^N, i.e. the arithmetic mean of the cell values.
  double integral() const;
  /// L2(T^N) norm squared.
  double norm2_squared() const;

 private:
  Shape shape_;
  std::vector<double> values_;
};

/// Coefficients on the tensor basis {1} u {h_I : level(I) < depth} per axis, indexed by slot
/// (0 = Mean, otherwise the heap index of I).
class HaarExpansion {
 public:
  HaarExpansion() = default;
  explicit HaarExpansion(Shape shape) : shape_(std::move(shape)), coeffs_(shape_.size(), 0.0) {}
  HaarExpansion(Shape shape, std::vector<double> coeffs);

  /// Unit coefficient at the given per-axis index.
  static HaarExpansion basis(const Shape& shape, std::span<const AxisIndex> index);
  /// h_R for a pure rectangle R.
  static HaarExpansion haar(const Shape& shape, const DyadicRectangle& R);

  const Shape& shape() const { return shape_; }
  std::size_t n_params() const { return shape_.n_params(); }
  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }
  std::vector<double>& raw() { return coeffs_; }

  double operator[](std::size_t flat) const { return coeffs_[flat]; }
  double& operator[](std::size_t flat) { return coeffs_[flat]; }
  double at(std::span<const AxisIndex> index) const;
  double& at(std::span<const AxisIndex> index);
  /// Coefficient f_R of a pure rectangle.
  double at(const DyadicRectangle& R) const;

  double norm2_squared() const;

  HaarExpansion& operator+=(const HaarExpansion& o);
  HaarExpansion& operator-=(const HaarExpansion& o);
  HaarExpansion& operator*=(double s);
  friend HaarExpansion operator+(HaarExpansion a, const HaarExpansion& b) { return a += b; }
  friend HaarExpansion operator-(HaarExpansion a, const HaarExpansion& b) { return a -= b; }
  friend HaarExpansion operator*(double s, HaarExpansion a) { return a *= s; }

  /// Pure-rectangle coefficients (every axis an Interval) in row-major order; the coordinates
  /// of L^2_0 used by the operator-norm code.
  std::vector<double> pure_vector() const;
  static HaarExpansion from_pure_vector(const Shape& shape, std::span<const double> v);

 private:
  Shape shape_;
  std::vector<double> coeffs_;
};

/// True when every slot of a coefficient multi-index is an Interval.
inline bool is_pure(std::span<const std::int64_t> slots) {
  for (auto s : slots)
    if (s == 0) return false;
  return true;
}

/// Flat indices of the pure-rectangle coefficients of `shape`, row-major.
std::vector<std::size_t> pure_indices(const Shape& shape);

/// Rectangle labelled by a pure coefficient multi-index.
DyadicRectangle rectangle_of(std::span<const std::int64_t> slots);

}  // namespace dyadic
