#pragma once

// Dyadic intervals, rectangles, per-axis index sets and grid shapes.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyadic {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension, depth or axis mismatch between arguments.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of an operation (bad level, bad axis, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative method failed to reach its tolerance.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// The dyadic interval [k 2^-j, (k+1) 2^-j) of the unit circle, j = level, k = offset.
struct DyadicInterval {
  int level = 0;
  std::int64_t offset = 0;

  static DyadicInterval unit() { return {0, 0}; }

  bool valid() const { return level >= 0 && level < 62 && offset >= 0 && offset < (std::int64_t{1} << level); }
  double length() const;
  DyadicInterval left() const { return {level + 1, 2 * offset}; }
  DyadicInterval right() const { return {level + 1, 2 * offset + 1}; }
  DyadicInterval parent() const { return {level - 1, offset >> 1}; }
  DyadicInterval ancestor(int lvl) const { return {lvl, offset >> (level - lvl)}; }
  bool contains(const DyadicInterval& other) const {
    return other.level >= level && (other.offset >> (other.level - level)) == offset;
  }
  /// True when this is the right half of its parent.
  bool is_right() const { return (offset & 1) != 0; }

  // Cell range [first_cell, end_cell) covered at grid depth `depth` (requires level <= depth).
  std::int64_t first_cell(int depth) const { return offset << (depth - level); }
  std::int64_t end_cell(int depth) const { return (offset + 1) << (depth - level); }

  /// Heap numbering 2^level + offset; slot 0 is reserved for the constant function.
  std::int64_t heap_index() const { return (std::int64_t{1} << level) + offset; }
  static DyadicInterval from_heap(std::int64_t slot);

  std::string str() const;

  auto operator<=>(const DyadicInterval&) const = default;
};

/// Per-axis basis label: the constant function (slot 0) or h_I (slot = heap index of I).
class AxisIndex {
 public:
  static AxisIndex mean() { return AxisIndex(0); }
  static AxisIndex interval(const DyadicInterval& I) { return AxisIndex(I.heap_index()); }
  static AxisIndex from_slot(std::int64_t slot) { return AxisIndex(slot); }

  bool is_mean() const { return slot_ == 0; }
  DyadicInterval interval() const { return DyadicInterval::from_heap(slot_); }
  std::int64_t slot() const { return slot_; }

  auto operator<=>(const AxisIndex&) const = default;

 private:
  explicit AxisIndex(std::int64_t slot) : slot_(slot) {}
  std::int64_t slot_ = 0;
};

/// Product of one dyadic interval per parameter.
class DyadicRectangle {
 public:
  DyadicRectangle() = default;
  explicit DyadicRectangle(std::vector<DyadicInterval> sides) : sides_(std::move(sides)) {}
  static DyadicRectangle torus(std::size_t n_params) {
    return DyadicRectangle(std::vector<DyadicInterval>(n_params, DyadicInterval::unit()));
  }

  std::size_t n_params() const { return sides_.size(); }
  const DyadicInterval& operator[](std::size_t axis) const { return sides_[axis]; }
  DyadicInterval& operator[](std::size_t axis) { return sides_[axis]; }
  const std::vector<DyadicInterval>& sides() const { return sides_; }

  double area() const;
  bool contains(const DyadicRectangle& other) const;
  std::string str() const;

  auto operator<=>(const DyadicRectangle&) const = default;

 private:
  std::vector<DyadicInterval> sides_;
};

/// Grid geometry: 2^depth[l] cells (or coefficient slots) along axis l, row-major, axis 0 slowest.
class Shape {
 public:
  Shape() = default;
  explicit Shape(std::vector<int> depths);
  static Shape uniform(std::size_t n_params, int depth) { return Shape(std::vector<int>(n_params, depth)); }

  std::size_t n_params() const { return depths_.size(); }
  int depth(std::size_t axis) const { return depths_.at(axis); }
  const std::vector<int>& depths() const { return depths_; }
  std::size_t extent(std::size_t axis) const { return std::size_t{1} << depths_[axis]; }
  std::size_t stride(std::size_t axis) const { return strides_[axis]; }
  std::size_t size() const { return size_; }
  std::size_t pure_size() const;

  std::size_t flat(std::span<const std::int64_t> idx) const;
  void unflatten(std::size_t flat, std::span<std::int64_t> idx) const;

  /// Shape with the given axes removed.
  Shape without_axes(std::span<const std::size_t> axes) const;
  /// Shape with every depth increased by `delta`.
  Shape deepened(int delta) const;

  bool representable(const DyadicRectangle& R) const;

  bool operator==(const Shape& o) const { return depths_ == o.depths_; }

 private:
  std::vector<int> depths_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

/// Visit every multi-index of `shape` in row-major order: fn(idx, flat).
template <class Fn>
void for_each_index(const Shape& shape, Fn&& fn) {
  const std::size_t n = shape.n_params();
  std::vector<std::int64_t> idx(n, 0);
  for (std::size_t f = 0; f < shape.size(); ++f) {
    fn(std::span<const std::int64_t>(idx), f);
    for (std::size_t a = n; a-- > 0;) {
      if (++idx[a] < static_cast<std::int64_t>(shape.extent(a))) break;
      idx[a] = 0;
    }
  }
}

/// Union of finest cells of a grid; the feasible sets of the product-BMO supremum.
class OpenSet {
 public:
  OpenSet() = default;
  explicit OpenSet(Shape shape) : shape_(std::move(shape)), cells_(shape_.size(), false) {}
  static OpenSet full(const Shape& shape);
  static OpenSet from_rectangle(const Shape& shape, const DyadicRectangle& R);

  const Shape& shape() const { return shape_; }
  bool test(std::size_t cell) const { return cells_[cell]; }
  void set(std::size_t cell, bool v = true) { cells_[cell] = v; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  /// |Omega| = count * 2^-(sum of depths).
  double measure() const;
  bool contains(const DyadicRectangle& R) const;
  std::vector<std::size_t> cells() const;

  /// Smallest dyadic rectangle containing every cell (requires a nonempty set).
  DyadicRectangle enclosing_rectangle() const;

  bool operator==(const OpenSet& o) const { return shape_ == o.shape_ && cells_ == o.cells_; }

 private:
  Shape shape_;
  std::vector<bool> cells_;
};

}  // namespace dyadic
