#include "dyadic/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dyadic {

double DyadicInterval::length() const { return std::ldexp(1.0, -level); }

DyadicInterval DyadicInterval::from_heap(std::int64_t slot) {
  if (slot <= 0) throw DomainError("heap slot " + std::to_string(slot) + " does not label an interval");
  int l = 0;
  while ((std::int64_t{2} << l) <= slot) ++l;
  return {l, slot - (std::int64_t{1} << l)};
}

std::string DyadicInterval::str() const {
  std::ostringstream os;
  os << "[" << offset << "/2^" << level << "," << (offset + 1) << "/2^" << level << ")";
  return os.str();
}

double DyadicRectangle::area() const {
  int total = 0;
  for (const auto& I : sides_) total += I.level;
  return std::ldexp(1.0, -total);
}

bool DyadicRectangle::contains(const DyadicRectangle& other) const {
  if (other.n_params() != n_params()) throw ShapeError("rectangle containment across different parameter counts");
  for (std::size_t a = 0; a < sides_.size(); ++a)
    if (!sides_[a].contains(other.sides_[a])) return false;
  return true;
}

std::string DyadicRectangle::str() const {
  std::string s;
  for (std::size_t a = 0; a < sides_.size(); ++a) {
    if (a) s += "x";
    s += sides_[a].str();
  }
  return s;
}

Shape::Shape(std::vector<int> depths) : depths_(std::move(depths)) {
  if (depths_.empty()) throw ShapeError("a grid needs at least one parameter");
  strides_.assign(depths_.size(), 1);
  size_ = 1;
  for (std::size_t a = depths_.size(); a-- > 0;) {
    if (depths_[a] < 0 || depths_[a] > 30) throw ShapeError("depth out of range: " + std::to_string(depths_[a]));
    strides_[a] = size_;
    size_ *= std::size_t{1} << depths_[a];
  }
  if (size_ > (std::size_t{1} << 28)) throw ShapeError("grid too large");
}

std::size_t Shape::pure_size() const {
  std::size_t n = 1;
  for (std::size_t a = 0; a < depths_.size(); ++a) n *= extent(a) - 1;
  return n;
}

std::size_t Shape::flat(std::span<const std::int64_t> idx) const {
  std::size_t f = 0;
  for (std::size_t a = 0; a < depths_.size(); ++a) f += static_cast<std::size_t>(idx[a]) * strides_[a];
  return f;
}

void Shape::unflatten(std::size_t flat, std::span<std::int64_t> idx) const {
  for (std::size_t a = 0; a < depths_.size(); ++a) {
    idx[a] = static_cast<std::int64_t>(flat / strides_[a]);
    flat %= strides_[a];
  }
}

Shape Shape::without_axes(std::span<const std::size_t> axes) const {
  std::vector<int> d;
  for (std::size_t a = 0; a < depths_.size(); ++a)
    if (std::find(axes.begin(), axes.end(), a) == axes.end()) d.push_back(depths_[a]);
  return Shape(std::move(d));
}

Shape Shape::deepened(int delta) const {
  std::vector<int> d = depths_;
  for (auto& x : d) x += delta;
  return Shape(std::move(d));
}

bool Shape::representable(const DyadicRectangle& R) const {
  if (R.n_params() != n_params()) return false;
  for (std::size_t a = 0; a < n_params(); ++a)
    if (!R[a].valid() || R[a].level > depths_[a]) return false;
  return true;
}

OpenSet OpenSet::full(const Shape& shape) {
  OpenSet o(shape);
  o.cells_.assign(shape.size(), true);
  return o;
}

OpenSet OpenSet::from_rectangle(const Shape& shape, const DyadicRectangle& R) {
  if (!shape.representable(R)) throw DomainError("rectangle finer than grid: " + R.str());
  OpenSet o(shape);
  for_each_index(shape, [&](std::span<const std::int64_t> idx, std::size_t f) {
    for (std::size_t a = 0; a < shape.n_params(); ++a) {
      const int d = shape.depth(a);
      if (idx[a] < R[a].first_cell(d) || idx[a] >= R[a].end_cell(d)) return;
    }
    o.cells_[f] = true;
  });
  return o;
}

std::size_t OpenSet::count() const { return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), true)); }

double OpenSet::measure() const {
  int total = 0;
  for (int d : shape_.depths()) total += d;
  return std::ldexp(static_cast<double>(count()), -total);
}

bool OpenSet::contains(const DyadicRectangle& R) const {
  if (!shape_.representable(R)) return false;
  const std::size_t n = shape_.n_params();
  std::vector<std::int64_t> lo(n), hi(n), idx(n);
  for (std::size_t a = 0; a < n; ++a) {
    lo[a] = R[a].first_cell(shape_.depth(a));
    hi[a] = R[a].end_cell(shape_.depth(a));
  }
  idx = lo;
  while (true) {
    if (!cells_[shape_.flat(idx)]) return false;
    std::size_t a = n;
    while (a-- > 0) {
      if (++idx[a] < hi[a]) break;
      idx[a] = lo[a];
    }
    if (a == static_cast<std::size_t>(-1)) return true;
  }
}

std::vector<std::size_t> OpenSet::cells() const {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < cells_.size(); ++f)
    if (cells_[f]) out.push_back(f);
  return out;
}

DyadicRectangle OpenSet::enclosing_rectangle() const {
  const std::size_t n = shape_.n_params();
  std::vector<std::int64_t> lo(n, std::numeric_limits<std::int64_t>::max()), hi(n, -1);
  std::vector<std::int64_t> idx(n);
  bool any = false;
  for (std::size_t f = 0; f < cells_.size(); ++f) {
    if (!cells_[f]) continue;
    any = true;
    shape_.unflatten(f, idx);
    for (std::size_t a = 0; a < n; ++a) {
      lo[a] = std::min(lo[a], idx[a]);
      hi[a] = std::max(hi[a], idx[a]);
    }
  }
  if (!any) throw DomainError("empty open set has no enclosing rectangle");
  std::vector<DyadicInterval> sides(n);
  for (std::size_t a = 0; a < n; ++a) {
    int level = shape_.depth(a);
    std::int64_t l = lo[a], h = hi[a];
    while (l != h) {
      l >>= 1;
      h >>= 1;
      --level;
    }
    sides[a] = {level, l};
  }
  return DyadicRectangle(std::move(sides));
}

}  // namespace dyadic
