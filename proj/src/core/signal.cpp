#include "dyadic/signal.hpp"

#include <numeric>

namespace dyadic {

GridSignal::GridSignal(Shape shape, std::vector<double> values) : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != shape_.size())
    throw ShapeError("signal has " + std::to_string(values_.size()) + " values, grid needs " +
                     std::to_string(shape_.size()));
}

double GridSignal::integral() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

double GridSignal::norm2_squared() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s / static_cast<double>(values_.size());
}

HaarExpansion::HaarExpansion(Shape shape, std::vector<double> coeffs) : shape_(std::move(shape)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != shape_.size())
    throw ShapeError("expansion has " + std::to_string(coeffs_.size()) + " coefficients, shape needs " +
                     std::to_string(shape_.size()));
}

namespace {

std::size_t flat_of(const Shape& shape, std::span<const AxisIndex> index) {
  if (index.size() != shape.n_params()) throw ShapeError("index arity does not match parameter count");
  std::size_t f = 0;
  for (std::size_t a = 0; a < index.size(); ++a) {
    const auto s = index[a].slot();
    if (s < 0 || s >= static_cast<std::int64_t>(shape.extent(a)))
      throw DomainError("axis index not representable at depth " + std::to_string(shape.depth(a)));
    f += static_cast<std::size_t>(s) * shape.stride(a);
  }
  return f;
}

}  // namespace

HaarExpansion HaarExpansion::basis(const Shape& shape, std::span<const AxisIndex> index) {
  HaarExpansion e(shape);
  e.coeffs_[flat_of(shape, index)] = 1.0;
  return e;
}

HaarExpansion HaarExpansion::haar(const Shape& shape, const DyadicRectangle& R) {
  std::vector<AxisIndex> idx;
  for (const auto& I : R.sides()) idx.push_back(AxisIndex::interval(I));
  return basis(shape, idx);
}

double HaarExpansion::at(std::span<const AxisIndex> index) const { return coeffs_[flat_of(shape_, index)]; }
double& HaarExpansion::at(std::span<const AxisIndex> index) { return coeffs_[flat_of(shape_, index)]; }

double HaarExpansion::at(const DyadicRectangle& R) const {
  std::vector<AxisIndex> idx;
  for (const auto& I : R.sides()) idx.push_back(AxisIndex::interval(I));
  return at(idx);
}

double HaarExpansion::norm2_squared() const {
  double s = 0.0;
  for (double c : coeffs_) s += c * c;
  return s;
}

HaarExpansion& HaarExpansion::operator+=(const HaarExpansion& o) {
  if (!(o.shape_ == shape_)) throw ShapeError("adding expansions of different shapes");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

HaarExpansion& HaarExpansion::operator-=(const HaarExpansion& o) {
  if (!(o.shape_ == shape_)) throw ShapeError("subtracting expansions of different shapes");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

HaarExpansion& HaarExpansion::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

std::vector<std::size_t> pure_indices(const Shape& shape) {
  std::vector<std::size_t> out;
  out.reserve(shape.pure_size());
  for_each_index(shape, [&](std::span<const std::int64_t> idx, std::size_t f) {
    if (is_pure(idx)) out.push_back(f);
  });
  return out;
}

std::vector<double> HaarExpansion::pure_vector() const {
  std::vector<double> v;
  v.reserve(shape_.pure_size());
  for (auto f : pure_indices(shape_)) v.push_back(coeffs_[f]);
  return v;
}

HaarExpansion HaarExpansion::from_pure_vector(const Shape& shape, std::span<const double> v) {
  if (v.size() != shape.pure_size()) throw ShapeError("pure coefficient vector has wrong length");
  HaarExpansion e(shape);
  std::size_t i = 0;
  for (auto f : pure_indices(shape)) e.coeffs_[f] = v[i++];
  return e;
}

DyadicRectangle rectangle_of(std::span<const std::int64_t> slots) {
  std::vector<DyadicInterval> sides;
  sides.reserve(slots.size());
  for (auto s : slots) sides.push_back(DyadicInterval::from_heap(s));
  return DyadicRectangle(std::move(sides));
}

}  // namespace dyadic
