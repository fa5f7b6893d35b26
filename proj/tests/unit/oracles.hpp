#pragma once

// Brute-force reference implementations used as test oracles. Everything here works cell by
// cell from the definitions and shares no code with the library transforms.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dyadic/geometry.hpp"
#include "dyadic/signal.hpp"

namespace oracle {

using dyadic::DyadicInterval;
using dyadic::Shape;

/// h_I(cell) on a line of 2^depth cells; slot 0 gives the constant 1.
inline double haar_1d(std::int64_t slot, std::int64_t cell, int depth) {
  if (slot == 0) return 1.0;
  const auto I = DyadicInterval::from_heap(slot);
  const std::int64_t lo = I.first_cell(depth), hi = I.end_cell(depth);
  if (cell < lo || cell >= hi) return 0.0;
  const double amp = 1.0 / std::sqrt(I.length());
  return cell >= (lo + hi) / 2 ? amp : -amp;
}

/// Tensor basis function at coefficient slot multi-index `slots`, evaluated at `cell`.
inline double basis_value(const Shape& shape, const std::vector<std::int64_t>& slots, const std::vector<std::int64_t>& cell) {
  double v = 1.0;
  for (std::size_t a = 0; a < slots.size(); ++a) v *= haar_1d(slots[a], cell[a], shape.depth(a));
  return v;
}

inline std::vector<std::int64_t> unflat(const Shape& shape, std::size_t f) {
  std::vector<std::int64_t> idx(shape.n_params());
  shape.unflatten(f, idx);
  return idx;
}

/// <sig, basis_slots> by quadrature.
inline double inner_with_basis(const dyadic::GridSignal& sig, const std::vector<std::int64_t>& slots) {
  const Shape& shape = sig.shape();
  double s = 0.0;
  for (std::size_t f = 0; f < shape.size(); ++f) s += sig[f] * basis_value(shape, slots, unflat(shape, f));
  return s / static_cast<double>(shape.size());
}

/// Direct synthesis: sum of coefficient times basis function, cell by cell.
inline dyadic::GridSignal synthesize(const dyadic::HaarExpansion& e) {
  const Shape& shape = e.shape();
  dyadic::GridSignal out(shape);
  for (std::size_t c = 0; c < shape.size(); ++c) {
    const auto cell = unflat(shape, c);
    double v = 0.0;
    for (std::size_t f = 0; f < shape.size(); ++f)
      if (e[f] != 0.0) v += e[f] * basis_value(shape, unflat(shape, f), cell);
    out[c] = v;
  }
  return out;
}

/// Cells of rectangle R at the given depths, as flat indices.
inline std::vector<std::size_t> cells_of(const Shape& shape, const dyadic::DyadicRectangle& R) {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < shape.size(); ++f) {
    const auto idx = unflat(shape, f);
    bool in = true;
    for (std::size_t a = 0; a < idx.size() && in; ++a)
      in = idx[a] >= R[a].first_cell(shape.depth(a)) && idx[a] < R[a].end_cell(shape.depth(a));
    if (in) out.push_back(f);
  }
  return out;
}

inline double mean_over(const dyadic::GridSignal& sig, const dyadic::DyadicRectangle& R) {
  const auto cells = cells_of(sig.shape(), R);
  double s = 0.0;
  for (auto f : cells) s += sig[f];
  return s / static_cast<double>(cells.size());
}

/// Every dyadic rectangle with levels 0..depth per axis.
inline std::vector<dyadic::DyadicRectangle> all_rectangles(const Shape& shape, bool pure_levels_only = false) {
  std::vector<dyadic::DyadicRectangle> out{dyadic::DyadicRectangle(std::vector<DyadicInterval>{})};
  for (std::size_t a = 0; a < shape.n_params(); ++a) {
    std::vector<dyadic::DyadicRectangle> next;
    const int top = pure_levels_only ? shape.depth(a) - 1 : shape.depth(a);
    for (const auto& r : out)
      for (int l = 0; l <= top; ++l)
        for (std::int64_t k = 0; k < (std::int64_t{1} << l); ++k) {
          auto sides = r.sides();
          sides.push_back({l, k});
          next.emplace_back(std::move(sides));
        }
    out = std::move(next);
  }
  return out;
}

/// L1 mean oscillation of sig over R.
inline double oscillation(const dyadic::GridSignal& sig, const dyadic::DyadicRectangle& R) {
  const auto cells = cells_of(sig.shape(), R);
  const double m = mean_over(sig, R);
  double s = 0.0;
  for (auto f : cells) s += std::abs(sig[f] - m);
  return s / static_cast<double>(cells.size());
}

}  // namespace oracle

namespace oracle {

/// (1/|Omega|) sum over pure R inside Omega of f_R^2, with Omega a list of flat cell indices.
inline double ratio(const dyadic::HaarExpansion& e, const std::vector<bool>& omega) {
  const Shape& shape = e.shape();
  std::size_t count = 0;
  for (bool b : omega) count += b;
  if (count == 0) return 0.0;
  double s = 0.0;
  for (std::size_t f = 0; f < shape.size(); ++f) {
    const auto sl = unflat(shape, f);
    bool pure = true;
    for (auto v : sl) pure = pure && v != 0;
    if (!pure || e[f] == 0.0) continue;
    std::vector<DyadicInterval> sides;
    for (auto v : sl) sides.push_back(DyadicInterval::from_heap(v));
    bool inside = true;
    for (auto c : cells_of(shape, dyadic::DyadicRectangle(sides))) inside = inside && omega[c];
    if (inside) s += e[f] * e[f];
  }
  return s / (static_cast<double>(count) / static_cast<double>(shape.size()));
}

/// sup over nonempty subsets of `allowed` cells of ratio().
inline double best_subset_ratio(const dyadic::HaarExpansion& e, const std::vector<std::size_t>& allowed) {
  const Shape& shape = e.shape();
  // Each nonzero pure coefficient as (weight, bitmask over positions in `allowed`).
  std::vector<std::pair<double, std::uint64_t>> terms;
  for (std::size_t f = 0; f < shape.size(); ++f) {
    const auto sl = unflat(shape, f);
    bool pure = true;
    for (auto v : sl) pure = pure && v != 0;
    if (!pure || e[f] == 0.0) continue;
    std::vector<DyadicInterval> sides;
    for (auto v : sl) sides.push_back(DyadicInterval::from_heap(v));
    std::uint64_t mask = 0;
    bool reachable = true;
    for (auto c : cells_of(shape, dyadic::DyadicRectangle(sides))) {
      const auto it = std::find(allowed.begin(), allowed.end(), c);
      if (it == allowed.end()) reachable = false;
      else mask |= std::uint64_t{1} << (it - allowed.begin());
    }
    if (reachable) terms.emplace_back(e[f] * e[f], mask);
  }
  double best = 0.0;
  const std::size_t n = allowed.size();
  for (std::uint64_t m = 1; m < (std::uint64_t{1} << n); ++m) {
    double s = 0.0;
    for (const auto& [w, mask] : terms)
      if ((mask & ~m) == 0) s += w;
    const double measure = static_cast<double>(std::popcount(m)) / static_cast<double>(shape.size());
    best = std::max(best, s / measure);
  }
  return best;
}

inline double product_bmo(const dyadic::HaarExpansion& e) {
  std::vector<std::size_t> all(e.shape().size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return best_subset_ratio(e, all);
}

}  // namespace oracle
