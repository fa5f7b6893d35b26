#include "dyadic/haar.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace dyadic {

namespace line {

void analyze(std::span<const double> cells, std::span<double> slots) {
  const std::size_t n = cells.size();
  std::vector<double> sums(cells.begin(), cells.end());
  std::vector<double> next;
  // Level-by-level pairwise sums; at the top, sums has one entry.
  for (std::size_t width = n; width > 1; width /= 2) {
    const std::size_t half = width / 2;
    const int level = std::countr_zero(half);
    const double scale = std::sqrt(std::ldexp(1.0, level)) / static_cast<double>(n);
    next.assign(half, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
      next[k] = sums[2 * k] + sums[2 * k + 1];
      slots[half + k] = scale * (sums[2 * k + 1] - sums[2 * k]);
    }
    sums.swap(next);
  }
  slots[0] = sums[0] / static_cast<double>(n);
}

void synthesize(std::span<const double> slots, std::span<double> cells) {
  const std::size_t n = cells.size();
  std::vector<double> vals{slots[0]};
  std::vector<double> next;
  for (std::size_t count = 1; count < n; count *= 2) {
    const int level = std::countr_zero(count);
    const double amp = std::sqrt(std::ldexp(1.0, level));
    next.assign(2 * count, 0.0);
    for (std::size_t k = 0; k < count; ++k) {
      const double c = amp * slots[count + k];
      next[2 * k] = vals[k] - c;
      next[2 * k + 1] = vals[k] + c;
    }
    vals.swap(next);
  }
  std::copy(vals.begin(), vals.end(), cells.begin());
}

void average(std::span<const double> cells, std::span<double> slots) {
  const std::size_t n = cells.size();
  std::vector<double> sums(cells.begin(), cells.end());
  std::vector<double> next;
  std::size_t cell_count = 1;
  for (std::size_t width = n; width > 1; width /= 2) {
    const std::size_t half = width / 2;
    cell_count *= 2;
    next.assign(half, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
      next[k] = sums[2 * k] + sums[2 * k + 1];
      slots[half + k] = next[k] / static_cast<double>(cell_count);
    }
    sums.swap(next);
  }
  slots[0] = sums[0] / static_cast<double>(n);
}

void spread(std::span<const double> slots, std::span<double> cells) {
  const std::size_t n = cells.size();
  // Push accumulated density down the tree: value on a child = value on parent + d_child/|child|.
  std::vector<double> vals{0.0};
  std::vector<double> next;
  for (std::size_t count = 1; count < n; count *= 2) {
    const double inv_len = static_cast<double>(count);
    next.assign(2 * count, 0.0);
    for (std::size_t k = 0; k < count; ++k) {
      const double here = vals[k] + slots[count + k] * inv_len;
      next[2 * k] = here;
      next[2 * k + 1] = here;
    }
    vals.swap(next);
  }
  std::copy(vals.begin(), vals.end(), cells.begin());
}

void pyramid(std::span<const double> cells, std::span<double> slots) {
  const std::size_t n = cells.size();
  for (std::size_t k = 0; k < n; ++k) slots[n + k] = cells[k];
  for (std::size_t width = n; width > 1; width /= 2) {
    const std::size_t half = width / 2;
    for (std::size_t k = 0; k < half; ++k) slots[half + k] = 0.5 * (slots[width + 2 * k] + slots[width + 2 * k + 1]);
  }
  slots[0] = slots[1];
}

}  // namespace line

std::vector<double> transform_axis(const Shape& shape, std::span<const double> data, std::size_t axis,
                                   std::size_t out_extent,
                                   const std::function<void(std::span<const double>, std::span<double>)>& kernel) {
  if (axis >= shape.n_params()) throw DomainError("bad axis " + std::to_string(axis));
  const std::size_t n_in = shape.extent(axis);
  const std::size_t inner = shape.stride(axis);
  const std::size_t outer = shape.size() / (n_in * inner);
  std::vector<double> out(outer * out_extent * inner);
  std::vector<double> in_line(n_in), out_line(out_extent);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      const std::size_t base_in = o * n_in * inner + i;
      for (std::size_t k = 0; k < n_in; ++k) in_line[k] = data[base_in + k * inner];
      kernel(in_line, out_line);
      const std::size_t base_out = o * out_extent * inner + i;
      for (std::size_t k = 0; k < out_extent; ++k) out[base_out + k * inner] = out_line[k];
    }
  }
  return out;
}

HaarExpansion haar_forward(const GridSignal& sig) {
  const Shape& shape = sig.shape();
  for (int d : shape.depths())
    if (d < 1) throw ShapeError("Haar analysis needs depth >= 1 on every axis");
  std::vector<double> data(sig.values().begin(), sig.values().end());
  for (std::size_t a = 0; a < shape.n_params(); ++a) data = transform_axis(shape, data, a, shape.extent(a), line::analyze);
  return HaarExpansion(shape, std::move(data));
}

GridSignal haar_inverse(const HaarExpansion& exp) {
  const Shape& shape = exp.shape();
  std::vector<double> data(exp.coeffs().begin(), exp.coeffs().end());
  for (std::size_t a = 0; a < shape.n_params(); ++a)
    data = transform_axis(shape, data, a, shape.extent(a), line::synthesize);
  return GridSignal(shape, std::move(data));
}

double rect_mean(const GridSignal& sig, const DyadicRectangle& R) {
  const Shape& shape = sig.shape();
  if (R.n_params() != shape.n_params()) throw ShapeError("rectangle arity does not match signal");
  if (!shape.representable(R)) throw DomainError("rectangle finer than grid: " + R.str());
  const std::size_t n = shape.n_params();
  std::vector<std::int64_t> lo(n), hi(n), idx(n);
  for (std::size_t a = 0; a < n; ++a) {
    lo[a] = R[a].first_cell(shape.depth(a));
    hi[a] = R[a].end_cell(shape.depth(a));
  }
  idx = lo;
  double sum = 0.0;
  std::size_t count = 0;
  while (true) {
    sum += sig[shape.flat(idx)];
    ++count;
    std::size_t a = n;
    while (a-- > 0) {
      if (++idx[a] < hi[a]) break;
      idx[a] = lo[a];
    }
    if (a == static_cast<std::size_t>(-1)) break;
  }
  return sum / static_cast<double>(count);
}

GridSignal partial_mean(const GridSignal& sig, const PartialRectangle& Q) {
  const Shape& shape = sig.shape();
  const std::size_t n = shape.n_params();
  if (Q.axes.empty() || Q.axes.size() >= n) throw DomainError("partial mean needs a nonempty proper axis subset");
  if (Q.axes.size() != Q.sides.size()) throw ShapeError("partial rectangle has mismatched axes and sides");
  std::vector<const DyadicInterval*> side_of(n, nullptr);
  for (std::size_t i = 0; i < Q.axes.size(); ++i) {
    const auto a = Q.axes[i];
    if (a >= n || side_of[a]) throw DomainError("bad or repeated axis in partial rectangle");
    if (!Q.sides[i].valid() || Q.sides[i].level > shape.depth(a)) throw DomainError("partial rectangle finer than grid");
    side_of[a] = &Q.sides[i];
  }
  const Shape out_shape = shape.without_axes(Q.axes);
  std::vector<double> sums(out_shape.size(), 0.0);
  std::vector<std::int64_t> out_idx(out_shape.n_params());
  std::size_t per_cell = 1;
  for (std::size_t i = 0; i < Q.axes.size(); ++i)
    per_cell *= static_cast<std::size_t>(Q.sides[i].end_cell(shape.depth(Q.axes[i])) - Q.sides[i].first_cell(shape.depth(Q.axes[i])));
  for_each_index(shape, [&](std::span<const std::int64_t> idx, std::size_t f) {
    std::size_t j = 0;
    for (std::size_t a = 0; a < n; ++a) {
      if (side_of[a]) {
        const auto& I = *side_of[a];
        if (idx[a] < I.first_cell(shape.depth(a)) || idx[a] >= I.end_cell(shape.depth(a))) return;
      } else {
        out_idx[j++] = idx[a];
      }
    }
    sums[out_shape.flat(out_idx)] += sig[f];
  });
  for (double& s : sums) s /= static_cast<double>(per_cell);
  return GridSignal(out_shape, std::move(sums));
}

HaarExpansion filter_coefficients(const HaarExpansion& exp,
                                  const std::function<bool(std::span<const std::int64_t>)>& keep) {
  HaarExpansion out(exp.shape());
  for_each_index(exp.shape(), [&](std::span<const std::int64_t> idx, std::size_t f) {
    if (keep(idx)) out[f] = exp[f];
  });
  return out;
}

namespace {

void check_generation(const Shape& shape, std::span<const int> j) {
  if (j.size() != shape.n_params()) throw ShapeError("generation tuple arity does not match parameter count");
  for (std::size_t a = 0; a < j.size(); ++a)
    if (j[a] < 0 || j[a] > shape.depth(a)) throw DomainError("generation out of range on axis " + std::to_string(a));
}

void check_axis_level(const Shape& shape, std::size_t axis, int k) {
  if (axis >= shape.n_params()) throw DomainError("bad axis " + std::to_string(axis));
  if (k < 0 || k > shape.depth(axis)) throw DomainError("level out of range: " + std::to_string(k));
}

}  // namespace

HaarExpansion delta_block(const HaarExpansion& exp, std::span<const int> j) {
  check_generation(exp.shape(), j);
  return filter_coefficients(exp, [&](std::span<const std::int64_t> s) {
    for (std::size_t a = 0; a < s.size(); ++a)
      if (slot_level(s[a]) != j[a]) return false;
    return true;
  });
}

HaarExpansion expectation(const HaarExpansion& exp, std::span<const int> j) {
  check_generation(exp.shape(), j);
  return filter_coefficients(exp, [&](std::span<const std::int64_t> s) {
    for (std::size_t a = 0; a < s.size(); ++a)
      if (slot_level(s[a]) >= j[a]) return false;
    return true;
  });
}

HaarExpansion q_tail(const HaarExpansion& exp, std::span<const int> j) {
  check_generation(exp.shape(), j);
  return filter_coefficients(exp, [&](std::span<const std::int64_t> s) {
    for (std::size_t a = 0; a < s.size(); ++a)
      if (s[a] == 0 || slot_level(s[a]) < j[a]) return false;
    return true;
  });
}

HaarExpansion axis_expectation(const HaarExpansion& exp, std::size_t axis, int k) {
  check_axis_level(exp.shape(), axis, k);
  return filter_coefficients(exp, [&](std::span<const std::int64_t> s) { return slot_level(s[axis]) < k; });
}

HaarExpansion axis_q_tail(const HaarExpansion& exp, std::size_t axis, int k) {
  check_axis_level(exp.shape(), axis, k);
  return filter_coefficients(exp, [&](std::span<const std::int64_t> s) { return s[axis] != 0 && slot_level(s[axis]) >= k; });
}

HaarExpansion project_open_set(const HaarExpansion& exp, const OpenSet& omega) {
  const Shape& shape = exp.shape();
  if (!(omega.shape() == shape)) throw ShapeError("open set lives on a different grid");
  // contained[R] = min over cells of R, computed as a pyramid of 0/1 means (== 1 iff all set).
  std::vector<double> ind(shape.size());
  for (std::size_t f = 0; f < shape.size(); ++f) ind[f] = omega.test(f) ? 1.0 : 0.0;
  const std::vector<double> pyr = mean_pyramid(GridSignal(shape, std::move(ind)));
  const Shape pshape = shape.deepened(1);
  std::vector<std::int64_t> p(shape.n_params());
  return filter_coefficients(exp, [&](std::span<const std::int64_t> s) {
    if (!is_pure(s)) return false;
    for (std::size_t a = 0; a < s.size(); ++a) p[a] = s[a];
    return pyr[pshape.flat(p)] > 1.0 - 1e-12;
  });
}

std::vector<double> mean_pyramid(const GridSignal& sig) {
  const Shape& shape = sig.shape();
  std::vector<double> data(sig.values().begin(), sig.values().end());
  // Each axis widens from 2^J cells to 2^(J+1) slots; track the evolving shape.
  std::vector<int> depths = shape.depths();
  for (std::size_t a = 0; a < shape.n_params(); ++a) {
    const Shape cur(depths);
    data = transform_axis(cur, data, a, 2 * cur.extent(a), line::pyramid);
    depths[a] += 1;
  }
  return data;
}

GridSignal square_function(const HaarExpansion& exp) {
  const Shape& shape = exp.shape();
  std::vector<double> w(shape.size(), 0.0);
  for_each_index(shape, [&](std::span<const std::int64_t> s, std::size_t f) {
    if (is_pure(s)) w[f] = exp[f] * exp[f];
  });
  for (std::size_t a = 0; a < shape.n_params(); ++a) w = transform_axis(shape, w, a, shape.extent(a), line::spread);
  for (double& v : w) v = std::sqrt(std::max(v, 0.0));
  return GridSignal(shape, std::move(w));
}

GridSignal pointwise_product(const GridSignal& a, const GridSignal& b) {
  if (!(a.shape() == b.shape())) throw ShapeError("pointwise product of signals on different grids");
  GridSignal out(a.shape());
  for (std::size_t f = 0; f < a.shape().size(); ++f) out[f] = a[f] * b[f];
  return out;
}

}  // namespace dyadic
