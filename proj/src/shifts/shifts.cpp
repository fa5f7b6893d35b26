#include "dyadic/shifts.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dyadic/haar.hpp"
#include "dyadic/random.hpp"

namespace dyadic {

namespace {

void check_axis(const Shape& shape, std::size_t axis) {
  if (axis >= shape.n_params()) throw DomainError("bad axis " + std::to_string(axis));
}

void check_distinct(const Shape& shape, std::span<const std::size_t> axes) {
  std::vector<int> seen(shape.n_params(), 0);
  for (auto a : axes) {
    check_axis(shape, a);
    if (seen[a]++) throw DomainError("repeated axis " + std::to_string(a) + " in commutator");
  }
}

HaarExpansion multiply(const GridSignal& phi, const HaarExpansion& b) {
  return haar_forward(pointwise_product(phi, haar_inverse(b)));
}

/// Coefficients of chi_I/|I| on one axis: slot 0 -> 1, strict ancestors L -> h_L on I.
std::vector<double> average_vector(std::int64_t slot, int depth) {
  std::vector<double> v(std::size_t{1} << depth, 0.0);
  v[0] = 1.0;
  const auto I = DyadicInterval::from_heap(slot);
  for (int l = 0; l < I.level; ++l) {
    const auto L = I.ancestor(l);
    const bool right = I.ancestor(l + 1).is_right();
    v[static_cast<std::size_t>(L.heap_index())] = (right ? 1.0 : -1.0) / std::sqrt(L.length());
  }
  return v;
}

std::vector<double> unit_vector(std::int64_t slot, int depth) {
  std::vector<double> v(std::size_t{1} << depth, 0.0);
  v[static_cast<std::size_t>(slot)] = 1.0;
  return v;
}

/// One-dimensional S on a coefficient vector.
std::vector<double> shift_1d(std::span<const double> v, int depth) {
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t s = 1; s < v.size(); ++s) {
    const auto I = DyadicInterval::from_heap(static_cast<std::int64_t>(s));
    if (I.level + 1 >= depth) continue;
    out[static_cast<std::size_t>(I.right().heap_index())] += v[s];
    out[static_cast<std::size_t>(I.left().heap_index())] -= v[s];
  }
  return out;
}

/// One-dimensional S^T: h_{I+} -> h_I, h_{I-} -> -h_I.
std::vector<double> shift_adjoint_1d(std::span<const double> v, int depth) {
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t s = 1; s < v.size(); ++s) {
    const auto I = DyadicInterval::from_heap(static_cast<std::int64_t>(s));
    if (I.level + 1 >= depth) continue;
    out[s] = v[static_cast<std::size_t>(I.right().heap_index())] - v[static_cast<std::size_t>(I.left().heap_index())];
  }
  return out;
}

std::vector<std::size_t> shifted_axes(const PartitionSpec& spec, std::size_t n) {
  spec.validate(n);
  std::vector<std::size_t> axes(spec.j1.begin(), spec.j1.end());
  axes.insert(axes.end(), spec.j3.begin(), spec.j3.end());
  std::sort(axes.begin(), axes.end());
  return axes;
}

int max_level_on(const HaarExpansion& f, std::size_t axis) {
  int m = -1;
  for_each_index(f.shape(), [&](std::span<const std::int64_t> s, std::size_t i) {
    if (f[i] != 0.0) m = std::max(m, slot_level(s[axis]));
  });
  return m;
}

double sup_norm(const HaarExpansion& e) {
  const auto sig = haar_inverse(e);
  double m = 0.0;
  for (double v : sig.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

CommutatorResult shift_apply(const HaarExpansion& exp, std::size_t axis) {
  const Shape& shape = exp.shape();
  check_axis(shape, axis);
  const int J = shape.depth(axis);
  CommutatorResult r{HaarExpansion(shape), false};
  std::vector<std::int64_t> t(shape.n_params());
  for_each_index(shape, [&](std::span<const std::int64_t> s, std::size_t f) {
    const double c = exp[f];
    if (c == 0.0 || s[axis] == 0) return;
    const auto I = DyadicInterval::from_heap(s[axis]);
    if (I.level + 1 >= J) {
      r.truncated = true;
      return;
    }
    std::copy(s.begin(), s.end(), t.begin());
    t[axis] = I.right().heap_index();
    r.output[shape.flat(t)] += c;
    t[axis] = I.left().heap_index();
    r.output[shape.flat(t)] -= c;
  });
  return r;
}

CommutatorResult nested_commutator(const LinearMap& A, const HaarExpansion& b, std::span<const std::size_t> axes) {
  check_distinct(b.shape(), axes);
  if (axes.empty()) return {A(b), false};
  const std::size_t a = axes.front();
  const auto rest = axes.subspan(1);
  auto inner = nested_commutator(A, b, rest);
  const auto left = shift_apply(inner.output, a);
  const auto sb = shift_apply(b, a);
  const auto right = nested_commutator(A, sb.output, rest);
  return {left.output - right.output, inner.truncated || left.truncated || sb.truncated || right.truncated};
}

CommutatorResult iterated_commutator(const HaarExpansion& phi, const HaarExpansion& b,
                                     std::span<const std::size_t> axes) {
  if (!(phi.shape() == b.shape())) throw ShapeError("symbol and argument live on different grids");
  const auto ps = haar_inverse(phi);
  return nested_commutator([&](const HaarExpansion& x) { return multiply(ps, x); }, b, axes);
}

CommutatorResult partition_commutator(const HaarExpansion& phi, const HaarExpansion& b, const PartitionSpec& spec) {
  const auto axes = shifted_axes(spec, phi.n_params());
  const auto ch = spec.channels(phi.n_params());
  // Built from the inside out: [S^(aK), Pi], then [C, S^(a)] for the remaining axes downward.
  std::function<CommutatorResult(const HaarExpansion&, std::size_t)> level = [&](const HaarExpansion& x,
                                                                                   std::size_t depth) {
    if (depth == axes.size()) return CommutatorResult{bilinear_channels(ch, phi, x), false};
    const std::size_t a = axes[axes.size() - 1 - depth];
    const bool innermost = depth + 1 == axes.size();
    const auto cx = level(x, depth + 1);
    const auto s_cx = shift_apply(cx.output, a);
    const auto sx = shift_apply(x, a);
    const auto c_sx = level(sx.output, depth + 1);
    const bool tr = cx.truncated || s_cx.truncated || sx.truncated || c_sx.truncated;
    return innermost ? CommutatorResult{s_cx.output - c_sx.output, tr}
                     : CommutatorResult{c_sx.output - s_cx.output, tr};
  };
  return level(b, 0);
}

HaarExpansion grandchild_transform(const HaarExpansion& f, std::span<const std::size_t> axes) {
  const Shape& shape = f.shape();
  check_distinct(shape, axes);
  std::vector<std::pair<std::size_t, double>> terms, next;
  HaarExpansion out(shape);
  std::vector<std::int64_t> t(shape.n_params());
  for_each_index(shape, [&](std::span<const std::int64_t> s, std::size_t idx) {
    if (f[idx] == 0.0 || !is_pure(s)) return;
    std::copy(s.begin(), s.end(), t.begin());
    terms.assign(1, {shape.flat(t), f[idx]});
    for (auto a : axes) {
      const auto Q = DyadicInterval::from_heap(s[a]);
      if (Q.level + 2 >= shape.depth(a))
        throw DomainError("grandchildren of " + Q.str() + " are finer than the grid");
      const std::pair<DyadicInterval, double> kids[] = {
          {Q.left().right(), 1.0}, {Q.left().left(), -1.0}, {Q.right().right(), -1.0}, {Q.right().left(), 1.0}};
      next.clear();
      for (const auto& [flat, c] : terms) {
        std::vector<std::int64_t> u(shape.n_params());
        shape.unflatten(flat, u);
        for (const auto& [K, sg] : kids) {
          u[a] = K.heap_index();
          next.emplace_back(shape.flat(u), c * sg);
        }
      }
      terms.swap(next);
    }
    for (const auto& [flat, c] : terms) out[flat] += c;
  });
  return out;
}

AppendixCheck appendix_identity_check(const HaarExpansion& phi, const HaarExpansion& b, const PartitionSpec& spec) {
  if (!(phi.shape() == b.shape())) throw ShapeError("symbol and argument live on different grids");
  const Shape& shape = phi.shape();
  const auto axes = shifted_axes(spec, shape.n_params());
  for (auto a : axes)
    if (std::max(max_level_on(phi, a), max_level_on(b, a)) > shape.depth(a) - 3)
      throw DomainError("shifted-axis levels must stay below J-2; truncation would corrupt the identity");
  const auto lhs = partition_commutator(phi, b, spec);
  if (lhs.truncated) throw DomainError("commutator truncated at the finest level");
  const auto d = delta_form(grandchild_transform(phi, axes), grandchild_transform(b, axes));

  const double base = 1.0 / (2.0 * std::numbers::sqrt2);
  AppendixCheck r;
  r.lhs_sup = sup_norm(lhs.output);
  r.error_shifted = sup_norm(lhs.output - std::pow(base, static_cast<double>(axes.size())) * d);
  r.error_alternate =
      sup_norm(lhs.output - std::pow(base, static_cast<double>(spec.j1.size() + spec.j2.size())) * d);
  double ld = 0.0, dd = 0.0, ll = 0.0;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    ld += lhs.output[i] * d[i];
    dd += d[i] * d[i];
    ll += lhs.output[i] * lhs.output[i];
  }
  r.best_scale = dd > 0.0 ? ld / dd : 0.0;
  const double res = std::max(0.0, ll - r.best_scale * ld);
  r.best_residual = ll > 0.0 ? std::sqrt(res / ll) : 0.0;
  return r;
}

HaarExpansion partition_commutator_expansion(const HaarExpansion& phi, const HaarExpansion& b,
                                             const PartitionSpec& spec) {
  if (!(phi.shape() == b.shape())) throw ShapeError("symbol and argument live on different grids");
  const Shape& shape = phi.shape();
  const std::size_t N = shape.n_params();
  const auto axes = shifted_axes(spec, N);
  const auto ch = spec.channels(N);

  // Symbol pairing per axis: Haar coefficient on Pi and Delta axes, mean over R_a on R axes.
  const auto sig = haar_inverse(phi);
  std::vector<double> sym(sig.values().begin(), sig.values().end());
  for (std::size_t a = 0; a < N; ++a)
    sym = transform_axis(shape, sym, a, shape.extent(a), ch[a].symbol == Pairing::Haar ? line::analyze : line::average);

  struct Rank1 {
    std::vector<double> u, v;  // u v^T
    double sign;
  };
  HaarExpansion out(shape);
  std::vector<std::int64_t> idx(N);
  for_each_index(shape, [&](std::span<const std::int64_t> s, std::size_t f) {
    if (!is_pure(s) || sym[f] == 0.0) return;
    std::vector<std::vector<Rank1>> factors(N);
    for (std::size_t a = 0; a < N; ++a) {
      const int J = shape.depth(a);
      const auto h = unit_vector(s[a], J), avg = average_vector(s[a], J);
      const auto& o = ch[a].output == Emit::Haar ? h : avg;
      const auto& in = ch[a].argument == Pairing::Haar ? h : avg;
      const auto it = std::find(axes.begin(), axes.end(), a);
      if (it == axes.end()) {
        factors[a].push_back({o, in, 1.0});
        continue;
      }
      // [S, o in^T] = (S o) in^T - o (S^T in)^T; the outer brackets [C, S] flip the sign.
      const double sg = (it + 1 == axes.end()) ? 1.0 : -1.0;
      factors[a].push_back({shift_1d(o, J), in, sg});
      factors[a].push_back({o, shift_adjoint_1d(in, J), -sg});
    }
    std::vector<std::size_t> pick(N, 0);
    while (true) {
      double coeff = sym[f];
      for (std::size_t a = 0; a < N; ++a) coeff *= factors[a][pick[a]].sign;
      double contraction = 0.0;
      for (std::size_t g = 0; g < shape.size(); ++g) {
        if (b[g] == 0.0) continue;
        shape.unflatten(g, idx);
        double w = b[g];
        for (std::size_t a = 0; a < N && w != 0.0; ++a) w *= factors[a][pick[a]].v[static_cast<std::size_t>(idx[a])];
        contraction += w;
      }
      if (contraction != 0.0) {
        for (std::size_t g = 0; g < shape.size(); ++g) {
          shape.unflatten(g, idx);
          double w = coeff * contraction;
          for (std::size_t a = 0; a < N && w != 0.0; ++a) w *= factors[a][pick[a]].u[static_cast<std::size_t>(idx[a])];
          out[g] += w;
        }
      }
      std::size_t a = N;
      while (a-- > 0) {
        if (++pick[a] < factors[a].size()) break;
        pick[a] = 0;
      }
      if (a == static_cast<std::size_t>(-1)) break;
    }
  });
  return out;
}

double corrected_identity_check(const HaarExpansion& phi, const HaarExpansion& b, const PartitionSpec& spec) {
  const auto lhs = partition_commutator(phi, b, spec);
  return sup_norm(lhs.output - partition_commutator_expansion(phi, b, spec));
}

GridSignal log_test_1d(const DyadicInterval& I, int depth) {
  if (!I.valid() || I.level > depth) throw DomainError("interval " + I.str() + " is finer than the grid");
  const Shape shape({depth});
  GridSignal out(shape);
  const double n = static_cast<double>(shape.size());
  const double len = I.length();
  const double center = (static_cast<double>(I.offset) + 0.5) * len;
  for (std::size_t c = 0; c < shape.size(); ++c) {
    const double t = (static_cast<double>(c) + 0.5) / n;
    double d = std::abs(t - center);
    d = std::min(d, 1.0 - d);
    out[c] = std::log(4.0 / std::max(len, d));
  }
  return out;
}

GridSignal log_test_rect(const DyadicRectangle& R, const Shape& shape) {
  if (R.n_params() != shape.n_params()) throw ShapeError("rectangle dimension does not match grid");
  if (!shape.representable(R)) throw DomainError("rectangle " + R.str() + " is finer than the grid");
  std::vector<GridSignal> lines;
  for (std::size_t a = 0; a < shape.n_params(); ++a) lines.push_back(log_test_1d(R[a], shape.depth(a)));
  GridSignal out(shape);
  for_each_index(shape, [&](std::span<const std::int64_t> c, std::size_t f) {
    double v = 0.0;
    for (std::size_t a = 0; a < c.size(); ++a) v += lines[a][static_cast<std::size_t>(c[a])];
    out[f] = v;
  });
  return out;
}

double shift_average_prefactor() { return 8.0 * std::numbers::ln2 / std::numbers::pi; }

}  // namespace dyadic
