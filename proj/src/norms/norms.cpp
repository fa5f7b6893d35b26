#include "dyadic/norms.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "dyadic/haar.hpp"
#include "maxflow.hpp"

namespace dyadic {

namespace {

// Dinkelbach stops once the closure gain falls below this fraction of the total weight.
constexpr double kClosureTol = 1e-12;
constexpr int kMaxDinkelbach = 500;
constexpr std::size_t kExhaustiveCells = 20;

DyadicRectangle rect_from_slots(std::span<const std::int64_t> slots) {
  std::vector<DyadicInterval> sides;
  sides.reserve(slots.size());
  for (auto s : slots) sides.push_back(DyadicInterval::from_heap(s));
  return DyadicRectangle(std::move(sides));
}

template <class Fn>
void for_each_cell_in(const Shape& shape, const DyadicRectangle& R, Fn&& fn) {
  const std::size_t n = shape.n_params();
  std::vector<std::int64_t> lo(n), hi(n), idx(n);
  for (std::size_t a = 0; a < n; ++a) {
    lo[a] = R[a].first_cell(shape.depth(a));
    hi[a] = R[a].end_cell(shape.depth(a));
  }
  idx = lo;
  while (true) {
    fn(shape.flat(idx));
    std::size_t a = n;
    while (a-- > 0) {
      if (++idx[a] < hi[a]) break;
      idx[a] = lo[a];
    }
    if (a == static_cast<std::size_t>(-1)) return;
  }
}

double oscillation(const GridSignal& sig, const DyadicRectangle& R, double mean) {
  double s = 0.0;
  std::size_t count = 0;
  for_each_cell_in(sig.shape(), R, [&](std::size_t f) {
    s += std::abs(sig[f] - mean);
    ++count;
  });
  return s / static_cast<double>(count);
}

/// Max-weight closure on the lattice of dyadic rectangles (levels 0..J per axis). Selecting a
/// rectangle forces both halves along its first splittable axis, hence all its cells.
class ClosureProblem {
 public:
  explicit ClosureProblem(const HaarExpansion& exp) : shape_(exp.shape()), lattice_(shape_.deepened(1)) {
    weight_.assign(lattice_.size(), 0.0);
    std::vector<std::int64_t> p(shape_.n_params());
    for_each_index(shape_, [&](std::span<const std::int64_t> s, std::size_t f) {
      if (!is_pure(s) || exp[f] == 0.0) return;
      for (std::size_t a = 0; a < s.size(); ++a) p[a] = s[a];
      const double w = exp[f] * exp[f];
      weight_[lattice_.flat(p)] = w;
      total_ += w;
    });
    int sum_depth = 0;
    for (int d : shape_.depths()) sum_depth += d;
    cell_area_ = std::ldexp(1.0, -sum_depth);
  }

  double total() const { return total_; }

  /// Minimal maximizer of sum_{R subset Omega} w_R - lambda |Omega|, weights scaled by 1/total.
  OpenSet solve(double lambda) const {
    const std::size_t n = lattice_.size();
    const std::size_t src = n, sink = n + 1;
    detail::FlowNetwork net(n + 2, 1e-13);
    const std::size_t N = shape_.n_params();
    std::vector<std::int64_t> slot(N), child(N);
    const double cell_cost = lambda / total_ * cell_area_;
    for (std::size_t v = 0; v < n; ++v) {
      lattice_.unflatten(v, slot);
      bool real = true;
      for (auto s : slot) real = real && s != 0;
      if (!real) continue;
      if (weight_[v] > 0.0) net.add_edge(src, v, weight_[v] / total_);
      std::size_t split = N;
      for (std::size_t a = 0; a < N && split == N; ++a)
        if (slot_level(slot[a]) < shape_.depth(a)) split = a;
      if (split == N) {
        net.add_edge(v, sink, cell_cost);
        continue;
      }
      child = slot;
      child[split] = 2 * slot[split];
      net.add_edge(v, lattice_.flat(child), detail::FlowNetwork::kInf);
      child[split] = 2 * slot[split] + 1;
      net.add_edge(v, lattice_.flat(child), detail::FlowNetwork::kInf);
    }
    net.max_flow(src, sink);
    const auto side = net.source_side(src);
    OpenSet omega(shape_);
    std::vector<std::int64_t> cell(N);
    for (std::size_t f = 0; f < shape_.size(); ++f) {
      shape_.unflatten(f, cell);
      for (std::size_t a = 0; a < N; ++a) slot[a] = (std::int64_t{1} << shape_.depth(a)) + cell[a];
      if (side[lattice_.flat(slot)]) omega.set(f);
    }
    return omega;
  }

 private:
  Shape shape_;
  Shape lattice_;
  std::vector<double> weight_;
  double total_ = 0.0;
  double cell_area_ = 1.0;
};

/// Pure coefficients inside R0, re-indexed on R0's own grid and scaled by |R0|^(-1/2), so that
/// product BMO of the result equals the supremum over Omega subset R0.
HaarExpansion restrict_to(const HaarExpansion& exp, const DyadicRectangle& R0) {
  const Shape& shape = exp.shape();
  const std::size_t N = shape.n_params();
  std::vector<int> depths(N);
  for (std::size_t a = 0; a < N; ++a) depths[a] = shape.depth(a) - R0[a].level;
  const Shape sub(depths);
  HaarExpansion out(sub);
  const double scale = 1.0 / std::sqrt(R0.area());
  std::vector<std::int64_t> t(N);
  for_each_index(shape, [&](std::span<const std::int64_t> s, std::size_t f) {
    if (!is_pure(s) || exp[f] == 0.0) return;
    for (std::size_t a = 0; a < N; ++a) {
      const auto I = DyadicInterval::from_heap(s[a]);
      if (!R0[a].contains(I)) return;
      const int rel = I.level - R0[a].level;
      t[a] = DyadicInterval{rel, I.offset - (R0[a].offset << rel)}.heap_index();
    }
    out[sub.flat(t)] = scale * exp[f];
  });
  return out;
}

OpenSet lift_open_set(const OpenSet& sub, const Shape& shape, const DyadicRectangle& R0) {
  OpenSet out(shape);
  const std::size_t N = shape.n_params();
  std::vector<std::int64_t> c(N);
  for (std::size_t f = 0; f < sub.shape().size(); ++f) {
    if (!sub.test(f)) continue;
    sub.shape().unflatten(f, c);
    for (std::size_t a = 0; a < N; ++a) c[a] += R0[a].first_cell(shape.depth(a));
    out.set(shape.flat(c));
  }
  return out;
}

double log_weight(const DyadicRectangle& R, std::span<const int> delta) {
  const double log4 = 2.0 * std::numbers::ln2;
  double w = 0.0;
  for (std::size_t a = 0; a < R.n_params(); ++a) w += delta[a] ? log4 : log4 + R[a].level * std::numbers::ln2;
  return w;
}

void check_delta(const Shape& shape, std::span<const int> delta) {
  if (delta.size() != shape.n_params()) throw ShapeError("delta vector length does not match parameter count");
  for (int d : delta)
    if (d != 0 && d != 1) throw DomainError("delta entries must be 0 or 1");
}

/// Odometer over [0, hi_0] x ... x [0, hi_{N-1}] in lexicographic order.
template <class Fn>
void for_each_generation(const std::vector<int>& hi, Fn&& fn) {
  std::vector<int> j(hi.size(), 0);
  while (true) {
    fn(std::span<const int>(j));
    std::size_t a = j.size();
    while (a-- > 0) {
      if (++j[a] <= hi[a]) break;
      j[a] = 0;
    }
    if (a == static_cast<std::size_t>(-1)) return;
  }
}

}  // namespace

std::string to_string(NormMethod m) {
  switch (m) {
    case NormMethod::Exhaustive: return "Exhaustive";
    case NormMethod::MaxFlow: return "MaxFlow";
    case NormMethod::GenerationScan: return "GenerationScan";
  }
  return "?";
}

nlohmann::json to_json(const NormReport& r) {
  nlohmann::json w;
  if (const auto* R = std::get_if<DyadicRectangle>(&r.witness)) {
    w["kind"] = "rectangle";
    auto sides = nlohmann::json::array();
    for (const auto& I : R->sides()) sides.push_back({{"level", I.level}, {"offset", I.offset}});
    w["payload"] = sides;
  } else if (const auto* O = std::get_if<OpenSet>(&r.witness)) {
    w["kind"] = "open_set";
    auto cells = nlohmann::json::array();
    for (auto c : O->cells()) cells.push_back(c);
    w["payload"] = {{"depths", O->shape().depths()}, {"cells", cells}};
  } else {
    const auto& G = std::get<GenerationWitness>(r.witness);
    w["kind"] = "generation";
    w["payload"] = {{"levels", G.levels}};
    w["payload"]["axis"] = G.axis ? nlohmann::json(*G.axis) : nlohmann::json(nullptr);
  }
  return {{"value", r.value}, {"method", to_string(r.method)}, {"witness", w}};
}

NormReport bmo_norm(const GridSignal& sig) {
  const Shape& shape = sig.shape();
  const Shape lattice = shape.deepened(1);
  const auto means = mean_pyramid(sig);
  NormReport best{0.0, NormMethod::Exhaustive, DyadicRectangle::torus(shape.n_params())};
  bool first = true;
  for_each_index(lattice, [&](std::span<const std::int64_t> s, std::size_t f) {
    if (!is_pure(s)) return;
    const auto R = rect_from_slots(s);
    const double v = oscillation(sig, R, means[f]);
    if (first || v > best.value) {
      best.value = v;
      best.witness = R;
      first = false;
    }
  });
  return best;
}

NormReport bmo_norm(const HaarExpansion& exp) { return bmo_norm(haar_inverse(exp)); }

double bmo_full_norm(const GridSignal& sig) { return bmo_norm(sig).value + std::abs(sig.integral()); }

double open_set_ratio(const HaarExpansion& exp, const OpenSet& omega) {
  if (omega.empty()) return 0.0;
  return project_open_set(exp, omega).norm2_squared() / omega.measure();
}

NormReport product_bmo_exact(const HaarExpansion& exp) {
  const Shape& shape = exp.shape();
  const std::size_t cells = shape.size();
  if (cells > kExhaustiveCells)
    throw DomainError("exhaustive product BMO needs at most " + std::to_string(kExhaustiveCells) + " cells, got " +
                      std::to_string(cells));
  // Cell mask of every pure rectangle with nonzero coefficient.
  std::vector<std::uint32_t> masks;
  std::vector<double> weights;
  for_each_index(shape, [&](std::span<const std::int64_t> s, std::size_t f) {
    if (!is_pure(s) || exp[f] == 0.0) return;
    std::uint32_t m = 0;
    for_each_cell_in(shape, rectangle_of(s), [&](std::size_t c) { m |= std::uint32_t{1} << c; });
    masks.push_back(m);
    weights.push_back(exp[f] * exp[f]);
  });
  const double cell_area = 1.0 / static_cast<double>(cells);
  double best = 0.0;
  std::uint32_t best_mask = (cells == 32) ? ~0u : ((std::uint32_t{1} << cells) - 1);
  int best_pop = std::popcount(best_mask);
  bool have = false;
  for (std::uint32_t sub = 1; sub < (std::uint32_t{1} << cells); ++sub) {
    double w = 0.0;
    for (std::size_t i = 0; i < masks.size(); ++i)
      if ((masks[i] & ~sub) == 0) w += weights[i];
    const int pop = std::popcount(sub);
    const double r = w / (pop * cell_area);
    const double tol = 1e-13 * std::max(best, r);
    if (!have || r > best + tol || (std::abs(r - best) <= tol && pop < best_pop)) {
      best = r;
      best_mask = sub;
      best_pop = pop;
      have = true;
    }
  }
  OpenSet omega(shape);
  for (std::size_t c = 0; c < cells; ++c)
    if (best_mask & (std::uint32_t{1} << c)) omega.set(c);
  if (best == 0.0) omega = OpenSet::full(shape);
  return {open_set_ratio(exp, omega), NormMethod::Exhaustive, omega};
}

NormReport product_bmo_norm(const HaarExpansion& exp) {
  const Shape& shape = exp.shape();
  const ClosureProblem problem(exp);
  OpenSet omega = OpenSet::full(shape);
  double lambda = open_set_ratio(exp, omega);
  if (problem.total() == 0.0) return {0.0, NormMethod::MaxFlow, omega};
  for (int it = 0; it < kMaxDinkelbach; ++it) {
    const OpenSet next = problem.solve(lambda);
    if (next.empty()) break;
    const double gain = project_open_set(exp, next).norm2_squared() - lambda * next.measure();
    const double r = open_set_ratio(exp, next);
    if (gain <= kClosureTol * problem.total() || r <= lambda) break;
    lambda = r;
    omega = next;
  }
  return {lambda, NormMethod::MaxFlow, omega};
}

NormReport product_bmo_norm_within(const HaarExpansion& exp, const DyadicRectangle& R0) {
  const Shape& shape = exp.shape();
  if (R0.n_params() != shape.n_params()) throw ShapeError("rectangle arity does not match expansion");
  if (!shape.representable(R0)) throw DomainError("rectangle finer than grid: " + R0.str());
  const auto sub = restrict_to(exp, R0);
  const auto inner = product_bmo_norm(sub);
  const OpenSet omega = lift_open_set(std::get<OpenSet>(inner.witness), shape, R0);
  return {open_set_ratio(exp, omega), NormMethod::MaxFlow, omega};
}

NormReport rect_bmo_norm(const HaarExpansion& exp) {
  const Shape& shape = exp.shape();
  std::vector<double> w(shape.size(), 0.0);
  for_each_index(shape, [&](std::span<const std::int64_t> s, std::size_t f) {
    if (is_pure(s)) w[f] = exp[f] * exp[f];
  });
  // Subtree sums along each axis: S(I) = w(I) + S(I-) + S(I+).
  const auto subtree = [](std::span<const double> in, std::span<double> out) {
    const std::size_t n = in.size();
    std::copy(in.begin(), in.end(), out.begin());
    out[0] = 0.0;
    for (std::size_t i = n; i-- > 1;)
      if (2 * i + 1 < n) out[i] += out[2 * i] + out[2 * i + 1];
  };
  for (std::size_t a = 0; a < shape.n_params(); ++a) w = transform_axis(shape, w, a, shape.extent(a), subtree);
  NormReport best{0.0, NormMethod::Exhaustive, DyadicRectangle::torus(shape.n_params())};
  bool first = true;
  for_each_index(shape, [&](std::span<const std::int64_t> s, std::size_t f) {
    if (!is_pure(s)) return;
    const auto R = rectangle_of(s);
    const double v = w[f] / R.area();
    if (first || v > best.value) {
      best.value = v;
      best.witness = R;
      first = false;
    }
  });
  return best;
}

NormReport lmo_norm(const HaarExpansion& exp) {
  const Shape& shape = exp.shape();
  const int N = static_cast<int>(shape.n_params());
  NormReport best{0.0, NormMethod::GenerationScan, GenerationWitness{std::vector<int>(N, 0), std::nullopt}};
  bool first = true;
  for_each_generation(shape.depths(), [&](std::span<const int> j) {
    int sum = N;
    for (int v : j) sum += v;
    const double v = sum * std::sqrt(product_bmo_norm(q_tail(exp, j)).value);
    if (first || v > best.value) {
      best.value = v;
      best.witness = GenerationWitness{{j.begin(), j.end()}, std::nullopt};
      first = false;
    }
  });
  return best;
}

NormReport lmo_axis_norm(const HaarExpansion& exp, std::size_t axis) {
  const Shape& shape = exp.shape();
  if (axis >= shape.n_params()) throw DomainError("bad axis " + std::to_string(axis));
  NormReport best{0.0, NormMethod::GenerationScan, GenerationWitness{{0}, axis}};
  for (int i = 0; i <= shape.depth(axis); ++i) {
    const double v = (i + 1) * std::sqrt(product_bmo_norm(axis_q_tail(exp, axis, i)).value);
    if (i == 0 || v > best.value) {
      best.value = v;
      best.witness = GenerationWitness{{i}, axis};
    }
  }
  return best;
}

double lmo_beta_objective(const HaarExpansion& exp, std::span<const int> delta, const OpenSet& omega) {
  check_delta(exp.shape(), delta);
  if (omega.empty()) return 0.0;
  const double w = log_weight(omega.enclosing_rectangle(), delta);
  return w * w * open_set_ratio(exp, omega);
}

NormReport lmo_beta_norm(const HaarExpansion& exp, std::span<const int> delta) {
  const Shape& shape = exp.shape();
  check_delta(shape, delta);
  const std::size_t N = shape.n_params();
  NormReport best{0.0, NormMethod::MaxFlow, OpenSet::full(shape)};
  // Scan R over the delta_j = 0 axes only (weight is constant along the others, where R_j = T is
  // the widest choice). Levels stop at J-1: a cell-level side contains no Haar rectangle.
  std::vector<std::int64_t> hi(N, 1);
  for (std::size_t a = 0; a < N; ++a)
    if (!delta[a]) hi[a] = std::int64_t{1} << shape.depth(a);
  std::vector<std::int64_t> slot(N, 1);
  while (true) {
    const auto R0 = rect_from_slots(slot);
    const auto inner = product_bmo_norm_within(exp, R0);
    if (inner.value > 0.0) {
      const auto& omega = std::get<OpenSet>(inner.witness);
      const double v = lmo_beta_objective(exp, delta, omega);
      if (v > best.value) {
        best.value = v;
        best.witness = omega;
      }
    }
    std::size_t a = N;
    while (a-- > 0) {
      if (++slot[a] < hi[a]) break;
      slot[a] = 1;
    }
    if (a == static_cast<std::size_t>(-1)) break;
  }
  return best;
}

NormReport lmo_equiv_quantity(const HaarExpansion& exp) {
  const std::vector<int> zero(exp.shape().n_params(), 0);
  return lmo_beta_norm(exp, zero);
}

double s_weight(double length) {
  if (!(length > 0.0)) throw DomainError("s(I) needs a positive length");
  return length <= 1.0 ? std::log(1.0 / length) + 1.0 : 1.0;
}

double evaluate_at_witness(NormKind which, const HaarExpansion& exp, const NormReport& r, std::span<const int> delta) {
  switch (which) {
    case NormKind::Bmo: {
      const auto sig = haar_inverse(exp);
      const auto& R = std::get<DyadicRectangle>(r.witness);
      return oscillation(sig, R, rect_mean(sig, R));
    }
    case NormKind::ProductBmo: return open_set_ratio(exp, std::get<OpenSet>(r.witness));
    case NormKind::RectBmo: return open_set_ratio(exp, OpenSet::from_rectangle(exp.shape(), std::get<DyadicRectangle>(r.witness)));
    case NormKind::Lmo: {
      const auto& j = std::get<GenerationWitness>(r.witness).levels;
      int sum = static_cast<int>(j.size());
      for (int v : j) sum += v;
      return sum * std::sqrt(product_bmo_norm(q_tail(exp, j)).value);
    }
    case NormKind::LmoAxis: {
      const auto& g = std::get<GenerationWitness>(r.witness);
      return (g.levels.at(0) + 1) * std::sqrt(product_bmo_norm(axis_q_tail(exp, g.axis.value(), g.levels[0])).value);
    }
    case NormKind::LmoBeta: return lmo_beta_objective(exp, delta, std::get<OpenSet>(r.witness));
  }
  return 0.0;
}

}  // namespace dyadic
