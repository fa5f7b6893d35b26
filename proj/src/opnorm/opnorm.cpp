#include "dyadic/opnorm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include <Eigen/SVD>

#include "dyadic/haar.hpp"
#include "dyadic/io.hpp"
#include "dyadic/norms.hpp"
#include "dyadic/paraproducts.hpp"
#include "dyadic/random.hpp"

namespace dyadic {

std::size_t space_dim(const Shape& shape, Space space) {
  return space == Space::Pure ? shape.pure_size() : shape.size();
}

std::vector<double> to_coords(const HaarExpansion& e, Space space) {
  if (space == Space::Pure) return e.pure_vector();
  return {e.coeffs().begin(), e.coeffs().end()};
}

HaarExpansion from_coords(const Shape& shape, std::span<const double> x, Space space) {
  if (x.size() != space_dim(shape, space)) throw ShapeError("coordinate vector has the wrong length");
  if (space == Space::Pure) return HaarExpansion::from_pure_vector(shape, x);
  return HaarExpansion(shape, {x.begin(), x.end()});
}

OperatorHandle OperatorHandle::from_matrix(Eigen::MatrixXd m) {
  OperatorHandle h;
  h.domain_dim = static_cast<std::size_t>(m.cols());
  h.range_dim = static_cast<std::size_t>(m.rows());
  auto shared = std::make_shared<const Eigen::MatrixXd>(std::move(m));
  h.apply = [shared](std::span<const double> x) {
    const Eigen::VectorXd y = *shared * Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    return std::vector<double>(y.data(), y.data() + y.size());
  };
  h.adjoint = [shared](std::span<const double> x) {
    const Eigen::VectorXd y =
        shared->transpose() * Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    return std::vector<double>(y.data(), y.data() + y.size());
  };
  return h;
}

OperatorHandle expansion_operator(const Shape& shape, Space space, LinearMap apply, LinearMap adjoint) {
  OperatorHandle h;
  h.domain_dim = h.range_dim = space_dim(shape, space);
  h.apply = [shape, space, apply](std::span<const double> x) {
    return to_coords(apply(from_coords(shape, x, space)), space);
  };
  h.adjoint = [shape, space, adjoint](std::span<const double> x) {
    return to_coords(adjoint(from_coords(shape, x, space)), space);
  };
  return h;
}

OperatorHandle compose(const OperatorHandle& a, const OperatorHandle& b) {
  if (a.domain_dim != b.range_dim) throw ShapeError("operator dimensions do not chain");
  OperatorHandle h;
  h.domain_dim = b.domain_dim;
  h.range_dim = a.range_dim;
  h.apply = [a, b](std::span<const double> x) { return a.apply(b.apply(x)); };
  h.adjoint = [a, b](std::span<const double> x) { return b.adjoint(a.adjoint(x)); };
  return h;
}

OperatorHandle adjoint_of(const OperatorHandle& a) {
  return {a.range_dim, a.domain_dim, a.adjoint, a.apply};
}

OperatorHandle paraproduct_operator(const HaarExpansion& psi, Space space) {
  return expansion_operator(
      psi.shape(), space, [psi](const HaarExpansion& f) { return pi_main(psi, f); },
      [psi](const HaarExpansion& g) { return delta_form(psi, g); });
}

OperatorHandle filter_operator(const Shape& shape, Space space,
                               const std::function<bool(std::span<const std::int64_t>)>& keep) {
  const LinearMap p = [keep](const HaarExpansion& f) { return filter_coefficients(f, keep); };
  return expansion_operator(shape, space, p, p);
}

Eigen::MatrixXd dense_matrix(const OperatorHandle& op) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(op.range_dim), static_cast<Eigen::Index>(op.domain_dim));
  std::vector<double> e(op.domain_dim, 0.0);
  for (std::size_t c = 0; c < op.domain_dim; ++c) {
    e[c] = 1.0;
    const auto col = op.apply(e);
    if (col.size() != op.range_dim) throw ShapeError("operator returned a vector of the wrong length");
    for (std::size_t r = 0; r < op.range_dim; ++r) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r];
    e[c] = 0.0;
  }
  return m;
}

double l2_opnorm(const OperatorHandle& op, std::uint64_t seed, std::size_t dense_limit, std::size_t max_iter) {
  if (op.domain_dim == 0 || op.range_dim == 0) return 0.0;
  if (std::max(op.domain_dim, op.range_dim) <= dense_limit) {
    const Eigen::MatrixXd m = dense_matrix(op);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  }
  Rng rng(seed);
  std::normal_distribution<double> n01;
  std::vector<double> x(op.domain_dim);
  for (auto& v : x) v = n01(rng);
  double lambda = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    const double nx = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
    if (nx == 0.0) return 0.0;
    for (auto& v : x) v /= nx;
    auto y = op.adjoint(op.apply(x));
    const double next = std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
    if (next <= 0.0) return 0.0;
    if (it > 0 && std::abs(next - lambda) <= 1e-10 * next) return std::sqrt(next);
    lambda = next;
    x = std::move(y);
  }
  throw NumericError("power iteration did not converge within " + std::to_string(max_iter) + " steps");
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m) {
  os << "row,col,value\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << r << ',' << c << ',' << io::format_double(m(r, c)) << '\n';
}

double lower_bound_ratio(const HaarExpansion& phi, const HaarExpansion& b) {
  const double nb = bmo_full_norm(haar_inverse(b));
  if (nb == 0.0) return 0.0;
  return std::sqrt(product_bmo_norm(pi_main(phi, b)).value) / nb;
}

namespace {

std::vector<DyadicRectangle> all_rectangles(const Shape& shape) {
  std::vector<DyadicRectangle> out;
  std::vector<int> lv(shape.n_params(), 0);
  std::vector<std::int64_t> off(shape.n_params(), 0);
  const std::size_t N = shape.n_params();
  while (true) {
    std::vector<DyadicInterval> sides(N);
    for (std::size_t a = 0; a < N; ++a) sides[a] = {lv[a], off[a]};
    out.emplace_back(std::move(sides));
    std::size_t a = N;
    while (a-- > 0) {
      if (++off[a] < (std::int64_t{1} << lv[a])) break;
      off[a] = 0;
      if (++lv[a] <= shape.depth(a)) break;
      lv[a] = 0;
    }
    if (a == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

/// Normalize to bmo_full_norm 1 (zero stays zero).
HaarExpansion normalized(HaarExpansion b) {
  const double n = bmo_full_norm(haar_inverse(b));
  if (n > 0.0) b *= 1.0 / n;
  return b;
}

double log_weight(const DyadicRectangle& R) {
  double w = 0.0;
  for (const auto& I : R.sides()) w += std::log(4.0 / I.length());
  return w;
}

}  // namespace

EquivalenceRecord bmo_to_bmo_lower_bound(const HaarExpansion& phi, std::size_t budget, std::uint64_t seed) {
  if (budget == 0) throw DomainError("budget must be at least 1");
  const Shape& shape = phi.shape();

  // Log candidates, most promising first: W(R)^2 / |R| times the phi mass inside R.
  auto rects = all_rectangles(shape);
  std::vector<double> score(rects.size(), 0.0);
  for (std::size_t i = 0; i < rects.size(); ++i) {
    double mass = 0.0;
    for_each_index(shape, [&](std::span<const std::int64_t> s, std::size_t f) {
      if (phi[f] != 0.0 && is_pure(s) && rects[i].contains(rectangle_of(s))) mass += phi[f] * phi[f];
    });
    const double w = log_weight(rects[i]);
    score[i] = w * w * mass / rects[i].area();
  }
  std::vector<std::size_t> order(rects.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });

  Rng random_rng(derive_seed(seed, 0)), refine_rng(derive_seed(seed, 1));
  std::normal_distribution<double> n01;
  const auto pure = pure_indices(shape);

  EquivalenceRecord rec;
  rec.depth = shape.depth(0);
  rec.lower_bound = -1.0;
  std::size_t next_log = 0;
  for (std::size_t t = 0; t < budget; ++t) {
    const bool logs_left = next_log < order.size();
    std::string family;
    if (logs_left && (t % 4 == 0 || t % 4 == 2)) family = "log";
    else if (logs_left ? t % 4 == 1 : t % 2 == 0) family = "random";
    else family = "refine";

    HaarExpansion b;
    if (family == "log") {
      b = haar_forward(log_test_rect(rects[order[next_log++]], shape));
    } else if (family == "random" || rec.witness.shape().size() == 0 || pure.empty()) {
      family = "random";
      b = random_bmo_expansion(shape, random_rng);
    } else {
      b = rec.witness;
      const std::size_t i = pure[std::uniform_int_distribution<std::size_t>(0, pure.size() - 1)(refine_rng)];
      std::vector<std::int64_t> s(shape.n_params());
      shape.unflatten(i, s);
      b[i] += 0.5 * std::sqrt(rectangle_of(s).area()) * n01(refine_rng);
    }
    b = normalized(std::move(b));
    const double v = lower_bound_ratio(phi, b);
    ++rec.evaluations;
    if (family == "log") rec.log_family_bound = std::max(rec.log_family_bound, v);
    if (v > rec.lower_bound) {
      rec.lower_bound = v;
      rec.witness = std::move(b);
      rec.witness_family = family;
    }
  }
  rec.lmo_norm = lmo_norm(phi).value;
  rec.ratio = rec.lower_bound > 0.0 ? rec.lmo_norm / rec.lower_bound : 0.0;
  return rec;
}

std::pair<std::string, HaarExpansion> ensemble_symbol(const EnsembleSpec& spec, std::size_t index, int depth) {
  static const char* kinds[] = {"coarse", "decay", "single"};
  const Shape shape = Shape::uniform(spec.n_params, depth);
  const std::size_t kind = index % 3;
  const std::uint64_t ms = derive_seed(spec.seed, index);
  const double N = static_cast<double>(spec.n_params);

  std::vector<int> pick_level(spec.n_params);
  std::vector<std::int64_t> pick_offset(spec.n_params);
  {
    Rng rng(derive_seed(ms, 0xfeed));
    for (std::size_t a = 0; a < spec.n_params; ++a) {
      pick_level[a] = std::min(depth - 1, static_cast<int>(rng() % 2));
      pick_offset[a] = static_cast<std::int64_t>(rng() % (std::uint64_t{1} << pick_level[a]));
    }
  }

  HaarExpansion phi(shape);
  for_each_index(shape, [&](std::span<const std::int64_t> s, std::size_t f) {
    if (!is_pure(s)) return;
    std::uint64_t h = ms;
    double ksum = 0.0;
    int kmax = 0;
    bool is_pick = true;
    for (std::size_t a = 0; a < s.size(); ++a) {
      h = derive_seed(h, static_cast<std::uint64_t>(s[a]));
      const auto I = DyadicInterval::from_heap(s[a]);
      ksum += I.level;
      kmax = std::max(kmax, I.level);
      is_pick = is_pick && I.level == pick_level[a] && I.offset == pick_offset[a];
    }
    Rng rng(h);
    const double g = std::normal_distribution<double>()(rng);
    const double root = std::sqrt(rectangle_of(s).area());
    switch (kind) {
      case 0: phi[f] = kmax <= 1 ? g * root : 0.0; break;
      case 1: phi[f] = g * root * std::pow(ksum + N, -1.5); break;
      default: phi[f] = is_pick ? (std::abs(g) + 0.5) * root : 0.0; break;
    }
  });
  return {std::string(kinds[kind]) + "-" + std::to_string(index), std::move(phi)};
}

EquivalenceTable equivalence_experiment(const EnsembleSpec& spec, std::span<const int> depths, std::size_t budget,
                                        std::uint64_t seed) {
  EquivalenceTable table;
  for (int J : depths) {
    DepthBand band;
    band.depth = J;
    band.min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < spec.members; ++m) {
      auto [id, phi] = ensemble_symbol(spec, m, J);
      auto rec = bmo_to_bmo_lower_bound(phi, budget, derive_seed(seed, m));
      rec.symbol_id = id;
      rec.depth = J;
      rec.lmo_equiv = lmo_equiv_quantity(phi).value;
      if (rec.lower_bound > 0.0 && rec.lmo_norm > 0.0) {
        band.min_ratio = std::min(band.min_ratio, rec.ratio);
        band.max_ratio = std::max(band.max_ratio, rec.ratio);
      }
      if (rec.log_family_bound > 0.0)
        band.necessity_constant = std::max(band.necessity_constant, std::sqrt(rec.lmo_equiv) / rec.log_family_bound);
      table.records.push_back(std::move(rec));
    }
    if (!std::isfinite(band.min_ratio)) band.min_ratio = 0.0;
    table.bands.push_back(band);
  }
  return table;
}

double spread(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *lo > 0.0 ? *hi / *lo : 0.0;
}

nlohmann::json to_json(const EquivalenceRecord& r) {
  return {{"symbol_id", r.symbol_id},         {"depth", r.depth},
          {"lmo_norm", r.lmo_norm},           {"lower_bound", r.lower_bound},
          {"log_family_bound", r.log_family_bound}, {"ratio", r.ratio},
          {"lmo_equiv", r.lmo_equiv},         {"witness_family", r.witness_family},
          {"evaluations", r.evaluations}};
}

}  // namespace dyadic
