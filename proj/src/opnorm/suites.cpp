#include <cmath>
#include <random>
#include <sstream>

#include "dyadic/haar.hpp"
#include "dyadic/norms.hpp"
#include "dyadic/opnorm.hpp"
#include "dyadic/paraproducts.hpp"
#include "dyadic/random.hpp"

namespace dyadic {

namespace {

OperatorHandle expectation_operator(const Shape& shape, std::size_t axis, int k) {
  return filter_operator(shape, Space::Full, [axis, k](std::span<const std::int64_t> s) { return slot_level(s[axis]) < k; });
}

/// ||Pi(psi, E_k^(axis) .)||.
double truncated_norm(const HaarExpansion& psi, std::size_t axis, int k) {
  return l2_opnorm(compose(paraproduct_operator(psi, Space::Full), expectation_operator(psi.shape(), axis, k)));
}

/// Random bmo-scale b with a random mean.
HaarExpansion random_b(const Shape& shape, Rng& rng) {
  auto b = random_bmo_expansion(shape, rng);
  b[0] = std::normal_distribution<double>()(rng);
  return b;
}

/// Like random_b, but each coefficient is drawn from (seed, rectangle) so deeper grids refine the same b.
HaarExpansion nested_b(const Shape& shape, std::uint64_t seed) {
  HaarExpansion b(shape);
  for_each_index(shape, [&](std::span<const std::int64_t> sl, std::size_t f) {
    if (f != 0 && !is_pure(sl)) return;
    std::uint64_t h = seed;
    for (auto x : sl) h = derive_seed(h, static_cast<std::uint64_t>(x));
    Rng rng(h);
    const double g = std::normal_distribution<double>()(rng);
    b[f] = f == 0 ? g : g * std::sqrt(rectangle_of(sl).area());
  });
  return b;
}

double full_norm(const HaarExpansion& b) { return bmo_full_norm(haar_inverse(b)); }

void consider(ScanResult& r, double v, const std::string& tuple) {
  if (v > r.constant) {
    r.constant = v;
    r.worst = tuple;
  }
}

std::string tuple(std::size_t sample, int k, std::size_t axis, int extra = -1) {
  std::ostringstream os;
  os << "(phi=" << sample << ", b=" << sample << ", k=" << k << ", j=" << axis;
  if (extra >= 0) os << ", i=" << extra;
  os << ")";
  return os.str();
}

HaarExpansion decay_symbol(std::size_t n_params, std::uint64_t seed, std::size_t i, int J) {
  return ensemble_symbol(EnsembleSpec{n_params, 3 * (i + 1), seed}, 3 * i + 1, J).second;
}

}  // namespace

std::pair<double, double> sigma_norms(const HaarExpansion& b, int k, std::size_t axis) {
  return {truncated_norm(b, axis, k), l2_opnorm(paraproduct_operator(sigma_op(b, k, axis), Space::Full))};
}

CoreLemmaReport core_lemma_suite(const SuiteConfig& cfg, std::uint64_t seed) {
  CoreLemmaReport rep;
  {
    const Shape s = Shape::uniform(cfg.n_params, cfg.sigma_depth);
    Rng rng(derive_seed(seed, 100));
    for (std::size_t i = 0; i < cfg.sigma_samples; ++i) {
      const auto b = random_expansion(s, rng);
      for (std::size_t axis = 0; axis < cfg.n_params; ++axis)
        for (int k = 0; k < cfg.sigma_depth; ++k) {
          const auto [lhs, rhs] = sigma_norms(b, k, axis);
          const double dev = std::abs(lhs - rhs) / std::max(rhs, 1e-300);
          rep.sigma_max_rel_dev = std::max(rep.sigma_max_rel_dev, dev);
          ++rep.sigma_cases;
          if (dev > 1e-8) rep.failures.push_back("sigma " + tuple(i, k, axis));
        }
    }
  }
  for (int J : cfg.depths) {
    const Shape s = Shape::uniform(cfg.n_params, J);
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(J)));
    DepthScan scan;
    scan.depth = J;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
      const auto phi = random_bmo_expansion(s, rng);
      const auto b = random_b(s, rng);
      const double nb = full_norm(b);
      const double bmo_phi = std::sqrt(product_bmo_norm(phi).value);
      const double lmo = lmo_norm(phi).value;
      const auto psi = pi_main(phi, b);
      for (std::size_t axis = 0; axis < cfg.n_params; ++axis) {
        std::vector<int> beta(cfg.n_params, 0);
        beta[axis] = 1;
        const auto psi_beta = pi_beta(phi, b, beta);
        for (int k = 0; k < J; ++k) {
          consider(scan.core2, truncated_norm(psi, axis, k) / ((k + 1) * bmo_phi * nb), tuple(i, k, axis));
          if (cfg.n_params >= 2)
            consider(scan.core2one, truncated_norm(psi_beta, axis, k) / ((k + 1) * bmo_phi * nb), tuple(i, k, axis));
          for (int jj = 0; jj < J; ++jj) {
            const auto psi_q = pi_main(axis_q_tail(phi, axis, jj), b);
            const double denom = static_cast<double>(k + 1) / (jj + 1) * lmo * nb;
            consider(scan.core2bis, truncated_norm(psi_q, axis, k) / denom, tuple(i, k, axis, jj));
          }
        }
      }
    }
    rep.scans.push_back(scan);
  }
  return rep;
}

OperatorHandle cotlar_block(const HaarExpansion& phi, const HaarExpansion& b, int M) {
  const Shape& s = phi.shape();
  const auto [lo, hi] = cotlar_band(M, s.depth(0));
  const auto band = filter_operator(s, Space::Full, [lo, hi](std::span<const std::int64_t> sl) {
    const int l = slot_level(sl[0]);
    return l >= lo && l <= hi;
  });
  return compose(paraproduct_operator(pi_main(phi, b), Space::Full), band);
}

std::vector<CotlarDepth> cotlar_decay_suite(const SuiteConfig& cfg, std::uint64_t seed) {
  std::vector<CotlarDepth> out;
  for (int J : cfg.depths) {
    const Shape s = Shape::uniform(cfg.n_params, J);
    CotlarDepth d;
    d.depth = J;
    const int count = cotlar_band_count(J);
    d.blocks = static_cast<std::size_t>(count);
    HaarExpansion one(s);
    one[0] = 1.0;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
      const auto phi = decay_symbol(cfg.n_params, seed, i, J);
      const double la = lmo_axis_norm(phi, 0).value;
      for (const auto& b : {one, nested_b(s, derive_seed(seed, 200 + i))}) {
        const double nb = full_norm(b);
        const double scale = la * la * nb * nb;
        if (scale == 0.0) continue;
        std::vector<Eigen::MatrixXd> blocks;
        for (int M = 0; M < count; ++M) blocks.push_back(dense_matrix(cotlar_block(phi, b, M)));
        for (int M = 0; M < count; ++M)
          for (int Mp = 0; Mp < count; ++Mp) {
            const Eigen::MatrixXd tt = blocks[M].transpose() * blocks[Mp];
            Eigen::BDCSVD<Eigen::MatrixXd> svd(tt);
            const double n = svd.singularValues()(0);
            d.fitted_constant = std::max(d.fitted_constant, n * std::exp2(std::abs(M - Mp)) / scale);
            if (M != Mp) {
              const Eigen::MatrixXd cross = blocks[M] * blocks[Mp].transpose();
              d.max_cross_product = std::max(d.max_cross_product, cross.cwiseAbs().maxCoeff());
            }
          }
      }
    }
    out.push_back(d);
  }
  return out;
}

std::vector<GrowthDepth> growth_lemma_suite(const SuiteConfig& cfg, std::uint64_t seed) {
  std::vector<GrowthDepth> out;
  const std::size_t N = cfg.n_params;
  for (int J : cfg.depths) {
    const Shape s = Shape::uniform(N, J);
    const Shape lattice = s.deepened(1);
    Rng rng(derive_seed(seed, 300 + static_cast<std::uint64_t>(J)));
    std::vector<GridSignal> family;
    for (std::size_t i = 0; i < cfg.samples; ++i) family.push_back(haar_inverse(random_b(s, rng)));
    // log_R over every rectangle with levels below J.
    for_each_index(Shape::uniform(N, J), [&](std::span<const std::int64_t> sl, std::size_t) {
      if (!is_pure(sl)) return;
      family.push_back(log_test_rect(rectangle_of(sl), s));
    });

    GrowthDepth g;
    g.depth = J;
    for (const auto& b : family) {
      const double nb = bmo_full_norm(b), semi = bmo_norm(b).value;
      GridSignal sq(s);
      for (std::size_t c = 0; c < s.size(); ++c) sq[c] = b[c] * b[c];
      const auto means = mean_pyramid(b), sq_means = mean_pyramid(sq);
      for_each_index(lattice, [&](std::span<const std::int64_t> sl, std::size_t f) {
        if (!is_pure(sl)) return;
        // Any axis may play the role of I, so the smallest k + 1 applies.
        int kmin = slot_level(sl[0]);
        for (auto x : sl) kmin = std::min(kmin, slot_level(x));
        const double w = kmin + 1.0;
        g.mean_bound = std::max(g.mean_bound, std::abs(means[f]) / (w * nb));
        g.local_l2 = std::max(g.local_l2, sq_means[f] / (w * w * nb * nb));
      });
      if (semi == 0.0) continue;
      const auto coeffs = haar_forward(b);
      // Nonempty proper axis sets A carrying R; T lives on the complement.
      for (std::uint32_t mask = 1; mask + 1 < (1u << N); ++mask) {
        std::vector<std::size_t> comp;
        for (std::size_t a = 0; a < N; ++a)
          if (!(mask >> a & 1u)) comp.push_back(a);
        // Every T: one pure interval per complement axis.
        std::vector<std::int64_t> tslot(comp.size(), 1);
        while (true) {
          std::vector<DyadicInterval> Ts;
          double tarea = 1.0;
          for (auto x : tslot) {
            Ts.push_back(DyadicInterval::from_heap(x));
            tarea *= Ts.back().length();
          }
          const auto pt = filter_coefficients(coeffs, [&](std::span<const std::int64_t> sl) {
            for (std::size_t i = 0; i < comp.size(); ++i)
              if (sl[comp[i]] == 0 || !Ts[i].contains(DyadicInterval::from_heap(sl[comp[i]]))) return false;
            return true;
          });
          const auto sig = haar_inverse(pt);
          GridSignal sq2(s);
          for (std::size_t c = 0; c < s.size(); ++c) sq2[c] = sig[c] * sig[c];
          const auto pm = mean_pyramid(sq2);
          // R on the axes of A, the whole circle (slot 1 at level 0) on the complement.
          for_each_index(lattice, [&](std::span<const std::int64_t> sl, std::size_t f) {
            for (std::size_t a = 0; a < N; ++a) {
              if (sl[a] == 0) return;
              if (!(mask >> a & 1u) && sl[a] != 1) return;
            }
            g.projected = std::max(g.projected, pm[f] / (tarea * semi * semi));
          });
          std::size_t i = comp.size();
          while (i-- > 0) {
            if (++tslot[i] < (std::int64_t{1} << J)) break;
            tslot[i] = 1;
          }
          if (i == static_cast<std::size_t>(-1)) break;
        }
      }
    }
    out.push_back(g);
  }
  return out;
}

std::vector<CommutatorDepth> commutator_bound_scan(const SuiteConfig& cfg, std::uint64_t seed) {
  std::vector<CommutatorDepth> out;
  std::vector<std::size_t> axes(cfg.n_params);
  for (std::size_t a = 0; a < axes.size(); ++a) axes[a] = a;
  for (int J : cfg.depths) {
    const Shape s = Shape::uniform(cfg.n_params, J);
    Rng rng(derive_seed(seed, 400 + static_cast<std::uint64_t>(J)));
    CommutatorDepth d;
    d.depth = J;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
      auto phi = decay_symbol(cfg.n_params, seed, i, J);
      auto b = random_b(s, rng);
      const double lp = lmo_norm(phi).value, nb = full_norm(b);
      if (lp == 0.0 || nb == 0.0) continue;
      phi *= 1.0 / lp;
      b *= 1.0 / nb;
      const auto c = iterated_commutator(phi, b, axes);
      d.truncated = d.truncated || c.truncated;
      d.max_value = std::max(d.max_value, product_bmo_norm(c.output).value);
    }
    out.push_back(d);
  }
  return out;
}

nlohmann::json to_json(const CoreLemmaReport& r) {
  nlohmann::json scans = nlohmann::json::array();
  for (const auto& s : r.scans)
    scans.push_back({{"depth", s.depth},
                     {"core2", {{"constant", s.core2.constant}, {"worst", s.core2.worst}}},
                     {"core2bis", {{"constant", s.core2bis.constant}, {"worst", s.core2bis.worst}}},
                     {"core2one", {{"constant", s.core2one.constant}, {"worst", s.core2one.worst}}}});
  return {{"sigma_max_rel_dev", r.sigma_max_rel_dev},
          {"sigma_cases", r.sigma_cases},
          {"failures", r.failures},
          {"scans", scans}};
}

nlohmann::json to_json(const std::vector<CotlarDepth>& r) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& d : r)
    a.push_back({{"depth", d.depth},
                 {"fitted_constant", d.fitted_constant},
                 {"max_cross_product", d.max_cross_product},
                 {"blocks", d.blocks}});
  return a;
}

nlohmann::json to_json(const std::vector<GrowthDepth>& r) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& d : r)
    a.push_back({{"depth", d.depth}, {"mean_bound", d.mean_bound}, {"local_l2", d.local_l2}, {"projected", d.projected}});
  return a;
}

nlohmann::json to_json(const std::vector<CommutatorDepth>& r) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& d : r) a.push_back({{"depth", d.depth}, {"max_value", d.max_value}, {"truncated", d.truncated}});
  return a;
}

}  // namespace dyadic
