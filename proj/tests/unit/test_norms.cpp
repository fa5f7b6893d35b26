#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dyadic/haar.hpp"
#include "dyadic/norms.hpp"
#include "dyadic/random.hpp"
#include "oracles.hpp"

using namespace dyadic;

namespace {

double scan_bmo(const GridSignal& sig) {
  double best = 0.0;
  for (const auto& R : oracle::all_rectangles(sig.shape())) best = std::max(best, oracle::oscillation(sig, R));
  return best;
}

HaarExpansion single(const Shape& s, const DyadicRectangle& R, double c) {
  auto e = HaarExpansion::haar(s, R);
  e *= c;
  return e;
}

}  // namespace

TEST_CASE("bmo_norm") {
  const Shape s = Shape::uniform(2, 3);
  GridSignal c(s, std::vector<double>(s.size(), 2.5));
  const auto r0 = bmo_norm(c);
  CHECK(r0.value == 0.0);
  CHECK(std::get<DyadicRectangle>(r0.witness) == DyadicRectangle::torus(2));

  const std::vector<AxisIndex> ix{AxisIndex::interval({0, 0}), AxisIndex::mean()};
  const auto h = haar_inverse(HaarExpansion::basis(s, ix));
  const auto rh = bmo_norm(h);
  CHECK(rh.value == doctest::Approx(scan_bmo(h)).epsilon(1e-14));
  CHECK(rh.value == doctest::Approx(1.0));
  CHECK(std::get<DyadicRectangle>(rh.witness) == DyadicRectangle::torus(2));

  // A function of t1 alone has the one-parameter norm.
  Rng rng(1);
  const auto g = random_signal(Shape::uniform(1, 3), rng);
  GridSignal f(s);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) f[i * 8 + j] = g[i];
  CHECK(bmo_norm(f).value == doctest::Approx(bmo_norm(g).value).epsilon(1e-14));

  for (int t = 0; t < 5; ++t) {
    const auto r = random_signal(Shape({2, 3}), rng);
    const auto rep = bmo_norm(r);
    CHECK(rep.value == doctest::Approx(scan_bmo(r)).epsilon(1e-13));
    const auto e = haar_forward(r);
    CHECK(evaluate_at_witness(NormKind::Bmo, e, rep) == doctest::Approx(rep.value).epsilon(1e-9));
  }
}

TEST_CASE("product_bmo_exact closed forms") {
  const Shape s = Shape::uniform(2, 2);
  const auto top = product_bmo_exact(HaarExpansion::haar(s, DyadicRectangle::torus(2)));
  CHECK(top.value == doctest::Approx(1.0));
  CHECK(std::get<OpenSet>(top.witness) == OpenSet::full(s));
  CHECK(product_bmo_exact(HaarExpansion(s)).value == 0.0);

  const DyadicRectangle R({{1, 1}, {1, 0}});
  const auto one = product_bmo_exact(single(s, R, 0.7));
  CHECK(one.value == doctest::Approx(4 * 0.49));
  CHECK(std::get<OpenSet>(one.witness) == OpenSet::from_rectangle(s, R));
  CHECK_THROWS_AS(product_bmo_exact(HaarExpansion(Shape::uniform(2, 3))), DomainError);
}

TEST_CASE("product_bmo_norm agrees with exhaustive search") {
  Rng rng(2024);
  for (int t = 0; t < 50; ++t) {
    const Shape s = Shape::uniform(2, 2);
    const auto e = random_expansion(s, rng);
    const auto flow = product_bmo_norm(e);
    const auto exact = product_bmo_exact(e);
    CHECK(std::abs(flow.value - exact.value) <= 1e-9 * std::max(1.0, exact.value));
    CHECK(std::abs(exact.value - oracle::product_bmo(e)) <= 1e-12 * std::max(1.0, exact.value));
    CHECK(evaluate_at_witness(NormKind::ProductBmo, e, flow) == doctest::Approx(flow.value).epsilon(1e-9));
  }
  for (int t = 0; t < 10; ++t) {
    const Shape s = Shape::uniform(1, 4);
    const auto e = random_bmo_expansion(s, rng);
    CHECK(product_bmo_norm(e).value == doctest::Approx(product_bmo_exact(e).value).epsilon(1e-9));
  }
  // Sparse instances exercise ties and empty regions.
  for (int t = 0; t < 20; ++t) {
    const Shape s({2, 2});
    auto e = random_expansion(s, rng, true);
    std::bernoulli_distribution keep(0.3);
    for (double& v : e.coeffs())
      if (!keep(rng)) v = 0.0;
    CHECK(product_bmo_norm(e).value == doctest::Approx(product_bmo_exact(e).value).epsilon(1e-9));
  }
}

TEST_CASE("product_bmo_norm picks the denser of two rectangles") {
  const Shape s = Shape::uniform(2, 2);
  const double c = 0.3;
  const DyadicRectangle A({{1, 0}, {1, 0}}), B({{1, 1}, {1, 1}});
  const auto e = single(s, A, 1.0 * c) + single(s, B, 0.5 * c);  // densities 4c^2 and c^2
  const auto flow = product_bmo_norm(e);
  const auto exact = product_bmo_exact(e);
  CHECK(flow.value == doctest::Approx(4 * c * c));
  CHECK(exact.value == doctest::Approx(4 * c * c));
  CHECK(std::get<OpenSet>(exact.witness) == OpenSet::from_rectangle(s, A));
  CHECK(std::get<OpenSet>(flow.witness) == OpenSet::from_rectangle(s, A));
}

TEST_CASE("product BMO ordering and monotonicity") {
  Rng rng(77);
  const Shape s = Shape::uniform(2, 3);
  for (int t = 0; t < 10; ++t) {
    const auto e = random_bmo_expansion(s, rng);
    const auto p = product_bmo_norm(e);
    const auto r = rect_bmo_norm(e);
    CHECK(r.value <= p.value * (1 + 1e-12));
    CHECK(evaluate_at_witness(NormKind::RectBmo, e, r) == doctest::Approx(r.value).epsilon(1e-9));
    // Single-rectangle densities are below the rectangular norm.
    for_each_index(s, [&](std::span<const std::int64_t> sl, std::size_t f) {
      if (is_pure(sl)) CHECK(e[f] * e[f] / rectangle_of(sl).area() <= r.value * (1 + 1e-12));
    });
    // Increasing one coefficient never lowers the norm.
    auto bigger = e;
    const std::size_t f = pure_indices(s)[static_cast<std::size_t>(t) % s.pure_size()];
    bigger[f] *= 1.5;
    CHECK(product_bmo_norm(bigger).value >= p.value * (1 - 1e-12));
  }
  CHECK(rect_bmo_norm(HaarExpansion(s)).value == 0.0);
  const DyadicRectangle R({{2, 1}, {0, 0}});
  CHECK(rect_bmo_norm(single(s, R, 2.0)).value == doctest::Approx(4.0 / R.area()));
}

TEST_CASE("product_bmo_norm_within") {
  Rng rng(8);
  const Shape s = Shape::uniform(2, 2);
  const auto e = random_expansion(s, rng);
  const DyadicRectangle R0({{1, 1}, {0, 0}});
  const auto rep = product_bmo_norm_within(e, R0);
  CHECK(rep.value == doctest::Approx(oracle::best_subset_ratio(e, oracle::cells_of(s, R0))).epsilon(1e-9));
  for (auto c : std::get<OpenSet>(rep.witness).cells()) {
    const auto cells = oracle::cells_of(s, R0);
    CHECK(std::count(cells.begin(), cells.end(), c) == 1);
  }
}

TEST_CASE("lmo_norm") {
  const Shape s = Shape::uniform(2, 2);
  const auto top = lmo_norm(HaarExpansion::haar(s, DyadicRectangle::torus(2)));
  CHECK(top.value == doctest::Approx(2.0));
  CHECK(std::get<GenerationWitness>(top.witness).levels == std::vector<int>{0, 0});
  CHECK(lmo_norm(HaarExpansion(s)).value == 0.0);

  Rng rng(5);
  for (int t = 0; t < 5; ++t) {
    const auto e = random_expansion(s, rng);
    const auto r = lmo_norm(e);
    CHECK(lmo_norm(-3.0 * e).value == doctest::Approx(3.0 * r.value).epsilon(1e-9));
    const std::vector<int> zero{0, 0};
    CHECK(r.value >= 2.0 * std::sqrt(product_bmo_norm(q_tail(e, zero)).value) * (1 - 1e-12));
    CHECK(evaluate_at_witness(NormKind::Lmo, e, r) == doctest::Approx(r.value).epsilon(1e-9));
    // Independent scan with the exhaustive product BMO.
    double scan = 0.0;
    for (int a = 0; a <= 2; ++a)
      for (int b = 0; b <= 2; ++b) {
        const std::vector<int> j{a, b};
        scan = std::max(scan, (a + b + 2) * std::sqrt(oracle::product_bmo(q_tail(e, j))));
      }
    CHECK(r.value == doctest::Approx(scan).epsilon(1e-9));
  }
}

TEST_CASE("lmo_axis_norm") {
  const Shape s = Shape::uniform(2, 2);
  CHECK(lmo_axis_norm(HaarExpansion(s), 0).value == 0.0);
  // Single coefficient at axis-0 level k: the scan peaks at i = k.
  for (int k = 0; k < 2; ++k) {
    const DyadicRectangle R({{k, 0}, {1, 1}});
    const auto e = single(s, R, 0.8);
    const auto r = lmo_axis_norm(e, 0);
    CHECK(r.value == doctest::Approx((k + 1) * 0.8 / std::sqrt(R.area())));
    CHECK(std::get<GenerationWitness>(r.witness).levels == std::vector<int>{k});
    CHECK(evaluate_at_witness(NormKind::LmoAxis, e, r) == doctest::Approx(r.value));
  }
  Rng rng(6);
  for (int t = 0; t < 5; ++t) {
    const auto e = random_expansion(s, rng);
    const double lmo = lmo_norm(e).value;
    double axis_max = 0.0;
    for (std::size_t a = 0; a < 2; ++a) axis_max = std::max(axis_max, lmo_axis_norm(e, a).value);
    // Each axis scan is dominated by the full scan: (i+1) <= i+0+N and Q^{(l)}_i contains Q_(i,0).
    CHECK(axis_max > 0.0);
    CHECK(lmo > 0.0);
  }
  CHECK_THROWS_AS(lmo_axis_norm(HaarExpansion(s), 2), DomainError);
}

TEST_CASE("lmo_beta_norm") {
  const double log4 = 2 * std::numbers::ln2;
  Rng rng(10);
  const Shape s = Shape::uniform(2, 2);
  for (int t = 0; t < 5; ++t) {
    const auto e = random_expansion(s, rng);
    const std::vector<int> ones{1, 1};
    const auto r = lmo_beta_norm(e, ones);
    CHECK(r.value == doctest::Approx(4 * log4 * log4 * product_bmo_norm(e).value).epsilon(1e-9));
  }
  const std::vector<int> d10{1, 0}, zero{0, 0};
  CHECK(lmo_beta_norm(HaarExpansion(s), d10).value == 0.0);

  // Exhaustive rectangle + subset enumeration.
  const auto oracle_beta = [&](const HaarExpansion& e, const std::vector<int>& delta) {
    double best = 0.0;
    for (const auto& R : oracle::all_rectangles(e.shape())) {
      double w = 0.0;
      for (std::size_t a = 0; a < 2; ++a) w += delta[a] ? log4 : std::log(4.0 / R[a].length());
      best = std::max(best, w * w * oracle::best_subset_ratio(e, oracle::cells_of(e.shape(), R)));
    }
    return best;
  };
  const auto hh = HaarExpansion::haar(s, DyadicRectangle({{1, 0}, {1, 1}}));
  const auto rb = lmo_beta_norm(hh, d10);
  CHECK(rb.value == doctest::Approx(oracle_beta(hh, d10)).epsilon(1e-9));
  CHECK(evaluate_at_witness(NormKind::LmoBeta, hh, rb, d10) == doctest::Approx(rb.value).epsilon(1e-9));

  const auto e = random_expansion(s, rng);
  const auto req = lmo_equiv_quantity(e);
  CHECK(req.value == doctest::Approx(oracle_beta(e, zero)).epsilon(1e-9));
  CHECK(lmo_beta_norm(e, d10).value == doctest::Approx(oracle_beta(e, d10)).epsilon(1e-9));
  CHECK(lmo_equiv_quantity(HaarExpansion(s)).value == 0.0);

  // Single coefficient: (log(4/|I|)+log(4/|J|))^2 |c|^2/|R| at R itself.
  const DyadicRectangle R({{1, 1}, {0, 0}});
  const auto one = single(s, R, 0.5);
  const double w = std::log(4 / 0.5) + std::log(4.0);
  CHECK(lmo_equiv_quantity(one).value == doctest::Approx(w * w * 0.25 / R.area()));
}

TEST_CASE("s_weight") {
  CHECK(s_weight(1.0) == 1.0);
  CHECK(s_weight(0.5) == doctest::Approx(std::log(2.0) + 1.0));
  CHECK(s_weight(4.0) == 1.0);
  CHECK_THROWS_AS(s_weight(0.0), DomainError);
}

TEST_CASE("NormReport JSON") {
  const Shape s = Shape::uniform(2, 2);
  const auto j = to_json(product_bmo_norm(HaarExpansion::haar(s, DyadicRectangle::torus(2))));
  CHECK(j["value"].get<double>() == doctest::Approx(1.0));
  CHECK(j["method"] == "MaxFlow");
  CHECK(j["witness"]["kind"] == "open_set");
  CHECK(j["witness"]["payload"]["cells"].size() == 16);
  const auto g = to_json(lmo_axis_norm(HaarExpansion(s), 1));
  CHECK(g["witness"]["payload"]["axis"] == 1);
  const auto r = to_json(rect_bmo_norm(HaarExpansion(s)));
  CHECK(r["witness"]["kind"] == "rectangle");
}
