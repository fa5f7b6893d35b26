#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dyadic/haar.hpp"
#include "dyadic/norms.hpp"
#include "dyadic/opnorm.hpp"
#include "dyadic/paraproducts.hpp"
#include "dyadic/random.hpp"

using namespace dyadic;

namespace {

Eigen::MatrixXd random_matrix(int r, int c, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> n;
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("coordinates round trip") {
  const Shape s = Shape::uniform(2, 2);
  Rng rng(3);
  const auto e = random_expansion(s, rng);
  CHECK(space_dim(s, Space::Full) == 16);
  CHECK(space_dim(s, Space::Pure) == 9);
  const auto full = to_coords(e, Space::Full);
  CHECK((from_coords(s, full, Space::Full) - e).norm2_squared() == doctest::Approx(0.0));
  const auto pure = to_coords(e, Space::Pure);
  const auto back = from_coords(s, pure, Space::Pure);
  CHECK(back[0] == 0.0);
  CHECK(to_coords(back, Space::Pure) == pure);
}

TEST_CASE("l2_opnorm on explicit matrices") {
  CHECK(l2_opnorm(OperatorHandle::from_matrix(Eigen::MatrixXd::Identity(7, 7))) == doctest::Approx(1.0));

  Eigen::VectorXd u = random_matrix(6, 1, 1).col(0), v = random_matrix(9, 1, 2).col(0);
  const Eigen::MatrixXd rank1 = u * v.transpose();
  CHECK(l2_opnorm(OperatorHandle::from_matrix(rank1)) == doctest::Approx(u.norm() * v.norm()).epsilon(1e-12));

  const Eigen::MatrixXd m = random_matrix(50, 50, 5);
  const double ref = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
  CHECK(l2_opnorm(OperatorHandle::from_matrix(m)) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(l2_opnorm(OperatorHandle::from_matrix(m), 1, 0) == doctest::Approx(ref).epsilon(1e-8));

  const Eigen::MatrixXd w = random_matrix(12, 30, 9);
  const auto op = OperatorHandle::from_matrix(w);
  CHECK(l2_opnorm(op) == doctest::Approx(l2_opnorm(adjoint_of(op))).epsilon(1e-12));
  CHECK(l2_opnorm(op, 4, 0) == doctest::Approx(l2_opnorm(op)).epsilon(1e-8));
}

TEST_CASE("paraproduct operator adjoint") {
  const Shape s = Shape::uniform(2, 3);
  Rng rng(11);
  const auto psi = random_expansion(s, rng);
  for (Space sp : {Space::Full, Space::Pure}) {
    const auto op = paraproduct_operator(psi, sp);
    const std::size_t d = space_dim(s, sp);
    for (int t = 0; t < 5; ++t) {
      std::vector<double> x(d), y(d);
      std::normal_distribution<double> n;
      for (auto& v : x) v = n(rng);
      for (auto& v : y) v = n(rng);
      CHECK(dot(op.apply(x), y) == doctest::Approx(dot(x, op.adjoint(y))).epsilon(1e-12));
    }
    const Eigen::MatrixXd m = dense_matrix(op);
    CHECK((m.transpose() - dense_matrix(adjoint_of(op))).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("paraproduct operator norm dominates the paraproduct symbol size") {
  const Shape s = Shape::uniform(2, 3);
  Rng rng(12);
  const auto psi = random_expansion(s, rng, true);
  const double n = l2_opnorm(paraproduct_operator(psi, Space::Full));
  CHECK(n > 0.0);
  CHECK(l2_opnorm(paraproduct_operator(HaarExpansion(s), Space::Full)) == 0.0);
  // Pi_psi 1 = psi, and 1 has unit L^2 norm.
  CHECK(n >= std::sqrt(psi.norm2_squared()) - 1e-12);
}

TEST_CASE("write_matrix_csv") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 0, 0.5, -2;
  std::ostringstream os;
  write_matrix_csv(os, m);
  const auto text = os.str();
  CHECK(text.rfind("row,col,value\n", 0) == 0);
  CHECK(text.find("1,0,0.5") != std::string::npos);
}

TEST_CASE("lower bound search") {
  const Shape s = Shape::uniform(2, 2);
  SUBCASE("zero symbol") {
    const auto r = bmo_to_bmo_lower_bound(HaarExpansion(s), 10, 1);
    CHECK(r.lower_bound == 0.0);
    CHECK(r.ratio == 0.0);
  }
  const auto [id, phi] = ensemble_symbol(EnsembleSpec{}, 1, 2);
  SUBCASE("budget monotone and deterministic") {
    double prev = 0.0;
    for (std::size_t budget : {1, 4, 12, 30}) {
      const auto r = bmo_to_bmo_lower_bound(phi, budget, 7);
      CHECK(r.lower_bound >= prev);
      CHECK(r.evaluations == budget);
      prev = r.lower_bound;
    }
    const auto a = bmo_to_bmo_lower_bound(phi, 20, 7), b = bmo_to_bmo_lower_bound(phi, 20, 7);
    CHECK(a.lower_bound == b.lower_bound);
    CHECK(a.witness_family == b.witness_family);
  }
  SUBCASE("witness re-evaluates") {
    const auto r = bmo_to_bmo_lower_bound(phi, 20, 7);
    REQUIRE(r.lower_bound > 0.0);
    CHECK(lower_bound_ratio(phi, r.witness) == doctest::Approx(r.lower_bound).epsilon(1e-9));
    CHECK(r.ratio == doctest::Approx(r.lmo_norm / r.lower_bound));
  }
}

TEST_CASE("ensemble symbols extend across depths") {
  const EnsembleSpec spec;
  for (std::size_t i = 0; i < 6; ++i) {
    const auto [id2, a] = ensemble_symbol(spec, i, 2);
    const auto [id3, b] = ensemble_symbol(spec, i, 3);
    CHECK(id2 == id3);
    CHECK(a.norm2_squared() > 0.0);
    // Every coefficient at depth 2 reappears at depth 3.
    for_each_index(a.shape(), [&](std::span<const std::int64_t> sl, std::size_t f) {
      CHECK(b[b.shape().flat(sl)] == doctest::Approx(a[f]));
    });
  }
}

TEST_CASE("sigma equality") {
  const Shape s = Shape::uniform(2, 3);
  Rng rng(21);
  for (int t = 0; t < 3; ++t) {
    const auto b = random_expansion(s, rng);
    for (std::size_t axis = 0; axis < 2; ++axis)
      for (int k = 0; k < 3; ++k) {
        const auto [lhs, rhs] = sigma_norms(b, k, axis);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
      }
  }
}

TEST_CASE("cotlar blocks sum to the full operator") {
  const Shape s = Shape::uniform(2, 3);
  Rng rng(31);
  const auto phi = random_bmo_expansion(s, rng), b = random_expansion(s, rng);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(s.size(), s.size());
  for (int M = 0; M < cotlar_band_count(3); ++M) sum += dense_matrix(cotlar_block(phi, b, M));
  const auto full = dense_matrix(paraproduct_operator(pi_main(phi, b), Space::Full));
  // Bands cover every pure level on axis 0; the Mean slot is the only gap.
  const auto mean_only = filter_operator(s, Space::Full, [](std::span<const std::int64_t> sl) { return sl[0] == 0; });
  const auto rest = dense_matrix(compose(paraproduct_operator(pi_main(phi, b), Space::Full), mean_only));
  CHECK((sum + rest - full).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("spread") {
  const std::vector<double> v{2.0, 4.0, 3.0};
  CHECK(spread(v) == doctest::Approx(2.0));
  const std::vector<double> z{1.0, 0.0};
  CHECK(spread(z) == 0.0);
}
