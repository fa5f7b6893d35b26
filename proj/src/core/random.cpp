#include "dyadic/random.hpp"

#include <cmath>

namespace dyadic {

GridSignal random_signal(const Shape& shape, Rng& rng) {
  std::normal_distribution<double> g;
  GridSignal s(shape);
  for (double& v : s.values()) v = g(rng);
  return s;
}

HaarExpansion random_expansion(const Shape& shape, Rng& rng, bool pure_only) {
  std::normal_distribution<double> g;
  HaarExpansion e(shape);
  for_each_index(shape, [&](std::span<const std::int64_t> s, std::size_t f) {
    const double v = g(rng);
    if (!pure_only || is_pure(s)) e[f] = v;
  });
  return e;
}

HaarExpansion random_bmo_expansion(const Shape& shape, Rng& rng) {
  std::normal_distribution<double> g;
  HaarExpansion e(shape);
  for_each_index(shape, [&](std::span<const std::int64_t> s, std::size_t f) {
    const double v = g(rng);
    if (is_pure(s)) e[f] = v * std::sqrt(rectangle_of(s).area());
  });
  return e;
}

}  // namespace dyadic
