#include <cmath>
#include <random>

#include "dyadic/haar.hpp"
#include "dyadic/random.hpp"
#include "dyadic/shifts.hpp"

namespace dyadic {

namespace {

using Matrix = std::vector<std::vector<double>>;

/// Length of [a0, a1) intersected with [b0, b1).
double overlap(double a0, double a1, double b0, double b1) { return std::max(0.0, std::min(a1, b1) - std::max(a0, b0)); }

/// Window cell k <- mean of the periodic signal over [tau + r k/n, tau + r (k+1)/n).
Matrix sampling_matrix(const AxisGrid& g, std::size_t n) {
  const double tau = g.translation(), r = g.dilation(), dn = static_cast<double>(n);
  Matrix m(n, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    const double x0 = tau + r * static_cast<double>(k) / dn, x1 = tau + r * static_cast<double>(k + 1) / dn;
    for (int p = 0; p <= 3; ++p)
      for (std::size_t c = 0; c < n; ++c) {
        const double c0 = p + static_cast<double>(c) / dn;
        m[k][c] += overlap(x0, x1, c0, c0 + 1.0 / dn) / (x1 - x0);
      }
  }
  return m;
}

/// Original cell c <- average over periodic representatives of the window function.
Matrix synthesis_matrix(const AxisGrid& g, std::size_t n) {
  const double tau = g.translation(), r = g.dilation(), dn = static_cast<double>(n);
  Matrix m(n, std::vector<double>(n, 0.0));
  for (std::size_t c = 0; c < n; ++c) {
    double reps = 0.0;
    for (int p = 0; p <= 3; ++p) {
      const double c0 = p + static_cast<double>(c) / dn, c1 = c0 + 1.0 / dn;
      const double inside = overlap(c0, c1, tau, tau + r);
      if (inside <= 0.0) continue;
      reps += inside * dn;
      for (std::size_t k = 0; k < n; ++k) {
        const double x0 = tau + r * static_cast<double>(k) / dn, x1 = tau + r * static_cast<double>(k + 1) / dn;
        m[c][k] += overlap(c0, c1, x0, x1) * dn;
      }
    }
    for (auto& v : m[c]) v /= reps;
  }
  return m;
}

std::vector<double> apply_axis(const Shape& shape, std::span<const double> data, std::size_t axis, const Matrix& m) {
  return transform_axis(shape, data, axis, shape.extent(axis), [&](std::span<const double> in, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < in.size(); ++j) acc += m[i][j] * in[j];
      out[i] = acc;
    }
  });
}

}  // namespace

double AxisGrid::translation() const {
  double t = 0.0, w = 0.5;
  for (int a : alpha) {
    t += a * w;
    w *= 0.5;
  }
  return t;
}

double AxisGrid::dilation() const { return 1.0 + std::ldexp(static_cast<double>(r_steps), -static_cast<int>(alpha.size())); }

GridSpec GridSpec::standard(const Shape& shape) {
  GridSpec g;
  for (std::size_t a = 0; a < shape.n_params(); ++a) g.axes.push_back({std::vector<int>(shape.depth(a), 0), 0});
  return g;
}

void GridSpec::validate(const Shape& shape) const {
  if (axes.size() != shape.n_params()) throw ShapeError("grid spec needs one entry per axis");
  for (std::size_t a = 0; a < axes.size(); ++a) {
    const auto& g = axes[a];
    if (g.alpha.size() != static_cast<std::size_t>(shape.depth(a)))
      throw DomainError("alpha must have exactly J bits on axis " + std::to_string(a));
    for (int bit : g.alpha)
      if (bit != 0 && bit != 1) throw DomainError("alpha entries must be 0 or 1");
    if (g.r_steps < 0 || g.r_steps >= (std::int64_t{1} << shape.depth(a)))
      throw DomainError("dilation outside [1, 2) on axis " + std::to_string(a));
  }
}

GridSpec sample_grid(const Shape& shape, std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GridSpec g;
  for (std::size_t a = 0; a < shape.n_params(); ++a) {
    AxisGrid ax;
    for (int i = 0; i < shape.depth(a); ++i) ax.alpha.push_back(coin(rng) ? 1 : 0);
    const double r = std::exp2(u(rng));
    ax.r_steps = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(std::ldexp(r - 1.0, shape.depth(a)))),
                                        (std::int64_t{1} << shape.depth(a)) - 1);
    g.axes.push_back(std::move(ax));
  }
  return g;
}

HaarExpansion shift_on_grid(const GridSignal& sig, const GridSpec& spec) {
  const Shape& shape = sig.shape();
  spec.validate(shape);
  std::vector<double> data(sig.values().begin(), sig.values().end());
  for (std::size_t a = 0; a < shape.n_params(); ++a)
    data = apply_axis(shape, data, a, sampling_matrix(spec.axes[a], shape.extent(a)));
  return haar_forward(GridSignal(shape, std::move(data)));
}

GridSignal grid_synthesis(const HaarExpansion& window_exp, const GridSpec& spec) {
  const Shape& shape = window_exp.shape();
  spec.validate(shape);
  const auto w = haar_inverse(window_exp);
  std::vector<double> data(w.values().begin(), w.values().end());
  for (std::size_t a = 0; a < shape.n_params(); ++a)
    data = apply_axis(shape, data, a, synthesis_matrix(spec.axes[a], shape.extent(a)));
  return GridSignal(shape, std::move(data));
}

GridSignal grid_shift(const GridSignal& sig, const GridSpec& spec, std::size_t axis) {
  return grid_synthesis(shift_apply(shift_on_grid(sig, spec), axis).output, spec);
}

GridSignal monte_carlo_shift_average(const GridSignal& sig, std::size_t samples, std::uint64_t seed) {
  if (sig.n_params() != 1) throw ShapeError("the shift average is one-parameter");
  if (samples == 0) throw DomainError("at least one sample required");
  GridSignal acc(sig.shape());
  for (std::size_t i = 0; i < samples; ++i) {
    const auto s = grid_shift(sig, sample_grid(sig.shape(), derive_seed(seed, i)), 0);
    for (std::size_t c = 0; c < acc.shape().size(); ++c) acc[c] += s[c];
  }
  const double w = shift_average_prefactor() / static_cast<double>(samples);
  for (std::size_t c = 0; c < acc.shape().size(); ++c) acc[c] *= w;
  return acc;
}

}  // namespace dyadic
