#pragma once

// Dyadic shifts S h_I = h_{I+} - h_{I-}, iterated commutators, logarithmic test functions and
// shifts relative to translated and dilated grids.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dyadic/paraproducts.hpp"
#include "dyadic/signal.hpp"

namespace dyadic {

struct CommutatorResult {
  HaarExpansion output;
  bool truncated = false;  // some nonzero finest-level coefficient was dropped by a shift
};

/// S along `axis`: Mean components map to zero, finest-level ones are annihilated.
CommutatorResult shift_apply(const HaarExpansion& exp, std::size_t axis);

using LinearMap = std::function<HaarExpansion(const HaarExpansion&)>;

/// [S^(a1), [S^(a2), ... [S^(ak), A] ...]] b for distinct axes.
CommutatorResult nested_commutator(const LinearMap& A, const HaarExpansion& b, std::span<const std::size_t> axes);

/// The nested commutator with A = multiplication by phi (pointwise product of the syntheses).
CommutatorResult iterated_commutator(const HaarExpansion& phi, const HaarExpansion& b,
                                     std::span<const std::size_t> axes);

/// [[[S^(aK), Pi^J_phi], S^(a(K-1))], ..., S^(a1)] b with a1 < ... < aK the axes of J1 and J3.
CommutatorResult partition_commutator(const HaarExpansion& phi, const HaarExpansion& b, const PartitionSpec& spec);

/// The four-grandchild combination h_{Q-+} - h_{Q--} - h_{Q++} + h_{Q+-} applied on every axis in
/// `axes` to the pure coefficients of f.
HaarExpansion grandchild_transform(const HaarExpansion& f, std::span<const std::size_t> axes);

struct AppendixCheck {
  double error_shifted = 0.0;   // exponent = number of shifted axes (N1 + N3)
  double error_alternate = 0.0; // exponent = N1 + N2
  double lhs_sup = 0.0;         // sup norm of the commutator
  double best_scale = 0.0;      // least-squares c in lhs ~ c * Delta(phi~, b~)
  double best_residual = 0.0;   // relative L2 residual at best_scale
};

/// Compares the commutator of Pi^J with (1/(2 sqrt 2))^e Delta(phi~, b~) in sup norm. Requires
/// every shifted-axis level of phi and b to be at most J-3 so that nothing is truncated.
AppendixCheck appendix_identity_check(const HaarExpansion& phi, const HaarExpansion& b, const PartitionSpec& spec);

/// partition_commutator evaluated rectangle by rectangle: each term of Pi^J is a tensor product of
/// rank-one maps and the commutator acts on the shifted factors only.
HaarExpansion partition_commutator_expansion(const HaarExpansion& phi, const HaarExpansion& b,
                                             const PartitionSpec& spec);

/// sup norm of partition_commutator - partition_commutator_expansion.
double corrected_identity_check(const HaarExpansion& phi, const HaarExpansion& b, const PartitionSpec& spec);

/// log(4 / max(|I|, dist(t, c_I))) at cell centers, circle distance. One parameter.
GridSignal log_test_1d(const DyadicInterval& I, int depth);
/// sum_j log_{R_j}(t_j).
GridSignal log_test_rect(const DyadicRectangle& R, const Shape& shape);

/// A translated and dilated dyadic grid per axis: translation sum_i alpha_i 2^-i (i = 1..J) and
/// dilation r = 1 + k 2^-J with 0 <= k < 2^J.
struct AxisGrid {
  std::vector<int> alpha;
  std::int64_t r_steps = 0;

  double translation() const;
  double dilation() const;
  bool operator==(const AxisGrid&) const = default;
};

struct GridSpec {
  std::vector<AxisGrid> axes;

  static GridSpec standard(const Shape& shape);
  void validate(const Shape& shape) const;
  bool operator==(const GridSpec&) const = default;
};

/// alpha uniform, r log-uniform on [1, 2) rounded down to the grid of representable values.
GridSpec sample_grid(const Shape& shape, std::uint64_t seed);

/// Haar analysis of sig relative to the grid, in window coordinates: the window [tau, tau + r)
/// is cut into 2^J cells whose values are the exact means of the periodic signal.
HaarExpansion shift_on_grid(const GridSignal& sig, const GridSpec& spec);
/// Back to T^N: each point takes the average of the window function over its periodic
/// representatives inside the window.
GridSignal grid_synthesis(const HaarExpansion& window_exp, const GridSpec& spec);
/// S relative to the grid along `axis`.
GridSignal grid_shift(const GridSignal& sig, const GridSpec& spec, std::size_t axis);

/// 8 ln 2 / pi: the one-parameter prefactor with r averaged against dr/r.
double shift_average_prefactor();

/// Experimental. prefactor * (1/samples) sum_i grid_shift(sig, g_i), g_i = sample_grid(derive_seed(seed, i)).
GridSignal monte_carlo_shift_average(const GridSignal& sig, std::size_t samples, std::uint64_t seed);

}  // namespace dyadic
