#pragma once

// Bilinear Haar forms: the B_{eps,delta,beta} family, paraproducts, sigma_k, the two-parameter
// nine-term product decomposition, Cotlar band blocks and the partition operators.
//
// Every form here is a tensor product of one-dimensional channels. A channel pairs the symbol
// with h_I or with chi_I/|I| (i.e. takes the mean over I), does the same for the argument, and
// emits either h_I or chi_I/|I|. A scalar channel multiplies the argument by the symbol's
// constant component along that axis.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dyadic/signal.hpp"

namespace dyadic {

enum class Pairing { Haar, Average };
enum class Emit { Haar, Box };

struct AxisChannel {
  Pairing symbol = Pairing::Haar;
  Pairing argument = Pairing::Haar;
  Emit output = Emit::Haar;
  bool mean_only = false;  // scalar channel: symbol slot 0 times the argument, unchanged

  static AxisChannel pi() { return {Pairing::Haar, Pairing::Average, Emit::Haar, false}; }
  static AxisChannel delta() { return {Pairing::Haar, Pairing::Haar, Emit::Box, false}; }
  static AxisChannel r() { return {Pairing::Average, Pairing::Haar, Emit::Haar, false}; }
  static AxisChannel mean() { return {Pairing::Haar, Pairing::Haar, Emit::Haar, true}; }

  bool operator==(const AxisChannel&) const = default;
};

/// 0/1 sign vectors: eps selects the symbol pairing, delta the argument
/// pairing and beta the output (1 = chi_I/|I|).
struct SignSpec {
  std::vector<int> eps, delta, beta;

  /// eps = 0 and delta_j = 1 - beta_j: the paraproduct family.
  bool admissible() const;
  std::vector<AxisChannel> channels() const;
  static SignSpec paraproduct(std::vector<int> beta);
};

/// B(phi, f) for a channel per axis, as a grid function.
GridSignal bilinear_signal(std::span<const AxisChannel> channels, const HaarExpansion& phi, const HaarExpansion& f);
HaarExpansion bilinear_channels(std::span<const AxisChannel> channels, const HaarExpansion& phi, const HaarExpansion& f);
HaarExpansion bilinear_apply(const SignSpec& spec, const HaarExpansion& phi, const HaarExpansion& f);

/// Pi_phi f = sum_R phi_R m_R f h_R.
HaarExpansion pi_main(const HaarExpansion& phi, const HaarExpansion& f);
/// Delta(phi, f) = sum_R phi_R f_R chi_R/|R|.
HaarExpansion delta_form(const HaarExpansion& phi, const HaarExpansion& f);
/// Pi^beta for beta != 0.
HaarExpansion pi_beta(const HaarExpansion& phi, const HaarExpansion& f, std::span<const int> beta);

/// sigma_k^(l): levels < k on `axis` kept, level k receives the l2 mass of its subtree (same S),
/// finer levels dropped.
HaarExpansion sigma_op(const HaarExpansion& b, int k, std::size_t axis);

/// A symbol together with its channel pattern, applied to the second argument.
class BilinearOperator {
 public:
  BilinearOperator(std::string name, HaarExpansion symbol, std::vector<AxisChannel> channels);

  const std::string& name() const { return name_; }
  const std::vector<AxisChannel>& channels() const { return channels_; }
  const HaarExpansion& symbol() const { return symbol_; }

  HaarExpansion apply(const HaarExpansion& f) const;
  GridSignal apply_signal(const HaarExpansion& f) const;

 private:
  std::string name_;
  HaarExpansion symbol_;
  std::vector<AxisChannel> channels_;
  std::vector<double> paired_symbol_;  // symbol after the per-axis pairing transforms
};

/// Pi, Delta, Pi^(0,1), Pi^(1,0), R_Delta, R_Pi, Delta_R, Pi_R, R_R (name X_Y: X on axis 1, Y on
/// axis 2), all with symbol Q_0 phi. Requires two parameters.
std::vector<BilinearOperator> nine_terms(const HaarExpansion& phi);
/// The patterns with a scalar channel on at least one axis; each takes the component of phi that is
/// constant exactly on its scalar axes. Together with nine_terms they sum to M_phi.
std::vector<BilinearOperator> mean_channel_terms(const HaarExpansion& phi);
/// All 4^N channel patterns; their sum applied to b is the pointwise product phi*b.
std::vector<BilinearOperator> product_channels(const HaarExpansion& phi);

/// Levels [2^M - 1, 2^(M+1) - 2] intersected with [0, J) on `axis`.
std::pair<int, int> cotlar_band(int M, int depth);
/// Number of nonempty bands at this depth.
int cotlar_band_count(int depth);
/// Keeps pure coefficients whose `axis` level lies in band M.
HaarExpansion band_projection(const HaarExpansion& f, int M, std::size_t axis);

/// Disjoint axis sets covering all axes.
struct PartitionSpec {
  std::vector<std::size_t> j1, j2, j3;
  void validate(std::size_t n_params) const;
  std::vector<AxisChannel> channels(std::size_t n_params) const;
};

/// Pi^J_phi b: Pi on J1, Delta on J2, R on J3.
HaarExpansion pi_partition(const HaarExpansion& phi, const HaarExpansion& b, const PartitionSpec& spec);

}  // namespace dyadic
