#pragma once

// Oscillation norms: little bmo, product BMO (exhaustive and min-cut), rectangular BMO and the
// logarithmic mean oscillation family.
//
// Scale conventions: product_bmo_norm, rect_bmo_norm, lmo_beta_norm and lmo_equiv_quantity
// report squared quantities (sums of |f_R|^2 over |Omega|). lmo_norm and lmo_axis_norm use the
// square root of the product BMO density so that they are homogeneous of degree one. bmo_norm
// is the L1 mean oscillation. See docs/conventions.md.

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dyadic/geometry.hpp"
#include "dyadic/signal.hpp"

namespace dyadic {

enum class NormMethod { Exhaustive, MaxFlow, GenerationScan };

struct GenerationWitness {
  std::vector<int> levels;
  std::optional<std::size_t> axis;  // set for the single-axis LMO scan

  bool operator==(const GenerationWitness&) const = default;
};

using NormWitness = std::variant<DyadicRectangle, OpenSet, GenerationWitness>;

struct NormReport {
  double value = 0.0;
  NormMethod method = NormMethod::Exhaustive;
  NormWitness witness;
};

std::string to_string(NormMethod m);
nlohmann::json to_json(const NormReport& r);

/// sup over dyadic rectangles (levels 0..J, T factors included) of (1/|R|) int_R |f - m_R f|.
NormReport bmo_norm(const GridSignal& sig);
NormReport bmo_norm(const HaarExpansion& exp);
/// bmo_norm + |integral|: a norm rather than a seminorm, used to normalize test functions.
double bmo_full_norm(const GridSignal& sig);

/// (1/|Omega|) sum_{R subset Omega} |f_R|^2 over pure rectangles; 0 for empty Omega.
double open_set_ratio(const HaarExpansion& exp, const OpenSet& omega);

/// Brute force over all nonempty cell subsets (at most 20 cells).
NormReport product_bmo_exact(const HaarExpansion& exp);
/// Dinkelbach iteration with a min-cut inner step.
NormReport product_bmo_norm(const HaarExpansion& exp);
/// Same supremum restricted to open sets inside R0; the witness lives on the full grid.
NormReport product_bmo_norm_within(const HaarExpansion& exp, const DyadicRectangle& R0);

/// sup over dyadic rectangles R of (1/|R|) sum_{Q subset R} |f_Q|^2.
NormReport rect_bmo_norm(const HaarExpansion& exp);

/// max over j in [0,J]^N of (j_1+...+j_N+N) * sqrt(product_bmo_norm(Q_j exp)).
NormReport lmo_norm(const HaarExpansion& exp);
/// max over i in [0,J] of (i+1) * sqrt(product_bmo_norm(axis_q_tail(exp, axis, i))).
NormReport lmo_axis_norm(const HaarExpansion& exp, std::size_t axis);

/// sup over R and Omega subset R of W(R)^2/|Omega| sum_{Q subset Omega} |f_Q|^2 with
/// W(R) = sum_j log(4/|R_j|) over axes with delta_j = 0 plus log 4 for each delta_j = 1.
NormReport lmo_beta_norm(const HaarExpansion& exp, std::span<const int> delta);
/// lmo_beta_norm with delta = 0.
NormReport lmo_equiv_quantity(const HaarExpansion& exp);
/// The lmo_beta objective at a given open set, with R the enclosing rectangle of Omega.
double lmo_beta_objective(const HaarExpansion& exp, std::span<const int> delta, const OpenSet& omega);

/// log(1/length) + 1 for length <= 1, else 1.
double s_weight(double length);

/// Re-evaluates the objective of `which` at the report's witness.
enum class NormKind { Bmo, ProductBmo, RectBmo, Lmo, LmoAxis, LmoBeta };
double evaluate_at_witness(NormKind which, const HaarExpansion& exp, const NormReport& r,
                           std::span<const int> delta = {});

}  // namespace dyadic
