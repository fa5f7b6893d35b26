#pragma once

// Haar analysis/synthesis, means, martingale projections and the square function.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dyadic/geometry.hpp"
#include "dyadic/signal.hpp"

namespace dyadic {

HaarExpansion haar_forward(const GridSignal& sig);
GridSignal haar_inverse(const HaarExpansion& exp);

/// (1/|R|) * integral of sig over R; R may go down to single cells.
double rect_mean(const GridSignal& sig, const DyadicRectangle& R);

/// A dyadic rectangle in a subset of the axes.
struct PartialRectangle {
  std::vector<std::size_t> axes;
  std::vector<DyadicInterval> sides;   // one per entry of `axes`
};

/// m_Q sig as a function of the axes not in Q.
GridSignal partial_mean(const GridSignal& sig, const PartialRectangle& Q);

/// Delta_j: pure coefficients whose levels equal j exactly. Entries of j in [0, depth].
HaarExpansion delta_block(const HaarExpansion& exp, std::span<const int> j);
/// E_j: coefficients whose axis-l index is Mean or has level < j_l on every axis.
HaarExpansion expectation(const HaarExpansion& exp, std::span<const int> j);
/// Q_j: pure coefficients with level >= j_l on every axis.
HaarExpansion q_tail(const HaarExpansion& exp, std::span<const int> j);
/// E^(l)_k: filters on axis l only; Mean counts as coarser than every level.
HaarExpansion axis_expectation(const HaarExpansion& exp, std::size_t axis, int k);
/// Q^(l)_k: axis-l index is an Interval of level >= k.
HaarExpansion axis_q_tail(const HaarExpansion& exp, std::size_t axis, int k);

/// P_Omega: keeps pure coefficients with R inside Omega, drops everything else.
HaarExpansion project_open_set(const HaarExpansion& exp, const OpenSet& omega);

/// (sum_R chi_R/|R| |f_R|^2)^(1/2) over pure rectangles, sampled on the grid.
GridSignal square_function(const HaarExpansion& exp);

GridSignal pointwise_product(const GridSignal& a, const GridSignal& b);

/// Keep the coefficients whose slot multi-index satisfies `keep`.
HaarExpansion filter_coefficients(const HaarExpansion& exp,
                                  const std::function<bool(std::span<const std::int64_t>)>& keep);

/// Level of a slot: -1 for Mean.
inline int slot_level(std::int64_t slot) {
  if (slot == 0) return -1;
  int l = 0;
  while ((std::int64_t{2} << l) <= slot) ++l;
  return l;
}

namespace line {
// One-dimensional kernels on a line of n = 2^J values. "cells" are grid values, "slots" are
// heap-indexed interval labels with slot 0 reserved for the constant.

/// cells -> Haar coefficients (slot 0: mean).
void analyze(std::span<const double> cells, std::span<double> slots);
/// Haar coefficients -> cells.
void synthesize(std::span<const double> slots, std::span<double> cells);
/// cells -> interval means m_I for level(I) < J (slot 0: global mean).
void average(std::span<const double> cells, std::span<double> slots);
/// interval weights d_I -> cells of sum_I d_I chi_I/|I| (slot 0 ignored).
void spread(std::span<const double> slots, std::span<double> cells);
/// cells -> means over every interval of level 0..J; output has 2n slots, slot 0 unused.
void pyramid(std::span<const double> cells, std::span<double> slots);
}  // namespace line

/// Apply a line kernel along `axis`; the output extent along that axis is `out_extent`.
std::vector<double> transform_axis(const Shape& shape, std::span<const double> data, std::size_t axis,
                                   std::size_t out_extent,
                                   const std::function<void(std::span<const double>, std::span<double>)>& kernel);

/// Means of sig over every dyadic rectangle with levels 0..depth per axis. Indexed on
/// shape.deepened(1) by per-axis heap slots (slot 0 unused).
std::vector<double> mean_pyramid(const GridSignal& sig);

}  // namespace dyadic
