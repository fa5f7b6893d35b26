#pragma once

// Operator norms on L^2 coefficient spaces, the bmo -> BMO lower-bound search and the numerical
// suites built on them (sigma equality, core lemma scans, growth scans, Cotlar blocks).

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dyadic/shifts.hpp"
#include "dyadic/signal.hpp"

namespace dyadic {

/// Coordinates of an operator: pure coefficients only (L^2_0) or every slot (L^2).
enum class Space { Pure, Full };

std::size_t space_dim(const Shape& shape, Space space);
std::vector<double> to_coords(const HaarExpansion& e, Space space);
HaarExpansion from_coords(const Shape& shape, std::span<const double> x, Space space);

/// A linear map between coordinate spaces together with its adjoint.
struct OperatorHandle {
  std::size_t domain_dim = 0, range_dim = 0;
  std::function<std::vector<double>(std::span<const double>)> apply, adjoint;

  static OperatorHandle from_matrix(Eigen::MatrixXd m);
};

/// Wraps expansion-level maps; the adjoint must be the true L^2 adjoint on these coordinates.
OperatorHandle expansion_operator(const Shape& shape, Space space, LinearMap apply, LinearMap adjoint);
OperatorHandle compose(const OperatorHandle& a, const OperatorHandle& b);  // a after b
OperatorHandle adjoint_of(const OperatorHandle& a);

/// f -> Pi_psi f with adjoint g -> Delta(psi, g).
OperatorHandle paraproduct_operator(const HaarExpansion& psi, Space space);
/// A coefficient filter as a self-adjoint projection.
OperatorHandle filter_operator(const Shape& shape, Space space,
                               const std::function<bool(std::span<const std::int64_t>)>& keep);

Eigen::MatrixXd dense_matrix(const OperatorHandle& op);

/// Largest singular value: dense SVD when both dimensions are at most `dense_limit`, otherwise
/// power iteration on T*T (relative tolerance 1e-10) that throws NumericError past `max_iter`.
double l2_opnorm(const OperatorHandle& op, std::uint64_t seed = 0x5eed, std::size_t dense_limit = 4096,
                 std::size_t max_iter = 20000);

/// (row, col, value) lines with a header.
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m);

/// sqrt(product_bmo_norm(Pi_phi b)) / bmo_full_norm(b); 0 when b is constant.
double lower_bound_ratio(const HaarExpansion& phi, const HaarExpansion& b);

struct EquivalenceRecord {
  std::string symbol_id;
  int depth = 0;
  double lmo_norm = 0.0;
  double lower_bound = 0.0;       // best certified value over all candidates
  double log_family_bound = 0.0;  // best over the log_R candidates only
  double ratio = 0.0;             // lmo_norm / lower_bound (0 when the bound vanishes)
  double lmo_equiv = 0.0;         // lmo_equiv_quantity, filled by the experiment
  HaarExpansion witness;
  std::string witness_family;  // "log", "random" or "refine"
  std::size_t evaluations = 0;
};

/// Candidates in a fixed order that does not depend on the budget: the log_R functions
/// interleaved with random bmo-scale expansions, then random draws alternating with coordinate
/// ascent from the current best. The first `budget` candidates are evaluated.
EquivalenceRecord bmo_to_bmo_lower_bound(const HaarExpansion& phi, std::size_t budget, std::uint64_t seed);

struct EnsembleSpec {
  std::size_t n_params = 2;
  std::size_t members = 30;
  std::uint64_t seed = 1;
};

/// Member `index` of the symbol ensemble at the given depth. Coefficients are drawn per rectangle
/// from (seed, index, rectangle), so deeper grids extend the same symbol. Kinds cycle through
/// "coarse" (levels <= 1), "decay" (|R|^(1/2) (sum k + N)^(-3/2) weights) and "single".
std::pair<std::string, HaarExpansion> ensemble_symbol(const EnsembleSpec& spec, std::size_t index, int depth);

struct DepthBand {
  int depth = 0;
  double min_ratio = 0.0, max_ratio = 0.0;
  double necessity_constant = 0.0;  // max over symbols of sqrt(lmo_equiv) / log_family_bound
};

struct EquivalenceTable {
  std::vector<EquivalenceRecord> records;
  std::vector<DepthBand> bands;
};

EquivalenceTable equivalence_experiment(const EnsembleSpec& spec, std::span<const int> depths, std::size_t budget,
                                        std::uint64_t seed);

/// ||Pi_b E_k^(l)|| and ||Pi_{sigma_k b}|| on L^2 (Full coordinates).
std::pair<double, double> sigma_norms(const HaarExpansion& b, int k, std::size_t axis);

struct ScanResult {
  double constant = 0.0;  // max ratio over the scan
  std::string worst;      // the (phi, b, k, j) tuple attaining it
};

struct DepthScan {
  int depth = 0;
  ScanResult core2, core2bis, core2one;
};

struct CoreLemmaReport {
  double sigma_max_rel_dev = 0.0;
  std::size_t sigma_cases = 0;
  std::vector<std::string> failures;
  std::vector<DepthScan> scans;
};

struct SuiteConfig {
  std::size_t n_params = 2;
  std::vector<int> depths{2, 3, 4};
  std::size_t samples = 4;
  std::size_t sigma_samples = 20;
  int sigma_depth = 3;
};

CoreLemmaReport core_lemma_suite(const SuiteConfig& cfg, std::uint64_t seed);

/// T_M = Pi_{Pi(phi, b)} P_M with P_M the Cotlar band on axis 0.
OperatorHandle cotlar_block(const HaarExpansion& phi, const HaarExpansion& b, int M);

struct CotlarDepth {
  int depth = 0;
  double fitted_constant = 0.0;  // max ||T_M* T_M'|| 2^|M-M'| / (lmo_axis^2 ||b||^2)
  double max_cross_product = 0.0; // max entry of T_M T_M'^* over M != M'
  std::size_t blocks = 0;
};

/// Decay-kind ensemble symbols against b = 1 and a random bmo-scale b nested across depths.
std::vector<CotlarDepth> cotlar_decay_suite(const SuiteConfig& cfg, std::uint64_t seed);

struct GrowthDepth {
  int depth = 0;
  double mean_bound = 0.0;    // |m_R b| / ((k + 1) ||b||), k the smallest level of R
  double local_l2 = 0.0;      // ||chi_R b||^2 / (|R| (k + 1)^2 ||b||^2)
  double projected = 0.0;     // ||chi_R P_T b||^2 / (|R| |T| ||b||^2)
};

/// Scans random bmo-scale b and the log_R family over all rectangles.
std::vector<GrowthDepth> growth_lemma_suite(const SuiteConfig& cfg, std::uint64_t seed);

struct CommutatorDepth {
  int depth = 0;
  double max_value = 0.0;  // product_bmo_norm of the commutator output, lmo(phi) = bmo(b) = 1
  bool truncated = false;
};

std::vector<CommutatorDepth> commutator_bound_scan(const SuiteConfig& cfg, std::uint64_t seed);

/// max / min over the entries; 0 when some entry is 0.
double spread(std::span<const double> values);

nlohmann::json to_json(const EquivalenceRecord& r);
nlohmann::json to_json(const CoreLemmaReport& r);
nlohmann::json to_json(const std::vector<CotlarDepth>& r);
nlohmann::json to_json(const std::vector<GrowthDepth>& r);
nlohmann::json to_json(const std::vector<CommutatorDepth>& r);

}  // namespace dyadic
