#pragma once

// Ratio scans across N: the extension estimate for three test-function
// families, and the two decoupling right-hand sides.

#include <cstdint>
#include <string>
#include <vector>

#include "rlab/config.hpp"
#include "rlab/field.hpp"
#include "rlab/norms.hpp"

namespace rlab {

/// Sum over the frame lattice of c_T phi_T e(c_omega x), with c_T set by the
/// family for tubes whose centre lies in B(N^d): one central packet of the
/// middle tile (single), e(theta) with uniform theta (random), +-1
/// (random-sign) or 1 (ones). Pure function of (curve, family, seed).
TiledField test_function(const CurveParams& curve, Family family, std::uint64_t seed, int oversample = 8, double amplitude = 1.0);

/// Bytes held by the tile parts of a test function at this N.
double test_function_bytes(const CurveParams& curve, int oversample);

struct ScanRow {
  int N = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double lhs_std_error = 0.0;  ///< zero when lhs is an exact grid sum
};

struct ScanReport {
  std::string kind;  ///< theorem1, conjecture2 or theorem2
  Family family = Family::single;
  std::uint64_t seed = 0;
  RunConfig config;
  std::vector<ScanRow> rows;  ///< ascending N
  ExponentFit fit;            ///< empty points when fewer than two rows
  double theory_slope = 0.0;  ///< -d/2 for theorem1; 0 (no growth) for decoupling
  double wall_clock_s = 0.0;
  std::string note;
};

/// lhs = ||sum f_omega||_{L^p(B(N^d))}, rhs = ||f||_2. Single packets use the
/// exact grid sum on their frame; sums over tiles use stratified sampling.
/// Throws ValidationError when f = 0.
ScanRow theorem1_row(const TiledField& f, int N, int d, double p, std::size_t cells, std::uint64_t seed);

/// Rows for every N of the config, then a log-log fit. Throws BudgetError naming
/// the largest feasible N when some N does not fit the memory budget.
ScanReport scan_theorem1(const RunConfig& config, Family family, std::uint64_t seed);

enum class DecouplingVariant { conjecture2, theorem2 };
std::string variant_name(DecouplingVariant v);
DecouplingVariant parse_variant(const std::string& name);

/// lhs = ||sum f_omega||_p on B(N^d); rhs = N^(1/2-(d+1)/p) (sum ||f_omega||_p^2)^(1/2)
/// for conjecture2, N^(-(d+1)/p) (sum ||f_omega||_{p/2}^2)^(1/2) for theorem2.
/// Every norm uses the same stratified sample points.
ScanRow decoupling_row(const TiledField& f, int N, int d, double p, DecouplingVariant v, std::size_t cells, std::uint64_t seed);

ScanReport scan_decoupling(const RunConfig& config, DecouplingVariant variant, Family family, std::uint64_t seed);

}  // namespace rlab
