#pragma once

// Randomised checks of the geometric lemmas. Each row records a measured
// quantity, the bound it is held to and the constant implied by the
// measurement; the bound uses a pinned constant.

#include <cstdint>
#include <string>
#include <vector>

#include "rlab/report.hpp"
#include "rlab/variety.hpp"

namespace rlab {

struct BatteryResult {
  std::string which;
  Table table;  ///< lemma,instance,D,quantity,bound,constant,pinned,within
  std::size_t violations = 0;
  double max_constant(const std::string& lemma) const;
};

/// Neighbourhood areas of random curves of degree 1..6 on [-1,1]^2 (L = 1):
/// area <= 16 D rho L, and halving rho scales the area by 0.5 +- 0.15.
BatteryResult wongkew_battery(std::uint64_t seed, int instances = 20, std::size_t samples = 200000, double rho = 0.05);

/// transverse_segments <= 2 D^2 for random cubics and random tubes.
BatteryResult segment_battery(std::uint64_t seed, int instances = 50);

/// Overlap sums against log(J)|T|, the union bound against log(J) area(union),
/// both with constant 8, on direction families with J <= 10 L / W.
BatteryResult incidence_battery(std::uint64_t seed, int families = 20);

/// Direction counts near random curves (constant 8 against D K1 K2 log J), and at
/// R = 64 the transverse classes: directions per cube against 4 D R^delta Delta,
/// cubes per tube against 2 D^2.
BatteryResult direction_battery(std::uint64_t seed, int instances = 4, int transverse_instances = 3);

BatteryResult run_battery(const std::string& which, std::uint64_t seed);

/// Area of a union of tubes on a raster of pixel size h (pixel centres).
double union_area(const std::vector<Tube>& tubes, double h);

/// Random polynomial of the given degree (normalised coefficients) whose zero
/// set has sampled points in `box`.
Polynomial2 random_polynomial_meeting(int degree, std::mt19937_64& rng, const Box& box);

}  // namespace rlab
