#pragma once

// Run configuration shared by every scan and CLI subcommand.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rlab {

enum class Family { single, random_phase, random_sign, ones };

std::string family_name(Family f);
/// Accepts "single", "random" (random_phase), "random-sign" and "ones".
Family parse_family(const std::string& name);

enum class ScanPurpose { generic, theorem1, decoupling, algebraic };

struct RunConfig {
  int d = 3;
  std::vector<int> N{4, 8, 16};
  double p = 8.0;
  double delta = 0.1;
  int D = 4;  ///< partitioning degree
  std::vector<std::uint64_t> seeds{1};
  std::vector<Family> families{Family::single, Family::random_phase, Family::ones};
  int oversample = 8;              ///< frame samples per tube width and length
  std::size_t sample_cells = 384;  ///< stratified sampling uses sample_cells^2 points
  std::size_t partition_grid = 1024;
  double memory_budget_mb = 2048.0;
  std::string out_dir = "out";

  /// Throws ValidationError. Scan purposes add their exponent constraints on p.
  void validate(ScanPurpose purpose = ScanPurpose::generic) const;
  /// Smallest p admitted for the purpose: 2d+2 for Theorem 1 and decoupling, 2(d+2) for the algebraic case.
  double min_p(ScanPurpose purpose) const;
};

/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);
/// Canonical JSON (sorted keys, fixed formatting).
std::string config_to_json(const RunConfig& c);
/// FNV-1a of the canonical JSON without out_dir, as 16 hex digits.
std::string config_hash(const RunConfig& c);

}  // namespace rlab
