#include <cmath>
#include <random>

#include "doctest.h"
#include "rlab/error.hpp"
#include "rlab/scan.hpp"
#include "rlab/wavepacket.hpp"

using namespace rlab;

namespace {

// Direct sum of c_T * single_wavepacket over the frame lattice, tube by tube,
// with the coefficient stream drawn in the same order as the generator.
Field direct_sum(const TileFrame& fr, Family family, std::mt19937_64& rng, double radius) {
  Field g = fr.blank();
  std::uniform_real_distribution<double> phase(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  for (std::int64_t k = 0; k < fr.kv_cells; ++k)
    for (std::int64_t m = 0; m < fr.ku_cells; ++m) {
      cd c{1.0, 0.0};
      if (family == Family::random_phase) c = expi2pi(phase(rng));
      else if (family == Family::random_sign) c = coin(rng) ? cd{1.0, 0.0} : cd{-1.0, 0.0};
      Tube t;
      t.dir = fr.omega.normal;
      t.length = fr.L;
      t.width = fr.W;
      t.center = g.origin + g.axis * (static_cast<double>(m) * fr.W) + g.vaxis() * (static_cast<double>(k) * fr.L);
      if (norm(t.center) > radius) continue;
      const Field b = single_wavepacket(fr, t, 1.0);
      for (std::size_t i = 0; i < g.size(); ++i) g.data[i] += c * b.data[i];
    }
  return g;
}

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

RunConfig small_config() {
  RunConfig c;
  c.sample_cells = 128;
  return c;
}

}  // namespace

TEST_CASE("coefficient synthesis matches the direct packet sum") {
  const CurveParams curve{3.0, 2};
  const double radius = 8.0;
  for (Family fam : {Family::ones, Family::random_sign, Family::random_phase}) {
    const TiledField f = test_function(curve, fam, 5, 8);
    REQUIRE(f.parts.size() == 2);
    for (std::size_t w = 0; w < f.parts.size(); ++w) {
      std::seed_seq ss{std::uint64_t{5}, std::uint64_t{2}, static_cast<std::uint64_t>(f.frames[w].omega.index), std::uint64_t{0xc0ef}};
      std::mt19937_64 rng(ss);
      const Field oracle = direct_sum(f.frames[w], fam, rng, radius);
      double peak = 0.0;
      for (const auto& v : oracle.data) peak = std::max(peak, std::abs(v));
      CHECK(peak > 0.1);
      CHECK(max_abs_diff(f.parts[w], oracle) <= 1e-9 * peak);
    }
  }
}

TEST_CASE("test functions are a pure function of curve, family and seed") {
  const CurveParams curve{3.0, 4};
  const TiledField a = test_function(curve, Family::random_phase, 9);
  const TiledField b = test_function(curve, Family::random_phase, 9);
  const TiledField c = test_function(curve, Family::random_phase, 10);
  REQUIRE(a.parts.size() == 4);
  bool same = true, differs = false;
  for (std::size_t w = 0; w < a.parts.size(); ++w) {
    same = same && a.parts[w].data == b.parts[w].data;
    differs = differs || a.parts[w].data != c.parts[w].data;
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("single packet ratio follows the tube-volume law") {
  // For a packet of unit shape on an N^d x N tube, ||f||_p / ||f||_2 is
  // |T|^(1/p - 1/2) times a shape constant.
  RunConfig c = small_config();
  c.N = {4, 8, 16};
  const ScanReport r = scan_theorem1(c, Family::single, 1);
  REQUIRE(r.rows.size() == 3);
  std::vector<double> shape;
  for (const auto& row : r.rows) {
    const double vol = std::pow(row.N, c.d + 1.0);
    shape.push_back(row.ratio / std::pow(vol, 1.0 / c.p - 0.5));
    CHECK(row.lhs_std_error == 0.0);
  }
  for (double s : shape) CHECK(s / shape[0] == doctest::Approx(1.0).epsilon(0.5));
  CHECK(r.fit.slope >= -1.8);
  CHECK(r.fit.slope <= -1.2);
  CHECK(r.fit.slope == doctest::Approx(-0.5 * c.d).epsilon(0.02));
  CHECK(r.theory_slope == -1.5);
}

TEST_CASE("multi-tile theorem 1 rows decay") {
  RunConfig c = small_config();
  c.N = {4, 8};
  for (Family fam : {Family::random_phase, Family::ones}) {
    const ScanReport r = scan_theorem1(c, fam, 2);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[1].ratio < r.rows[0].ratio);
    for (const auto& row : r.rows) {
      CHECK(row.lhs_std_error > 0.0);
      CHECK(row.lhs_std_error < 0.1 * row.lhs);
    }
  }
}

TEST_CASE("the ratio does not depend on the amplitude") {
  const CurveParams curve{3.0, 4};
  for (Family fam : {Family::single, Family::random_phase}) {
    const ScanRow a = theorem1_row(test_function(curve, fam, 3, 8, 1.0), 4, 3, 8.0, 128, 11);
    const ScanRow b = theorem1_row(test_function(curve, fam, 3, 8, 2.0), 4, 3, 8.0, 128, 11);
    CHECK(b.lhs == doctest::Approx(2.0 * a.lhs).epsilon(1e-12));
    CHECK(std::abs(b.ratio - a.ratio) <= 1e-12 * a.ratio);
  }
}

TEST_CASE("a zero test function is rejected") {
  const TiledField f = test_function({3.0, 4}, Family::ones, 1, 8, 0.0);
  CHECK_THROWS_AS(theorem1_row(f, 4, 3, 8.0, 64, 1), ValidationError);
  CHECK_THROWS_AS(decoupling_row(f, 4, 3, 8.0, DecouplingVariant::conjecture2, 64, 1), ValidationError);
}

TEST_CASE("p below 2d+2 is rejected for theorem 1") {
  RunConfig c = small_config();
  c.p = 6.0;
  try {
    scan_theorem1(c, Family::single, 1);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("2d+2") != std::string::npos);
  }
}

TEST_CASE("the memory budget names the largest feasible N") {
  RunConfig c = small_config();
  c.N = {4, 8, 16};
  const double b8 = test_function_bytes({3.0, 8}, c.oversample), b16 = test_function_bytes({3.0, 16}, c.oversample);
  REQUIRE(b8 < b16);
  c.memory_budget_mb = 0.5 * (b8 + b16) / (1024.0 * 1024.0);
  try {
    scan_theorem1(c, Family::ones, 1);
    FAIL("expected BudgetError");
  } catch (const BudgetError& e) {
    CHECK(std::string(e.what()).find("largest feasible N = 8") != std::string::npos);
  }
}

TEST_CASE("one tile decouples exactly") {
  const TiledField f = test_function({3.0, 1}, Family::random_phase, 4);
  REQUIRE(f.parts.size() == 1);
  const ScanRow r = decoupling_row(f, 1, 3, 8.0, DecouplingVariant::conjecture2, 64, 3);
  CHECK(r.ratio == 1.0);
}

TEST_CASE("decoupling scan rows") {
  RunConfig c = small_config();
  c.N = {16, 4, 8};
  const ScanReport a = scan_decoupling(c, DecouplingVariant::conjecture2, Family::random_sign, 1);
  REQUIRE(a.rows.size() == 3);
  CHECK(a.rows[0].N == 4);
  CHECK(a.rows[1].N == 8);
  CHECK(a.rows[2].N == 16);
  CHECK(a.fit.points.size() == 3);
  CHECK(std::isfinite(a.fit.slope));
  for (const auto& row : a.rows) CHECK(row.ratio > 0.0);

  const ScanReport b = scan_decoupling(c, DecouplingVariant::conjecture2, Family::ones, 2);
  CHECK(b.config.N == a.config.N);
  CHECK(b.config.p == a.config.p);
  CHECK(b.seed != a.seed);
  CHECK(b.kind == "conjecture2");

  const ScanReport t = scan_decoupling(c, DecouplingVariant::theorem2, Family::random_sign, 1);
  CHECK(t.kind == "theorem2");
  // Same samples and same lhs; only the right-hand side changes.
  for (std::size_t k = 0; k < t.rows.size(); ++k) CHECK(t.rows[k].lhs == a.rows[k].lhs);
}

TEST_CASE("variant and family names round trip") {
  for (auto v : {DecouplingVariant::conjecture2, DecouplingVariant::theorem2}) CHECK(parse_variant(variant_name(v)) == v);
  CHECK_THROWS_AS(parse_variant("theorem3"), ValidationError);
  for (auto f : {Family::single, Family::random_phase, Family::random_sign, Family::ones}) CHECK(parse_family(family_name(f)) == f);
  CHECK_THROWS_AS(parse_family("gaussian"), ValidationError);
}
