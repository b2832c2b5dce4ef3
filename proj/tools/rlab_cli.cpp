// rlab: command-line driver for the restriction/decoupling workbench.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rlab/batteries.hpp"
#include "rlab/config.hpp"
#include "rlab/error.hpp"
#include "rlab/norms.hpp"
#include "rlab/polypart.hpp"
#include "rlab/report.hpp"
#include "rlab/scan.hpp"
#include "rlab/tangtran.hpp"
#include "rlab/variety.hpp"
#include "rlab/wavepacket.hpp"

using namespace rlab;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  int threads = 0;

  RunConfig config() const {
    RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed_set) c.seeds = {seed};
    if (!out.empty()) c.out_dir = out;
    c.validate();
    return c;
  }
  std::uint64_t first_seed(const RunConfig& c) const { return seed_set ? seed : c.seeds.front(); }
};

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

Vec2 json_vec(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("expected a [x, y] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ValidationError("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_file(const fs::path& p) {
  try {
    return json::parse(read_text(p));
  } catch (const json::exception& e) {
    throw ValidationError(p.string() + ": " + e.what());
  }
}

// Numeric CSV rows; a first line that does not parse is taken as a header.
std::vector<std::vector<double>> read_numeric_csv(const fs::path& p) {
  std::istringstream in(read_text(p));
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    bool ok = true;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      if (rows.empty() && lineno == 1) continue;
      throw ValidationError(p.string() + ":" + std::to_string(lineno) + ": not a numeric row");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json poly_json(const Polynomial2& P) { return {{"degree", P.degree()}, {"coeffs", P.coeffs()}}; }

Polynomial2 json_poly(const json& j) {
  try {
    const int deg = j.at("degree").get<int>();
    auto c = j.at("coeffs").get<std::vector<double>>();
    if (deg < 0 || c.size() != Polynomial2::num_coeffs(deg))
      throw ValidationError("polynomial: degree " + std::to_string(deg) + " needs " + std::to_string(Polynomial2::num_coeffs(deg)) +
                            " coefficients");
    return Polynomial2(deg, std::move(c));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("polynomial: ") + e.what());
  }
}

json tube_json(const Tube& t) {
  json j{{"center", vec_json(t.center)}, {"dir", vec_json(t.dir)}, {"length", t.length}, {"width", t.width}};
  if (t.omega > 0) {
    j["omega"] = t.omega;
    j["lattice"] = json::array({t.lattice_long, t.lattice_wide});
  }
  return j;
}

Tube json_tube(const json& j) {
  try {
    Tube t;
    t.center = json_vec(j.at("center"));
    t.dir = normalized(json_vec(j.at("dir")));
    t.length = j.at("length").get<double>();
    t.width = j.at("width").get<double>();
    if (!(t.length > 0.0 && t.width > 0.0)) throw ValidationError("tube: length and width must be positive");
    if (j.contains("omega")) t.omega = j.at("omega").get<int>();
    return t;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("tube: ") + e.what());
  }
}

json cube_json(const Cube& q) { return {{"lo", vec_json(q.lo)}, {"side", q.side}}; }

json class_json(const TubeClass& c) {
  return {{"scale", c.scale},
          {"mode", c.mode == ScaleMode::Xi ? "Xi" : "Delta"},
          {"kind", c.kind == ClassKind::tangential ? "tangential" : c.kind == ClassKind::transverse ? "transverse" : "cell"},
          {"cube", cube_json(c.cube)},
          {"complement", c.complement},
          {"members", c.members}};
}

json term_json(const TangTranTerm& t) {
  return {{"scale", t.scale},     {"mode", t.mode == ScaleMode::Xi ? "Xi" : "Delta"}, {"complement", t.complement},
          {"value", t.value},     {"classes", t.classes},                            {"memberships", t.memberships}};
}

std::vector<ReportFormat> parse_formats(const std::vector<std::string>& names) {
  std::vector<ReportFormat> out;
  for (const auto& n : names) out.push_back(parse_format(n));
  return out;
}

void print_paths(const std::vector<fs::path>& paths) {
  for (const auto& p : paths) std::cout << p.string() << "\n";
}

// Grey-level raster: cells in shades by label, Z(P) pixels black, wall pixels dark.
void write_pgm(const Partition& part, const std::vector<std::uint8_t>& wall_mask, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const auto& g = part.grid;
  out << "P5\n" << g.nx << " " << g.ny << "\n255\n";
  const std::size_t cells = std::max<std::size_t>(part.num_cells(), 1);
  for (std::size_t jj = 0; jj < g.ny; ++jj) {
    const std::size_t j = g.ny - 1 - jj;  // top row first
    for (std::size_t i = 0; i < g.nx; ++i) {
      const std::size_t k = g.flat(i, j);
      unsigned char v;
      if (part.label[k] < 0) v = 0;
      else if (wall_mask[k]) v = 60;
      else v = static_cast<unsigned char>(120 + 135 * (static_cast<std::size_t>(part.label[k]) + 1) / (cells + 1));
      out.put(static_cast<char>(v));
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

int run_mean_value(int N, int d, int s, const std::string& coeffs_path) {
  MeanValueProblem prob;
  prob.N = N;
  prob.d = d;
  prob.s = s;
  if (!coeffs_path.empty()) {
    for (const auto& row : read_numeric_csv(coeffs_path)) {
      if (row.empty() || row.size() > 2) throw ValidationError("coefficients: expected re[,im] per line");
      prob.coeffs.emplace_back(row[0], row.size() == 2 ? row[1] : 0.0);
    }
  }
  prob.validate();
  const double value = exp_sum_lp_torus(prob);
  const double oracle = prob.coeffs.empty() ? static_cast<double>(vinogradov_count(N, s, d)) : weighted_count(prob);
  const auto grid = exp_sum_grid(prob);
  const json j{{"N", N},
               {"d", d},
               {"s", s},
               {"value", value},
               {"oracle", oracle},
               {"relative_gap", oracle != 0.0 ? std::abs(value - oracle) / std::abs(oracle) : std::abs(value)},
               {"grid", json::array({grid.first, grid.second})}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_partition(const Globals& g, const std::string& points_path, int degree, bool raster, double wall_rho) {
  const RunConfig c = g.config();
  const auto rows = read_numeric_csv(points_path);
  if (rows.empty()) throw ValidationError("partition: no points in " + points_path);
  MassDistribution m;
  Box bb{{1e300, 1e300}, {-1e300, -1e300}};
  for (const auto& r : rows) {
    if (r.size() < 2 || r.size() > 3) throw ValidationError("partition: expected x,y[,weight] per line");
    const Vec2 p{r[0], r[1]};
    m.points.push_back(p);
    m.weights.push_back(r.size() == 3 ? r[2] : 1.0);
    bb.lo = {std::min(bb.lo.x, p.x), std::min(bb.lo.y, p.y)};
    bb.hi = {std::max(bb.hi.x, p.x), std::max(bb.hi.y, p.y)};
  }
  m.validate();
  const double pad = 0.05 * std::max({bb.width(), bb.height(), 1e-9});
  const Box dom{bb.lo - Vec2{pad, pad}, bb.hi + Vec2{pad, pad}};
  PartitionOptions opt;
  opt.grid_n = c.partition_grid;
  const Partition part = partition(m, degree, dom, g.first_seed(c), opt);

  const fs::path dir = c.out_dir;
  fs::create_directories(dir);
  const std::string stem = "partition_D" + std::to_string(degree) + "_s" + std::to_string(g.first_seed(c));
  json pj = poly_json(part.polynomial);
  json factors = json::array();
  for (const auto& f : part.factors) factors.push_back(poly_json(f));
  pj["factors"] = factors;
  pj["domain"] = {{"lo", vec_json(dom.lo)}, {"hi", vec_json(dom.hi)}};
  pj["cells"] = part.num_cells();
  pj["components"] = part.num_components;
  pj["wall_mass"] = part.wall_mass;
  pj["perturbation"] = part.perturbation;
  std::vector<fs::path> paths{dir / (stem + "_poly.json"), dir / (stem + "_cells.csv")};
  write_text_file(paths[0], pj.dump(2) + "\n");
  Table t{{"cell", "sign_code", "mass", "points"}, {}};
  std::vector<std::size_t> counts(part.num_cells(), 0);
  for (int pc : part.point_cell)
    if (pc >= 0) ++counts[static_cast<std::size_t>(pc)];
  for (std::size_t k = 0; k < part.num_cells(); ++k)
    t.add({std::to_string(k), std::to_string(part.cell_code[k]), format_double(part.masses[k]), std::to_string(counts[k])});
  write_text_file(paths[1], table_csv(t));
  if (raster) {
    paths.push_back(dir / (stem + ".pgm"));
    write_pgm(part, wall(part, wall_rho), paths.back());
  }
  print_paths(paths);
  return 0;
}

int run_classify(const std::string& poly_path, const std::string& tubes_path, double R, double d, double delta) {
  const Polynomial2 P = json_poly(parse_json_file(poly_path));
  const json tj = parse_json_file(tubes_path);
  if (!tj.is_array()) throw ValidationError("tubes: expected a JSON array");
  std::vector<Tube> tubes;
  for (const auto& e : tj) tubes.push_back(json_tube(e));
  const ClassParams params{R, d, delta};
  params.validate();
  const Cube root = root_cube(R, d);
  const auto ctx = VarietyContext::build(P, root.box(), params);
  const TangTranSplit s = tang_tran_split(ctx, tubes, root);
  json tang = json::array(), tran = json::array();
  for (const auto& c : s.tang) tang.push_back(class_json(c));
  for (const auto& c : s.tran) tran.push_back(class_json(c));
  const json out{{"R", R},
                 {"d", d},
                 {"delta", delta},
                 {"rho", ctx.rho()},
                 {"root", cube_json(root)},
                 {"xi_levels", s.xi_levels},
                 {"delta_levels", s.delta_levels},
                 {"complement_at_xi", s.complement_at_xi},
                 {"cell", s.cell},
                 {"tang", tang},
                 {"tran", tran}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

TiledField field_for(const RunConfig& c, const std::string& field_path, int N, Family family, std::uint64_t seed) {
  const CurveParams curve{static_cast<double>(c.d), N};
  if (field_path.empty()) return test_function(curve, family, seed, c.oversample);
  return tile_world_field(read_field_binary(field_path), curve, c.oversample);
}

int run_decompose(const Globals& g, const std::string& field_path, int N, const std::string& family, double drop) {
  const RunConfig c = g.config();
  const TiledField f = field_for(c, field_path, N, parse_family(family), g.first_seed(c));
  DecomposeOptions opt;
  opt.drop_fraction = drop;
  for (const auto& pk : decompose(f, opt)) {
    json j = tube_json(pk.tube);
    j["part"] = pk.part;
    j["omega"] = pk.omega;
    j["mass"] = pk.mass;
    std::cout << j.dump() << "\n";
  }
  return 0;
}

int run_scan(const Globals& g, bool theorem1, const std::string& variant, const std::vector<std::string>& families,
             const std::vector<std::string>& formats) {
  const RunConfig c = g.config();
  std::vector<Family> fams = c.families;
  if (!families.empty()) {
    fams.clear();
    for (const auto& f : families) fams.push_back(parse_family(f));
  }
  const auto fmts = parse_formats(formats);
  const DecouplingVariant v = parse_variant(variant);
  for (Family fam : fams)
    for (std::uint64_t seed : c.seeds) {
      const ScanReport r = theorem1 ? scan_theorem1(c, fam, seed) : scan_decoupling(c, v, fam, seed);
      print_paths(emit_report(r, c.out_dir, fmts));
      std::fprintf(stderr, "%s %s seed %llu: slope %.4f (theory %.4f)\n", r.kind.c_str(), family_name(fam).c_str(),
                   static_cast<unsigned long long>(seed), r.fit.slope, r.theory_slope);
    }
  return 0;
}

int run_tang_tran(const Globals& g, const std::string& field_path, int N, const std::string& family, std::size_t density, std::size_t cells) {
  const RunConfig c = g.config();
  const std::uint64_t seed = g.first_seed(c);
  const TiledField f = field_for(c, field_path, N, parse_family(family), seed);
  PartitionOptions po;
  po.grid_n = c.partition_grid;
  const Partition part = field_partition(f, c.d, c.D, seed, density, po);
  TangTranOptions opt;
  opt.cells = cells;
  opt.seed = seed;
  const TangTranRecord r = compute_tang_tran(c, f, part, opt);
  json tang = json::array(), tran = json::array();
  for (const auto& t : r.tang) tang.push_back(term_json(t));
  for (const auto& t : r.tran) tran.push_back(term_json(t));
  const json out{{"N", N},
                 {"family", family},
                 {"seed", seed},
                 {"config", json::parse(config_to_json(c))},
                 {"config_hash", config_hash(c)},
                 {"total", r.total},
                 {"cell_term", r.cell_term},
                 {"wall_integral", r.wall_integral},
                 {"tang", tang},
                 {"tran", tran},
                 {"residual", r.residual},
                 {"relative_residual", r.relative_residual},
                 {"packets", r.packets},
                 {"cell_tubes", r.cell_tubes},
                 {"samples", r.samples},
                 {"complement_at_xi", r.complement_at_xi},
                 {"wall_lp", r.wall_lp},
                 {"wall_rhs", r.wall_rhs},
                 {"wall_note", "measured two-sided: wall_lp against D R^(-d/2+3 delta) ||f||_2; not asserted"}};
  const fs::path dir = c.out_dir;
  fs::create_directories(dir);
  const fs::path path =
      dir / ("tangtran_" + family + "_N" + std::to_string(N) + "_s" + std::to_string(seed) + "_" + config_hash(c) + ".json");
  write_text_file(path, out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_battery_cmd(const Globals& g, const std::string& which) {
  const std::uint64_t seed = g.seed_set ? g.seed : 1;
  const BatteryResult r = run_battery(which, seed);
  const std::string csv = table_csv(r.table);
  if (!g.out.empty()) {
    fs::create_directories(g.out);
    write_text_file(fs::path(g.out) / ("battery_" + which + "_s" + std::to_string(seed) + ".csv"), csv);
  }
  std::cout << csv;
  std::fprintf(stderr, "%s: %zu rows, %zu outside the pinned bound\n", which.c_str(), r.table.rows.size(), r.violations);
  return 0;
}

int run_dump_tiles(const Globals& g, int N, bool with_tubes) {
  const RunConfig c = g.config();
  const CurveParams curve{static_cast<double>(c.d), N};
  const auto tiles = build_frequency_tiles(curve);
  json arr = json::array();
  std::vector<Tube> tubes;
  const Box region = root_cube(N, c.d).box();
  for (const auto& w : tiles) {
    arr.push_back({{"index", w.index},
                   {"xi", w.xi},
                   {"center", vec_json(w.center)},
                   {"tangent", vec_json(w.tangent)},
                   {"normal", vec_json(w.normal)},
                   {"long_side", w.long_side},
                   {"short_side", w.short_side}});
    if (with_tubes)
      for (const auto& t : dual_tube_lattice(w, region)) tubes.push_back(t);
  }
  if (!with_tubes) {
    std::cout << arr.dump(2) << "\n";
    return 0;
  }
  json tj = json::array();
  for (const auto& t : tubes) tj.push_back(tube_json(t));
  std::cout << json{{"tiles", arr}, {"tubes", tj}}.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rlab: wave packets, polynomial partitioning and exponential-sum scans for the curve (xi, xi^d)"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "Run configuration (JSON)")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", g.seed, "Seed (overrides the config's seed list)");
  app.add_option("--out", g.out, "Output directory (overrides the config)");
  app.add_option("--threads", g.threads, "OpenMP threads (0 keeps the default)")->check(CLI::NonNegativeNumber);

  std::function<int()> action;

  auto* mv = app.add_subcommand("mean-value", "Exact L^{2s} mean value on the torus against the counting oracle");
  int mv_N = 4, mv_d = 3, mv_s = 2;
  std::string mv_coeffs;
  mv->add_option("--N", mv_N, "Number of terms")->required();
  mv->add_option("--d", mv_d, "Curve exponent");
  mv->add_option("--s", mv_s, "Half the exponent p = 2s");
  mv->add_option("--coeffs", mv_coeffs, "CSV of coefficients re[,im], one per n")->check(CLI::ExistingFile);
  mv->callback([&] { action = [&] { return run_mean_value(mv_N, mv_d, mv_s, mv_coeffs); }; });

  auto* pa = app.add_subcommand("partition", "Polynomial partition of a weighted point set");
  std::string pa_points;
  int pa_degree = 4;
  bool pa_raster = false;
  double pa_rho = 0.0;
  pa->add_option("--points", pa_points, "CSV of x,y[,weight]")->required()->check(CLI::ExistingFile);
  pa->add_option("--degree", pa_degree, "Degree budget D")->required();
  pa->add_flag("--raster", pa_raster, "Also write a PGM of the cells with Z(P) and the wall");
  pa->add_option("--wall", pa_rho, "Wall radius for the raster (0: sign-change pixels only)");
  pa->callback([&] { action = [&] { return run_partition(g, pa_points, pa_degree, pa_raster, pa_rho); }; });

  auto* cl = app.add_subcommand("classify", "Tangential/transverse classes of tubes against Z(P)");
  std::string cl_poly, cl_tubes;
  double cl_R = 4.0, cl_d = 3.0, cl_delta = 0.1;
  cl->add_option("--poly", cl_poly, "Polynomial JSON {degree, coeffs}")->required()->check(CLI::ExistingFile);
  cl->add_option("--tubes", cl_tubes, "JSON array of {center, dir, length, width}")->required()->check(CLI::ExistingFile);
  cl->add_option("--R", cl_R, "Tube width scale R");
  cl->add_option("--d", cl_d, "Curve exponent");
  cl->add_option("--delta", cl_delta, "Dilation exponent");
  cl->callback([&] { action = [&] { return run_classify(cl_poly, cl_tubes, cl_R, cl_d, cl_delta); }; });

  auto* de = app.add_subcommand("decompose", "Wave packets of a field, one JSON object per line");
  std::string de_field, de_family = "random";
  int de_N = 4;
  double de_drop = 1e-12;
  de->add_option("--field", de_field, "World field (binary layout); default is a test function")->check(CLI::ExistingFile);
  de->add_option("--N", de_N, "Tile count");
  de->add_option("--family", de_family, "Test-function family: single, random, random-sign, ones");
  de->add_option("--drop", de_drop, "Drop packets lighter than this fraction of ||f||_2");
  de->callback([&] { action = [&] { return run_decompose(g, de_field, de_N, de_family, de_drop); }; });

  std::vector<std::string> st_families, st_formats{"csv", "json", "svg"};
  auto* st = app.add_subcommand("scan-st", "||sum f_omega||_p / ||f||_2 across N with an exponent fit");
  st->add_option("--family", st_families, "Families to scan (default: the config's)");
  st->add_option("--format", st_formats, "Report formats: csv, json, svg");
  st->callback([&] { action = [&] { return run_scan(g, true, "conjecture2", st_families, st_formats); }; });

  std::vector<std::string> sd_families, sd_formats{"csv", "json", "svg"};
  std::string sd_variant = "conjecture2";
  auto* sd = app.add_subcommand("scan-dec", "Decoupling ratios across N");
  sd->add_option("--variant", sd_variant, "conjecture2 or theorem2");
  sd->add_option("--family", sd_families, "Families to scan (default: the config's)");
  sd->add_option("--format", sd_formats, "Report formats: csv, json, svg");
  sd->callback([&] { action = [&] { return run_scan(g, false, sd_variant, sd_families, sd_formats); }; });

  auto* tt = app.add_subcommand("tang-tran", "Cell, tangential and transverse terms of the wall decomposition");
  std::string tt_field, tt_family = "random";
  int tt_N = 4;
  std::size_t tt_density = 384, tt_cells = 256;
  tt->add_option("--field", tt_field, "World field (binary layout); default is a test function")->check(CLI::ExistingFile);
  tt->add_option("--N", tt_N, "Tile count (also the tube width R)");
  tt->add_option("--family", tt_family, "Test-function family");
  tt->add_option("--density", tt_density, "Pixels per side of the |f|^2 density used for partitioning");
  tt->add_option("--cells", tt_cells, "Strata per side for the integrals");
  tt->callback([&] { action = [&] { return run_tang_tran(g, tt_field, tt_N, tt_family, tt_density, tt_cells); }; });

  auto* lb = app.add_subcommand("lemma-battery", "Randomised lemma checks, CSV with measured constants");
  std::string lb_which;
  lb->add_option("--which", lb_which, "wongkew, segments, incidence or directions")->required();
  lb->callback([&] { action = [&] { return run_battery_cmd(g, lb_which); }; });

  auto* dt = app.add_subcommand("dump-tiles", "Frequency tiles (and optionally their dual tube lattices) as JSON");
  int dt_N = 4;
  bool dt_tubes = false;
  dt->add_option("--N", dt_N, "Tile count");
  dt->add_flag("--tubes", dt_tubes, "Include the dual tubes over the root cube of B(N^d)");
  dt->callback([&] { action = [&] { return run_dump_tiles(g, dt_N, dt_tubes); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  g.seed_set = seed_opt->count() > 0;
  try {
    set_threads(g.threads);
    return action();
  } catch (const BudgetError& e) {
    std::fprintf(stderr, "budget: %s\n", e.what());
    return 3;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
