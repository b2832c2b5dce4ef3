#include "rlab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rlab/curve_tiles.hpp"
#include "rlab/error.hpp"

namespace rlab {

using nlohmann::json;

std::string family_name(Family f) {
  switch (f) {
    case Family::single: return "single";
    case Family::random_phase: return "random";
    case Family::random_sign: return "random-sign";
    case Family::ones: return "ones";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  if (name == "single") return Family::single;
  if (name == "random") return Family::random_phase;
  if (name == "random-sign") return Family::random_sign;
  if (name == "ones") return Family::ones;
  throw ValidationError("unknown test-function family '" + name + "' (expected single, random, random-sign or ones)");
}

double RunConfig::min_p(ScanPurpose purpose) const {
  switch (purpose) {
    case ScanPurpose::theorem1:
    case ScanPurpose::decoupling: return 2.0 * d + 2.0;
    case ScanPurpose::algebraic: return 2.0 * (d + 2.0);
    case ScanPurpose::generic: return 1.0;
  }
  return 1.0;
}

void RunConfig::validate(ScanPurpose purpose) const {
  if (d < 3 || d > 8) throw ValidationError("config: d must lie in [3, 8]");
  if (N.empty()) throw ValidationError("config: N list is empty");
  std::set<int> seen;
  for (int n : N) {
    if (n < 1 || !is_dyadic(n)) throw ValidationError("config: every N must be a power of two (got " + std::to_string(n) + ")");
    if (!seen.insert(n).second) throw ValidationError("config: N values must be distinct");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("config: delta must lie in (0, 1)");
  if (D < 1 || D > 64) throw ValidationError("config: D must lie in [1, 64]");
  if (seeds.empty()) throw ValidationError("config: at least one seed is required");
  if (families.empty()) throw ValidationError("config: at least one family is required");
  if (oversample < 4) throw ValidationError("config: oversample must be at least 4");
  if (sample_cells < 8) throw ValidationError("config: sample_cells must be at least 8");
  if (partition_grid < 16) throw ValidationError("config: partition_grid must be at least 16");
  if (!(memory_budget_mb > 0.0)) throw ValidationError("config: memory_budget_mb must be positive");
  if (!(p >= 1.0)) throw ValidationError("config: p must be at least 1");
  if (purpose == ScanPurpose::theorem1 && p < min_p(purpose))
    throw ValidationError("config: Theorem-1 scans require p >= 2d+2 (p = " + std::to_string(p) + ", 2d+2 = " + std::to_string(2 * d + 2) + ")");
  if (purpose == ScanPurpose::decoupling && p < min_p(purpose))
    throw ValidationError("config: decoupling scans require p >= 2(d+1) (p = " + std::to_string(p) + ", 2(d+1) = " + std::to_string(2 * d + 2) + ")");
  if (purpose == ScanPurpose::algebraic && p < min_p(purpose))
    throw ValidationError("config: the algebraic-case estimate requires p >= 2(d+2) (p = " + std::to_string(p) + ")");
}

namespace {

json to_json(const RunConfig& c) {
  json j;
  j["d"] = c.d;
  j["N"] = c.N;
  j["p"] = c.p;
  j["delta"] = c.delta;
  j["D"] = c.D;
  j["seeds"] = c.seeds;
  json fam = json::array();
  for (auto f : c.families) fam.push_back(family_name(f));
  j["families"] = fam;
  j["oversample"] = c.oversample;
  j["sample_cells"] = c.sample_cells;
  j["partition_grid"] = c.partition_grid;
  j["memory_budget_mb"] = c.memory_budget_mb;
  j["out_dir"] = c.out_dir;
  return j;
}

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config: top level must be an object");
  static const std::set<std::string> known{"d",         "N",          "p",          "delta",          "D",
                                           "seeds",     "families",   "oversample", "sample_cells",   "partition_grid",
                                           "memory_budget_mb", "out_dir"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw ValidationError("config: unknown key '" + it.key() + "'");
  RunConfig c;
  take(j, "d", c.d);
  take(j, "N", c.N);
  take(j, "p", c.p);
  take(j, "delta", c.delta);
  take(j, "D", c.D);
  take(j, "seeds", c.seeds);
  if (j.contains("families")) {
    std::vector<std::string> names;
    take(j, "families", names);
    c.families.clear();
    for (const auto& n : names) c.families.push_back(parse_family(n));
  }
  take(j, "oversample", c.oversample);
  take(j, "sample_cells", c.sample_cells);
  take(j, "partition_grid", c.partition_grid);
  take(j, "memory_budget_mb", c.memory_budget_mb);
  take(j, "out_dir", c.out_dir);
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& c) { return to_json(c).dump(2); }

std::string config_hash(const RunConfig& c) {
  // The output directory does not change results, so it stays out of the hash.
  json j = to_json(c);
  j.erase("out_dir");
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rlab
