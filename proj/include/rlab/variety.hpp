#pragma once

// Tubes against a plane curve Z(P): sampling of nonsingular points, the
// angle classification per dyadic cube, the tangential/transverse split and
// the incidence functionals used by the lemma batteries.

#include <cstdint>
#include <vector>

#include "rlab/curve_tiles.hpp"
#include "rlab/distance_field.hpp"
#include "rlab/polynomial.hpp"

namespace rlab {

struct VarietyPoint {
  Vec2 z;
  Vec2 tangent;  ///< unit, perpendicular to the gradient
  double grad_norm = 0.0;
};

/// Nonsingular points of Z(P) with a bucket index for box queries.
class VarietySample {
 public:
  VarietySample() = default;
  VarietySample(std::vector<VarietyPoint> pts, const Box& region, double bucket);

  const std::vector<VarietyPoint>& points() const { return pts_; }
  std::size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }
  const Box& region() const { return region_; }

  /// Calls f(point) for every sample inside the closed box b until f returns false.
  /// Returns false when stopped early.
  template <class F>
  bool for_each_in(const Box& b, F&& f) const {
    if (pts_.empty()) return true;
    std::size_t i0, i1, j0, j1;
    if (!bucket_range(b, i0, i1, j0, j1)) return true;
    for (std::size_t j = j0; j <= j1; ++j)
      for (std::size_t i = i0; i <= i1; ++i) {
        const std::size_t c = j * nx_ + i;
        for (std::uint32_t k = start_[c]; k < start_[c + 1]; ++k) {
          const VarietyPoint& v = pts_[order_[k]];
          if (b.contains(v.z) && !f(v)) return false;
        }
      }
    return true;
  }

 private:
  bool bucket_range(const Box& b, std::size_t& i0, std::size_t& i1, std::size_t& j0, std::size_t& j1) const;

  std::vector<VarietyPoint> pts_;
  Box region_{};
  double bucket_ = 1.0;
  std::size_t nx_ = 0, ny_ = 0;
  std::vector<std::uint32_t> start_;
  std::vector<std::uint32_t> order_;
};

struct SampleOptions {
  double singular_rel = 1e-6;  ///< drop points with |grad P| below this times the largest grid gradient
  int bisection_steps = 40;
};

/// Sign changes of P along the edges of a resolution x resolution node
/// lattice over `region`, each refined by bisection.
VarietySample sample_variety(const Polynomial2& P, const Box& region, std::size_t resolution, const SampleOptions& opt = {});

/// Same, with spacing about `spacing` along the curve: a coarse lattice finds
/// the cells crossed by Z(P) and only those are refined.
VarietySample sample_variety_spaced(const Polynomial2& P, const Box& region, double spacing, const SampleOptions& opt = {});

/// Acute angle between the line of e(T) and the tangent line at z.
double angle_to_variety(const Tube& T, const VarietyPoint& z);

struct ClassParams {
  double R = 4.0;
  double d = 3.0;
  double delta = 0.1;

  double tstar() const;  ///< R^delta, the T* dilation
  double rho() const;    ///< R^(1+delta), the wall radius
  ScaleParams scale() const { return {R, d, delta}; }
  void validate() const;
};

double xi_threshold(double xi, const ClassParams& p);        ///< Xi R^(-d+1+delta)
double delta_threshold(double Delta, const ClassParams& p);  ///< Delta / R
/// Dyadic Xi in [1, R^(d-2)].
std::vector<double> xi_ladder(const ClassParams& p);
/// Dyadic Delta in [R^delta / 2, R / 2^5]; empty at small R.
std::vector<double> delta_ladder(const ClassParams& p);

/// A variety sample together with the wall radius, answering the two
/// membership questions of the classification.
class VarietyContext {
 public:
  VarietyContext(VarietySample sample, ClassParams params, double rho);
  /// Samples Z(P) over `domain` with about `per_width` points per tube width R.
  static VarietyContext build(const Polynomial2& P, const Box& domain, const ClassParams& params, double per_width = 4.0);

  const VarietySample& sample() const { return sample_; }
  const ClassParams& params() const { return params_; }
  double rho() const { return rho_; }

  /// T* meets the wall anywhere.
  bool meets_wall(const Tube& T) const;
  /// T* cap W cap Q is nonempty.
  bool meets_wall(const Tube& T, const Box& q) const;
  /// Every sampled z in 3Q cap 5T* is within `threshold` of e(T).
  bool angles_within(const Tube& T, const Cube& q, double threshold) const;
  bool member(const Tube& T, const Cube& q, double threshold) const {
    return meets_wall(T, q.box()) && angles_within(T, q, threshold);
  }

 private:
  VarietySample sample_;
  ClassParams params_;
  double rho_;
};

enum class ClassKind { tangential, transverse, cell };

struct TubeClass {
  double scale = 1.0;
  ScaleMode mode = ScaleMode::Xi;
  ClassKind kind = ClassKind::tangential;
  Cube cube;
  bool complement = false;           ///< the (T_Delta[Q])^c class at the top level
  std::vector<std::size_t> members;  ///< indices into the tube list, ascending
};

/// T_scale[Q] for every cube of the grid with at least one member.
std::vector<TubeClass> classify(const VarietyContext& ctx, const std::vector<Tube>& tubes, const CubeGrid& grid, double scale,
                                ScaleMode mode, Exec exec = Exec::parallel);

struct TangTranSplit {
  std::vector<std::size_t> cell;  ///< tubes whose T* misses the wall
  std::vector<TubeClass> tang;
  std::vector<TubeClass> tran;
  std::vector<double> xi_levels;
  std::vector<double> delta_levels;
  /// The Delta ladder is empty, so the complement class sits at the top Xi.
  bool complement_at_xi = false;
};

/// Inductive peeling over the Xi ladder then the Delta ladder on the tiling of `root`.
TangTranSplit tang_tran_split(const VarietyContext& ctx, const std::vector<Tube>& tubes, const Cube& root, Exec exec = Exec::parallel);

/// Distance from q to Z(P): Newton projection, with `fallback` (a distance
/// map of the same polynomial) deciding where Newton fails or disagrees.
double distance_to_variety(const Polynomial2& P, Vec2 q, const DistanceMap* fallback);

struct VolumeEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo area of {x in domain : dist(x, Z(P)) <= rho}.
VolumeEstimate neighborhood_volume(const Polynomial2& P, double rho, const Box& domain, std::size_t n_samples, std::uint64_t seed,
                                   Exec exec = Exec::parallel);

/// Number of length rho/a pieces of T holding a sampled z in Z(P) cap T whose
/// tangent makes angle >= a with e(T).
int transverse_segments(const Polynomial2& P, const Tube& T, double a, double rho);

/// Distinct directions among tubes lying inside B(center, radius) and inside
/// the `width`-neighbourhood of Z(P). `L`, `W` and `J` are the family's tube
/// dimensions and direction count, checked against J <= 10 L / W.
int direction_count(const std::vector<Tube>& tubes, const Polynomial2& P, Vec2 center, double radius, double width, double L,
                    double W, std::size_t J);

/// Sum over the family of area(S cap T), by exact convex clipping.
double overlap_sum(const Tube& T, const std::vector<Tube>& family);

/// Tubes of size L x W through `center`, one per direction k pi / J.
std::vector<Tube> direction_family(Vec2 center, double L, double W, std::size_t J);

}  // namespace rlab
