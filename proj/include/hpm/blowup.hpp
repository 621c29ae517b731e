#pragma once

// Blow-ups at the origin: normalized image measures ν_r = T_{0,r}[ω]/ω(B_r),
// rescaled zero sets (1/r)·h^{-1}(0) and their Hausdorff distances, and
// nodal-domain counts of spherical harmonics on S².

#include <iosfwd>
#include <optional>
#include <vector>

#include "hpm/particle.hpp"
#include "hpm/transport.hpp"

namespace hpm {

/// ν_i = T_{0,r_i}[discretize(m, r_i)] / ω(B_{r_i}), each a cloud on B_1. The
/// normalization comes from ball_measure, not from the particle totals. Radii
/// must be positive and strictly decreasing.
std::vector<ParticleMeasure> blowup_sequence(const PolyMeasure& m, const std::vector<double>& radii,
                                             const SphereRule& rule, const DiscretizeOptions& opt = {});

struct ZeroSetSample {
  int dim = 0;
  std::vector<double> points;  // size() × dim
  int generation = 0;          // lines per unit half-width
  double window = 1.0;         // samples lie in B_window
  double scale = 1.0;          // the r of {y : h(r·y) = 0}

  std::size_t size() const { return points.size() / static_cast<std::size_t>(dim); }
  /// Spacing between parallel sampling lines.
  double resolution() const { return window / generation; }
};

/// Sign changes of y ↦ h(r·y) along axis-parallel lines through B_R, for every
/// axis. Lines inside the zero set carry no sign change and are skipped; the
/// other axes sample those sheets.
ZeroSetSample zero_set_blowup(const Poly& h, double r, double R, int grid = 64);

/// max of the two directed sup–inf distances. Throws for empty samples or a
/// dimension mismatch.
double hausdorff_distance(const ZeroSetSample& a, const ZeroSetSample& b);

struct BlowupRow {
  double r = 0.0;
  double f1_distance = 0.0;  // F_1(ν_r, limit)
  double hausdorff = 0.0;    // zero sets in B_1 against the limit's zero set
  double resolution = 0.0;
};

struct BlowupOptions {
  int grid = 48;       // particle discretization
  int zero_grid = 64;  // zero-set sampling
  FrOptions fr;
};

/// One row per radius comparing the blow-up of m with the normalized measure
/// and zero set of `limit`.
std::vector<BlowupRow> blowup_report(const PolyMeasure& m, const Poly& limit, const std::vector<double>& radii,
                                     const SphereRule& rule, const BlowupOptions& opt = {});

/// Columns r,f1_distance,hausdorff,resolution.
void write_csv(std::ostream& os, const std::vector<BlowupRow>& rows);

struct NodalCount {
  std::optional<int> count;  // empty when no two successive levels agree
  int level = 0;             // level at which the count settled
  std::vector<int> counts;   // one per level tried, starting at grid_level
};

/// Components of S² ∖ h^{-1}(0) from signs at the vertices of a subdivided
/// icosahedron (10·4^L + 2 vertices at level L), joined along edges with
/// union–find. Vertices with |h| below 1e-9·max|h| are treated as boundary.
/// Levels increase from grid_level until the count agrees across two
/// refinements (three equal counts in a row). Requires n = 3 and h homogeneous.
NodalCount nodal_components_s2(const Poly& h, int grid_level = 3, int max_level = 8);

/// Vertex dump x,y,z,sign,component at one level, for external plotting.
void write_nodal_csv(std::ostream& os, const Poly& h, int level);

}  // namespace hpm
