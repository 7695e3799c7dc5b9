#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "gelmatch/errors.hpp"
#include "gelmatch/linalg.hpp"

namespace gelmatch {

// A point is a coordinate vector of length dim (pixels). dim is 2 for the CLI
// but every formula below is written for general d so tests can run d=1,3.
using Point = std::vector<double>;

Point add(const Point& a, const Point& b);
Point sub(const Point& a, const Point& b);
double squared_norm(const Point& a);
double squared_distance(const Point& a, const Point& b);
double distance(const Point& a, const Point& b);

// g(mu) = A*mu + b with A nonsingular (|det A| > 1e-12). Reflections are
// allowed; only singularity is rejected.
struct AffineTransform {
  Matrix a;  // d x d, unitless
  Point b;   // d, pixels

  static AffineTransform identity(std::size_t dim);

  std::size_t dim() const { return b.size(); }
  double det() const { return determinant(a); }
  bool singular() const;

  Point apply(const Point& p) const;
  AffineTransform inverse() const;  // throws DegenerateError when singular
};

constexpr double kSingularDetTol = 1e-12;

// Axis-aligned region Omega containing all x points; unmatched points carry
// uniform density 1/|Omega|.
struct Region {
  Point lo, hi;

  Region(Point lo, Point hi);  // throws DegenerateError when area <= 0

  std::size_t dim() const { return lo.size(); }
  double area() const;
  bool contains(const Point& p) const;

  // Bounding box of pts expanded by margin (pixels) on every side.
  static Region bounding(const std::vector<Point>& pts, double margin);
};

// An ordered point set with a marker prefix of labels 1..K, possibly with
// gaps. marker_slots[k] holds the point index carrying label k+1, or nullopt
// when that marker was not located.
struct Configuration {
  std::vector<Point> points;
  std::vector<std::optional<std::size_t>> marker_slots;
  std::size_t dim = 2;

  std::size_t size() const { return points.size(); }
  std::size_t marker_count() const { return marker_slots.size(); }      // K
  std::size_t located_count() const;                                    // K_mu / K_x
  std::size_t nonmarker_count() const { return size() - located_count(); }

  // nullopt when point idx carries no marker label; otherwise the 0-based slot.
  std::optional<std::size_t> label_of(std::size_t point_index) const;

  void validate() const;  // throws DegenerateError on invariant violations
};

Configuration make_configuration(std::vector<Point> points,
                                 std::vector<std::optional<std::size_t>> marker_slots,
                                 std::size_t dim = 2);

// Hard/soft correspondence: one row per x point; row 0 means unmatched,
// row i >= 1 refers to mu point i-1.
struct MatchMatrix {
  std::vector<std::size_t> row_for_column;  // length K+n
  std::size_t rows = 0;                     // K+m+1 including row 0

  std::size_t columns() const { return row_for_column.size(); }
  bool hard_feasible() const;  // every row >= 1 used at most once
  std::size_t matched_count() const;
  // (mu point index, x point index) for every matched column, ordered by column.
  std::vector<std::pair<std::size_t, std::size_t>> matched_pairs() const;

  void validate() const;  // column entries within [0, rows)
};

struct ModelParams {
  double sigma2 = 1.0;        // error variance, pixels^2
  double sigma_star2 = 1.0;   // marker-prior variance, pixels^2
  double p_m = 0.99;          // marker-identity prior probability
  double convergence_exponent = 8.0;  // l; converged when mean sq change <= 10^-l
  std::size_t max_iterations = 500;

  void validate() const;
};

// --- operations ------------------------------------------------------------

// Applies t to every point; marker slots are preserved.
Configuration apply_transform(const AffineTransform& t, const Configuration& c);

// p(x_j | M_ij = 1): Gaussian around the transformed mu point for a matched
// row, uniform 1/|Omega| for the unmatched row (transformed_mu == nullopt).
double match_density(const Point& x_j, const std::optional<Point>& transformed_mu, double sigma2,
                     const Region& omega);
double log_match_density(const Point& x_j, const std::optional<Point>& transformed_mu,
                         double sigma2, const Region& omega);

// Root mean squared Euclidean distance over pairs. Throws on an empty list.
double rmsd(const std::vector<std::pair<Point, Point>>& pairs);

}  // namespace gelmatch
