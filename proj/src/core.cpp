#include "gelmatch/core.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>

namespace gelmatch {

Point add(const Point& a, const Point& b) {
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Point sub(const Point& a, const Point& b) {
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

double squared_norm(const Point& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

double squared_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double distance(const Point& a, const Point& b) { return std::sqrt(squared_distance(a, b)); }

AffineTransform AffineTransform::identity(std::size_t dim) {
  return {Matrix::identity(dim), Point(dim, 0.0)};
}

bool AffineTransform::singular() const { return std::abs(det()) <= kSingularDetTol; }

Point AffineTransform::apply(const Point& p) const {
  const std::size_t d = dim();
  Point out(d);
  for (std::size_t r = 0; r < d; ++r) {
    double s = b[r];
    for (std::size_t c = 0; c < d; ++c) s += a(r, c) * p[c];
    out[r] = s;
  }
  return out;
}

AffineTransform AffineTransform::inverse() const {
  if (singular()) throw DegenerateError("invalid transform: A is singular");
  const std::size_t d = dim();
  Matrix ainv = solve(a, Matrix::identity(d));
  Point binv(d);
  for (std::size_t r = 0; r < d; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) s += ainv(r, c) * b[c];
    binv[r] = -s;
  }
  return {std::move(ainv), std::move(binv)};
}

Region::Region(Point lo_in, Point hi_in) : lo(std::move(lo_in)), hi(std::move(hi_in)) {
  if (lo.size() != hi.size()) throw std::invalid_argument("region: dim mismatch");
  if (lo.empty()) throw std::invalid_argument("region: empty dimension");
  if (area() <= 0.0) throw DegenerateError("invalid region: nonpositive area");
}

double Region::area() const {
  double a = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) a *= hi[i] - lo[i];
  return a;
}

bool Region::contains(const Point& p) const {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (p[i] < lo[i] || p[i] > hi[i]) return false;
  return true;
}

Region Region::bounding(const std::vector<Point>& pts, double margin) {
  if (pts.empty()) throw std::invalid_argument("region: no points to bound");
  Point lo = pts.front(), hi = pts.front();
  for (const Point& p : pts)
    for (std::size_t i = 0; i < p.size(); ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  for (std::size_t i = 0; i < lo.size(); ++i) {
    lo[i] -= margin;
    hi[i] += margin;
  }
  return Region(std::move(lo), std::move(hi));
}

std::size_t Configuration::located_count() const {
  std::size_t n = 0;
  for (const auto& s : marker_slots)
    if (s.has_value()) ++n;
  return n;
}

std::optional<std::size_t> Configuration::label_of(std::size_t point_index) const {
  for (std::size_t k = 0; k < marker_slots.size(); ++k)
    if (marker_slots[k] && *marker_slots[k] == point_index) return k;
  return std::nullopt;
}

void Configuration::validate() const {
  std::set<std::size_t> seen;
  for (const auto& slot : marker_slots) {
    if (!slot) continue;
    if (*slot >= points.size())
      throw DegenerateError("configuration: marker slot out of range");
    if (!seen.insert(*slot).second)
      throw DegenerateError("configuration: duplicate marker slot index");
  }
  for (const Point& p : points)
    if (p.size() != dim) throw DegenerateError("configuration: point dimension mismatch");
}

Configuration make_configuration(std::vector<Point> points,
                                 std::vector<std::optional<std::size_t>> marker_slots,
                                 std::size_t dim) {
  Configuration c{std::move(points), std::move(marker_slots), dim};
  c.validate();
  return c;
}

bool MatchMatrix::hard_feasible() const {
  std::vector<bool> used(rows, false);
  for (std::size_t r : row_for_column) {
    if (r == 0) continue;
    if (used[r]) return false;
    used[r] = true;
  }
  return true;
}

std::size_t MatchMatrix::matched_count() const {
  std::size_t n = 0;
  for (std::size_t r : row_for_column)
    if (r != 0) ++n;
  return n;
}

std::vector<std::pair<std::size_t, std::size_t>> MatchMatrix::matched_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t j = 0; j < row_for_column.size(); ++j)
    if (row_for_column[j] != 0) out.emplace_back(row_for_column[j] - 1, j);
  return out;
}

void MatchMatrix::validate() const {
  for (std::size_t r : row_for_column)
    if (r >= rows) throw std::invalid_argument("match matrix: row index out of range");
}

void ModelParams::validate() const {
  if (!(sigma2 > 0.0)) throw DegenerateError("params: sigma2 must be positive");
  if (!(sigma_star2 > 0.0)) throw DegenerateError("params: sigma_star2 must be positive");
  if (!(p_m > 0.0 && p_m < 1.0)) throw DegenerateError("params: p_M must lie in (0,1)");
  if (!(convergence_exponent >= 1.0)) throw DegenerateError("params: l must be >= 1");
  if (max_iterations == 0) throw DegenerateError("params: max_iterations must be >= 1");
}

Configuration apply_transform(const AffineTransform& t, const Configuration& c) {
  if (t.dim() != c.dim) throw std::invalid_argument("apply_transform: dim mismatch");
  if (t.singular()) throw DegenerateError("invalid transform: A is singular");
  Configuration out = c;
  for (Point& p : out.points) p = t.apply(p);
  return out;
}

double log_match_density(const Point& x_j, const std::optional<Point>& transformed_mu,
                         double sigma2, const Region& omega) {
  if (!transformed_mu) return -std::log(omega.area());
  if (!(sigma2 > 0.0)) throw DegenerateError("match_density: sigma2 must be positive");
  const double d = static_cast<double>(x_j.size());
  return -0.5 * d * std::log(2.0 * std::numbers::pi * sigma2) -
         squared_distance(x_j, *transformed_mu) / (2.0 * sigma2);
}

double match_density(const Point& x_j, const std::optional<Point>& transformed_mu, double sigma2,
                     const Region& omega) {
  return std::exp(log_match_density(x_j, transformed_mu, sigma2, omega));
}

double rmsd(const std::vector<std::pair<Point, Point>>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("rmsd: empty pair list");
  double s = 0.0;
  for (const auto& [a, b] : pairs) s += squared_distance(a, b);
  return std::sqrt(s / static_cast<double>(pairs.size()));
}

}  // namespace gelmatch
