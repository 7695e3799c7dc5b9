#include "gelmatch/priors.hpp"

#include <cmath>
#include <string>

namespace gelmatch {

void PriorMatrix::validate(double tol) const {
  for (std::size_t j = 0; j < cols(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rows(); ++i) {
      const double v = q(i, j);
      if (v < 0.0 || v > 1.0)
        throw DegenerateError("prior matrix: entry outside [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol)
      throw DegenerateError("prior matrix: column " + std::to_string(j) +
                            " not stochastic (sum " + std::to_string(sum) + ")");
  }
}

namespace {

double background_mass(const Region& omega) {
  const double q0 = 1.0 / omega.area();
  if (q0 >= 1.0)
    throw DegenerateError("invalid region: 1/|Omega| >= 1 leaves no mass for matches");
  return q0;
}

void fill_uniform_column(Matrix& q, std::size_t j) {
  const double u = 1.0 / static_cast<double>(q.rows());
  for (std::size_t i = 0; i < q.rows(); ++i) q(i, j) = u;
}

void fill_gaussian_column(Matrix& q, std::size_t j, const Configuration& mu,
                          const Point& reference, double q0, double sigma_star2) {
  double total = 0.0;
  std::vector<double> w(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    w[i] = std::exp(-squared_distance(mu.points[i], reference) / (2.0 * sigma_star2));
    total += w[i];
  }
  q(0, j) = q0;
  const double scale = (1.0 - q0) / total;  // total >= 1: the reference is a mu point
  for (std::size_t i = 0; i < mu.size(); ++i) q(i + 1, j) = scale * w[i];
}

void fill_cluster_column(Matrix& q, std::size_t j, const Configuration& mu,
                         const Point& reference, double q0, double epsilon) {
  std::size_t c = 0;
  std::vector<bool> in(mu.size(), false);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    in[i] = distance(mu.points[i], reference) <= epsilon;
    if (in[i]) ++c;
  }
  // c >= 1: the allocated marker is at distance 0 from itself.
  q(0, j) = q0;
  const double v = (1.0 - q0) / static_cast<double>(c);
  for (std::size_t i = 0; i < mu.size(); ++i) q(i + 1, j) = in[i] ? v : 0.0;
}

enum class MarkerColumnStyle { gaussian, cluster };

PriorMatrix build_adaptive(const Configuration& mu, const Configuration& x, const Region& omega,
                           MarkerColumnStyle style, double width, bool strict_markers) {
  mu.validate();
  x.validate();
  if (mu.located_count() == 0 && strict_markers)
    throw DegenerateError("prior: mu has no located marker");
  const double q0 = background_mass(omega);

  Matrix q(mu.size() + 1, x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto label = x.label_of(j);
    const bool located_in_mu =
        label && *label < mu.marker_count() && mu.marker_slots[*label].has_value();
    if (label && !located_in_mu && strict_markers)
      throw DegenerateError("prior: marker " + std::to_string(*label + 1) +
                            " located in x but not in mu; use the missing-marker prior");
    if (!located_in_mu) {
      fill_uniform_column(q, j);  // 1/(K_mu + m + 1) over all possibilities
      continue;
    }
    const Point& ref = mu.points[*mu.marker_slots[*label]];
    if (style == MarkerColumnStyle::gaussian)
      fill_gaussian_column(q, j, mu, ref, q0, width);
    else
      fill_cluster_column(q, j, mu, ref, q0, width);
  }
  PriorMatrix out{std::move(q)};
  out.validate();
  return out;
}

}  // namespace

PriorMatrix build_standard_prior(const Configuration& mu, const Configuration& x,
                                 const Region& omega, double sigma_star2) {
  if (!(sigma_star2 > 0.0)) throw DegenerateError("prior: sigma_star2 must be positive");
  return build_adaptive(mu, x, omega, MarkerColumnStyle::gaussian, sigma_star2,
                        /*strict_markers=*/true);
}

PriorMatrix build_missing_prior(const Configuration& mu, const Configuration& x,
                                const Region& omega, double sigma_star2) {
  if (!(sigma_star2 > 0.0)) throw DegenerateError("prior: sigma_star2 must be positive");
  return build_adaptive(mu, x, omega, MarkerColumnStyle::gaussian, sigma_star2,
                        /*strict_markers=*/false);
}

PriorMatrix build_cluster_prior(const Configuration& mu, const Configuration& x,
                                const Region& omega, double epsilon) {
  if (!(epsilon > 0.0)) throw DegenerateError("prior: cluster radius must be positive");
  return build_adaptive(mu, x, omega, MarkerColumnStyle::cluster, epsilon,
                        /*strict_markers=*/true);
}

PriorMatrix build_gross_prior(std::size_t marker_count, double p_m) {
  if (marker_count == 0) throw DegenerateError("gross prior: no markers");
  if (!(p_m > 0.0 && p_m < 1.0)) throw DegenerateError("gross prior: p_M must lie in (0,1)");
  const std::size_t k = marker_count;
  Matrix q(k + 1, k);
  const double off = (1.0 - p_m) / static_cast<double>(k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i <= k; ++i) q(i, j) = (i == j + 1) ? p_m : off;
    // With rows {0..K} each column already sums to exactly 1; the rescale
    // guards the constraint against any future row-layout change.
    double sum = 0.0;
    for (std::size_t i = 0; i <= k; ++i) sum += q(i, j);
    for (std::size_t i = 0; i <= k; ++i) q(i, j) /= sum;
  }
  PriorMatrix out{std::move(q)};
  out.validate();
  return out;
}

PriorMatrix build_prior(const MarkerIdentityModel& model, const Configuration& mu,
                        const Configuration& x, const Region& omega) {
  switch (model.variant) {
    case PriorVariant::gaussian_distance:
      return build_missing_prior(mu, x, omega, model.sigma_star2);
    case PriorVariant::cluster_adaptive:
      return build_cluster_prior(mu, x, omega, model.cluster_radius);
    case PriorVariant::gross_flat: {
      if (mu.nonmarker_count() != 0 || x.nonmarker_count() != 0 ||
          mu.located_count() != mu.marker_count() || x.located_count() != x.marker_count() ||
          mu.marker_count() != x.marker_count())
        throw DegenerateError("gross prior: defined only for fully located marker-only pairs");
      return build_gross_prior(mu.marker_count(), model.p_m);
    }
  }
  throw std::invalid_argument("build_prior: unknown variant");
}

}  // namespace gelmatch
