#pragma once

#include "gelmatch/core.hpp"

namespace gelmatch {

// Column-stochastic prior match probabilities q_ij = p(M_ij = 1).
// Rows: 0 = unmatched, i >= 1 = mu point i-1. Columns: x points.
struct PriorMatrix {
  Matrix q;  // (K+m+1) x (K+n)

  std::size_t rows() const { return q.rows(); }
  std::size_t cols() const { return q.cols(); }

  void validate(double tol = 1e-12) const;  // columns sum to 1, entries in [0,1]
};

enum class PriorVariant { gaussian_distance, gross_flat, cluster_adaptive };

struct MarkerIdentityModel {
  PriorVariant variant = PriorVariant::gaussian_distance;
  double sigma_star2 = 1.0;    // warp-error variance between points in mu
  double p_m = 0.99;           // used by gross_flat
  double cluster_radius = 5.0; // epsilon (pixels), used by cluster_adaptive
};

// Marker column j (label located in both mu and x): q_0j = 1/|Omega| and the
// remaining mass spread over all mu points in proportion to
// exp(-||mu_i - mu_ref||^2 / (2 sigma_star2)). Nonmarker columns are uniform
// over all K+m+1 possibilities. Requires every located marker in x to be
// located in mu as well; build_missing_prior is the lenient variant.
PriorMatrix build_standard_prior(const Configuration& mu, const Configuration& x,
                                 const Region& omega, double sigma_star2);

// Marker-only prior for gross-misallocation screening: (K+1) x K with
// q_jj = p_M and (1 - p_M)/K everywhere else in the column (row 0 included).
PriorMatrix build_gross_prior(std::size_t marker_count, double p_m);

// Handles partially located markers: a marker located in both keeps the
// standard marker column; located in x alone, its column falls back to the
// uniform nonmarker treatment 1/(K_mu + m + 1); located in mu alone there is
// no column to build (the row participates like any other mu point); located
// in neither contributes nothing.
PriorMatrix build_missing_prior(const Configuration& mu, const Configuration& x,
                                const Region& omega, double sigma_star2);

// Cluster-adaptive marker columns: equal weight over the mu points within
// distance epsilon of the allocated marker, exact zero outside.
PriorMatrix build_cluster_prior(const Configuration& mu, const Configuration& x,
                                const Region& omega, double epsilon);

// Dispatch on the model variant. gross_flat requires marker-only inputs.
PriorMatrix build_prior(const MarkerIdentityModel& model, const Configuration& mu,
                        const Configuration& x, const Region& omega);

}  // namespace gelmatch
