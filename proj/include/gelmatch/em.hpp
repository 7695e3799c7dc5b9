#pragma once

#include "gelmatch/core.hpp"
#include "gelmatch/priors.hpp"

namespace gelmatch {

// Posterior match probabilities p[j][i] = p(M_ij = 1 | x_j).
// Rows: x points. Columns: 0 = unmatched, i >= 1 = mu point i-1.
struct PosteriorMatrix {
  Matrix p;  // (K+n) x (K+m+1)

  std::size_t rows() const { return p.rows(); }
  std::size_t cols() const { return p.cols(); }

  void validate(double tol = 1e-10) const;  // rows sum to 1, entries in [0,1]
};

// Least-squares coefficients R = (mu*' mu*)^-1 mu*' x over paired markers,
// where mu* = [1_K, mu]. R' holds b in its first column and A in the rest.
struct InitRegression {
  Matrix r;  // (d+1) x d
  AffineTransform transform() const;
};

struct EMIterationRecord {
  std::size_t iteration = 0;
  double log_likelihood = 0.0;
  double mean_sq_change = 0.0;  // 0 for the initial record
  AffineTransform transform;
};

struct EMState {
  AffineTransform transform;
  PosteriorMatrix posteriors;
  std::size_t iteration = 0;      // number of M-steps taken
  double observed_loglik = 0.0;
  bool converged = false;
  std::size_t degenerate_columns = 0;  // E-step all-zero fallbacks (diagnostic)
  std::vector<EMIterationRecord> trace;
};

// Fit of x ~ A mu + b over paired marker coordinates.
// Throws DegenerateError for K < d+1 or collinear landmarks.
InitRegression marker_regression(const std::vector<Point>& mu_markers,
                                 const std::vector<Point>& x_markers);
AffineTransform initial_transform(const std::vector<Point>& mu_markers,
                                  const std::vector<Point>& x_markers);

// sigma^2 = (1/nu) sum ||x_j - A mu_j - b||^2 with nu = dK - d^2 - d.
// Throws DegenerateError when K <= d+1 (nu would be nonpositive).
double estimate_sigma2(const std::vector<Point>& mu_markers, const std::vector<Point>& x_markers,
                       const AffineTransform& t0);

// Bayes posteriors for every x point. A column whose numerators are all zero
// (possible only with a non-stochastic prior) puts all mass on the unmatched
// row and bumps *degenerate_columns. Per-point marginal log-likelihood terms
// land in *loglik when given.
PosteriorMatrix e_step(const Configuration& x, const Configuration& mu, const AffineTransform& t,
                       const PriorMatrix& q, double sigma2, const Region& omega,
                       std::size_t* degenerate_columns = nullptr, double* loglik = nullptr);

// Closed-form weighted least squares for (A, b); unmatched row excluded.
// Throws DegenerateError when the weighted mu scatter is singular.
AffineTransform m_step(const Configuration& x, const Configuration& mu, const PosteriorMatrix& p);

double mean_sq_change(const PosteriorMatrix& prev, const PosteriorMatrix& next);

// Mean squared posterior change <= 10^-l over all (K+m+1)(K+n) cells.
bool converged(const PosteriorMatrix& prev, const PosteriorMatrix& next, double exponent);

// sum_j log sum_i q_ij p(x_j | M_ij = 1): the observed-data log-likelihood.
double observed_loglik(const Configuration& x, const Configuration& mu, const AffineTransform& t,
                       const PriorMatrix& q, double sigma2, const Region& omega);

// Alternates E and M steps from t0 until the posterior change criterion or
// params.max_iterations. Non-convergence is flagged, not an error.
EMState run_em(const Configuration& x, const Configuration& mu, const PriorMatrix& q,
               const ModelParams& params, const AffineTransform& t0, const Region& omega);

}  // namespace gelmatch
