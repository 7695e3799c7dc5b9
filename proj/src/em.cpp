#include "gelmatch/em.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace gelmatch {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void PosteriorMatrix::validate(double tol) const {
  for (std::size_t j = 0; j < rows(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < cols(); ++i) {
      const double v = p(j, i);
      if (v < 0.0 || v > 1.0) throw DegenerateError("posterior matrix: entry outside [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol)
      throw DegenerateError("posterior matrix: row " + std::to_string(j) + " not normalized");
  }
}

AffineTransform InitRegression::transform() const {
  const std::size_t d = r.cols();
  Matrix a(d, d);
  Point b(d);
  // Row 0 of R is b'; rows 1..d are A'.
  for (std::size_t c = 0; c < d; ++c) b[c] = r(0, c);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t c = 0; c < d; ++c) a(c, i) = r(i + 1, c);
  return {std::move(a), std::move(b)};
}

InitRegression marker_regression(const std::vector<Point>& mu_markers,
                                 const std::vector<Point>& x_markers) {
  const std::size_t k = mu_markers.size();
  if (k != x_markers.size()) throw std::invalid_argument("regression: size mismatch");
  if (k == 0) throw DegenerateError("degenerate landmarks: no marker pairs");
  const std::size_t d = mu_markers.front().size();
  if (k < d + 1)
    throw DegenerateError("degenerate landmarks: need at least d+1 marker pairs, got " +
                          std::to_string(k));

  // Normal equations for mu* = [1_K, mu]: (mu*' mu*) R = mu*' x.
  Matrix g(d + 1, d + 1);
  Matrix h(d + 1, d);
  for (std::size_t j = 0; j < k; ++j) {
    const Point& m = mu_markers[j];
    const Point& x = x_markers[j];
    g(0, 0) += 1.0;
    for (std::size_t a = 0; a < d; ++a) {
      g(0, a + 1) += m[a];
      g(a + 1, 0) += m[a];
      for (std::size_t b = 0; b < d; ++b) g(a + 1, b + 1) += m[a] * m[b];
    }
    for (std::size_t c = 0; c < d; ++c) {
      h(0, c) += x[c];
      for (std::size_t a = 0; a < d; ++a) h(a + 1, c) += m[a] * x[c];
    }
  }
  Matrix r;
  try {
    r = solve(std::move(g), std::move(h));
  } catch (const DegenerateError&) {
    throw DegenerateError("degenerate landmarks: collinear or repeated markers");
  }
  return {std::move(r)};
}

AffineTransform initial_transform(const std::vector<Point>& mu_markers,
                                  const std::vector<Point>& x_markers) {
  return marker_regression(mu_markers, x_markers).transform();
}

double estimate_sigma2(const std::vector<Point>& mu_markers, const std::vector<Point>& x_markers,
                       const AffineTransform& t0) {
  const std::size_t k = mu_markers.size();
  if (k != x_markers.size()) throw std::invalid_argument("estimate_sigma2: size mismatch");
  if (k == 0) throw DegenerateError("insufficient markers: none given");
  const double d = static_cast<double>(mu_markers.front().size());
  const double nu = d * static_cast<double>(k) - d * d - d;
  if (!(nu > 0.0))
    throw DegenerateError("insufficient markers: need K > d+1 for a variance estimate");
  double ss = 0.0;
  for (std::size_t j = 0; j < k; ++j)
    ss += squared_distance(x_markers[j], t0.apply(mu_markers[j]));
  return ss / nu;
}

PosteriorMatrix e_step(const Configuration& x, const Configuration& mu, const AffineTransform& t,
                       const PriorMatrix& q, double sigma2, const Region& omega,
                       std::size_t* degenerate_columns, double* loglik) {
  if (q.rows() != mu.size() + 1 || q.cols() != x.size())
    throw std::invalid_argument("e_step: prior shape mismatch");
  if (!(sigma2 > 0.0)) throw DegenerateError("e_step: sigma2 must be positive");

  const std::size_t nrows = q.rows();
  const double log_bg = -std::log(omega.area());
  const double log_norm =
      -0.5 * static_cast<double>(x.dim) * std::log(2.0 * std::numbers::pi * sigma2);
  const double inv2s = 1.0 / (2.0 * sigma2);

  std::vector<Point> tmu(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) tmu[i] = t.apply(mu.points[i]);

  Matrix p(x.size(), nrows);
  std::vector<double> lw(nrows);
  double total_ll = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double lmax = kNegInf;
    for (std::size_t i = 0; i < nrows; ++i) {
      const double qv = q.q(i, j);
      if (qv <= 0.0) {
        lw[i] = kNegInf;
        continue;
      }
      const double ld =
          (i == 0) ? log_bg : log_norm - squared_distance(x.points[j], tmu[i - 1]) * inv2s;
      lw[i] = std::log(qv) + ld;
      if (lw[i] > lmax) lmax = lw[i];
    }
    if (lmax == kNegInf) {
      // All numerators vanished; fall back to the unmatched row.
      p(j, 0) = 1.0;
      if (degenerate_columns) ++*degenerate_columns;
      total_ll = kNegInf;
      continue;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < nrows; ++i) {
      const double v = (lw[i] == kNegInf) ? 0.0 : std::exp(lw[i] - lmax);
      p(j, i) = v;
      sum += v;
    }
    const double inv = 1.0 / sum;
    for (std::size_t i = 0; i < nrows; ++i) p(j, i) *= inv;
    total_ll += lmax + std::log(sum);
  }
  if (loglik) *loglik = total_ll;
  return {std::move(p)};
}

AffineTransform m_step(const Configuration& x, const Configuration& mu, const PosteriorMatrix& p) {
  if (p.rows() != x.size() || p.cols() != mu.size() + 1)
    throw std::invalid_argument("m_step: posterior shape mismatch");
  const std::size_t d = x.dim;

  // Row/column masses with the unmatched row excluded.
  std::vector<double> col_mass(mu.size(), 0.0);  // sum_j p_ji per mu point
  std::vector<double> row_mass(x.size(), 0.0);   // sum_{i>=1} p_ji per x point
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const double w = p.p(j, i + 1);
      col_mass[i] += w;
      row_mass[j] += w;
      total += w;
    }
  if (!(total > 0.0))
    throw DegenerateError("degenerate geometry: no posterior mass on matched rows");

  Point xbar(d, 0.0), mubar(d, 0.0);
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t c = 0; c < d; ++c) xbar[c] += row_mass[j] * x.points[j][c];
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t c = 0; c < d; ++c) mubar[c] += col_mass[i] * mu.points[i][c];
  for (std::size_t c = 0; c < d; ++c) {
    xbar[c] /= total;
    mubar[c] /= total;
  }

  // Cross and mu scatter of the centered coordinates.
  Matrix cxm(d, d), cmm(d, d);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (col_mass[i] == 0.0) continue;
    const Point mc = sub(mu.points[i], mubar);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) cmm(a, b) += col_mass[i] * mc[a] * mc[b];
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    // weighted mean of centered mu points against this x point
    Point acc(d, 0.0);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const double w = p.p(j, i + 1);
      if (w == 0.0) continue;
      for (std::size_t b = 0; b < d; ++b) acc[b] += w * (mu.points[i][b] - mubar[b]);
    }
    const Point xc = sub(x.points[j], xbar);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) cxm(a, b) += xc[a] * acc[b];
  }

  Matrix a_hat;
  try {
    // A' solves Cmm A' = Cxm'  (Cmm symmetric).
    a_hat = solve(cmm, cxm.transposed()).transposed();
  } catch (const DegenerateError&) {
    throw DegenerateError("degenerate geometry: weighted mu scatter is singular");
  }
  Point b_hat(d);
  for (std::size_t a = 0; a < d; ++a) {
    double s = xbar[a];
    for (std::size_t b = 0; b < d; ++b) s -= a_hat(a, b) * mubar[b];
    b_hat[a] = s;
  }
  return {std::move(a_hat), std::move(b_hat)};
}

double mean_sq_change(const PosteriorMatrix& prev, const PosteriorMatrix& next) {
  if (prev.rows() != next.rows() || prev.cols() != next.cols())
    throw std::invalid_argument("convergence check: shape mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < prev.rows(); ++j)
    for (std::size_t i = 0; i < prev.cols(); ++i) {
      const double dlt = next.p(j, i) - prev.p(j, i);
      s += dlt * dlt;
    }
  return s / (static_cast<double>(prev.rows()) * static_cast<double>(prev.cols()));
}

bool converged(const PosteriorMatrix& prev, const PosteriorMatrix& next, double exponent) {
  return mean_sq_change(prev, next) <= std::pow(10.0, -exponent);
}

double observed_loglik(const Configuration& x, const Configuration& mu, const AffineTransform& t,
                       const PriorMatrix& q, double sigma2, const Region& omega) {
  double ll = 0.0;
  e_step(x, mu, t, q, sigma2, omega, nullptr, &ll);
  return ll;
}

EMState run_em(const Configuration& x, const Configuration& mu, const PriorMatrix& q,
               const ModelParams& params, const AffineTransform& t0, const Region& omega) {
  params.validate();
  const double threshold = std::pow(10.0, -params.convergence_exponent);

  EMState state;
  state.transform = t0;
  double ll = 0.0;
  PosteriorMatrix prev =
      e_step(x, mu, t0, q, params.sigma2, omega, &state.degenerate_columns, &ll);
  state.trace.push_back({0, ll, 0.0, t0});

  PosteriorMatrix next = prev;
  for (std::size_t r = 1; r <= params.max_iterations; ++r) {
    AffineTransform t = m_step(x, mu, prev);
    next = e_step(x, mu, t, q, params.sigma2, omega, &state.degenerate_columns, &ll);
    const double msc = mean_sq_change(prev, next);
    state.transform = t;
    state.iteration = r;
    state.observed_loglik = ll;
    state.trace.push_back({r, ll, msc, t});
    if (msc <= threshold) {
      state.converged = true;
      break;
    }
    prev = next;
  }
  state.posteriors = std::move(next);
  return state;
}

}  // namespace gelmatch
