#include "gelmatch/marker_qc.hpp"

#include <cmath>
#include <string>

#include "gelmatch/em.hpp"

namespace gelmatch {

const char* to_string(MissingCase c) {
  switch (c) {
    case MissingCase::both: return "a";
    case MissingCase::mu_only: return "b";
    case MissingCase::x_only: return "c";
    case MissingCase::neither: return "d";
  }
  return "?";
}

const char* to_string(MarkerOutcome o) {
  switch (o) {
    case MarkerOutcome::matched_to_self: return "matched_to_self";
    case MarkerOutcome::unmatched_in_x: return "unmatched_in_x";
    case MarkerOutcome::mu_unmatched: return "mu_unmatched";
    case MarkerOutcome::cross_matched: return "cross_matched";
  }
  return "?";
}

namespace {

Configuration marker_only_configuration(const std::vector<Point>& pts) {
  std::vector<std::optional<std::size_t>> slots(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) slots[k] = k;
  return make_configuration(pts, std::move(slots), pts.empty() ? 2 : pts.front().size());
}

std::vector<std::pair<Point, Point>> transformed_pairs(const std::vector<Point>& mu,
                                                       const std::vector<Point>& x,
                                                       const AffineTransform& t,
                                                       const std::vector<std::size_t>& subset) {
  std::vector<std::pair<Point, Point>> pairs;
  pairs.reserve(subset.size());
  for (std::size_t k : subset) pairs.emplace_back(t.apply(mu[k]), x[k]);
  return pairs;
}

}  // namespace

QCReport detect_misallocated(const std::vector<Point>& mu_markers,
                             const std::vector<Point>& x_markers, double p_m, double sigma2,
                             const QCOptions& opts) {
  const std::size_t k = mu_markers.size();
  if (k != x_markers.size()) throw std::invalid_argument("qc: marker list size mismatch");
  if (k == 0) throw DegenerateError("qc: no markers");
  const std::size_t d = mu_markers.front().size();
  if (k < d + 2)
    throw DegenerateError("cannot proceed: gross-marker QC needs at least d+2 markers");
  if (!(sigma2 > 0.0)) throw DegenerateError("qc: sigma2 must be positive");

  QCReport rep;
  rep.sigma2 = sigma2;
  rep.initial_fit = initial_transform(mu_markers, x_markers);

  std::vector<std::size_t> all(k);
  for (std::size_t i = 0; i < k; ++i) all[i] = i;
  rep.rmsd_before = rmsd(transformed_pairs(mu_markers, x_markers, rep.initial_fit, all));

  const Configuration mu_cfg = marker_only_configuration(mu_markers);
  const Configuration x_cfg = marker_only_configuration(x_markers);
  const PriorMatrix q = build_gross_prior(k, p_m);
  const Region omega = opts.omega ? *opts.omega
                                  : Region::bounding(x_markers,
                                                     opts.omega_margin * std::sqrt(sigma2));
  ModelParams params;
  params.sigma2 = sigma2;
  params.p_m = p_m;
  params.convergence_exponent = opts.convergence_exponent;
  params.max_iterations = opts.max_iterations;

  const EMState em = run_em(x_cfg, mu_cfg, q, params, rep.initial_fit, omega);
  const MatchMatrix mhat =
      harden(HardeningProblem::from_posterior(em.posteriors, MatchMode::hard));

  // Column j of mhat is marker j in x; row i >= 1 is marker i-1 in mu.
  std::vector<std::optional<std::size_t>> column_of_row(k);  // mu marker -> x marker
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t r = mhat.row_for_column[j];
    if (r != 0) column_of_row[r - 1] = j;
  }

  rep.outcomes.assign(k, MarkerOutcome::mu_unmatched);
  rep.partners.assign(k, std::nullopt);
  for (std::size_t kk = 0; kk < k; ++kk) {
    const std::size_t r = mhat.row_for_column[kk];
    if (r == kk + 1) {
      rep.outcomes[kk] = MarkerOutcome::matched_to_self;
    } else if (r != 0) {
      rep.outcomes[kk] = MarkerOutcome::cross_matched;  // x_k taken by mu_{r-1}
      rep.partners[kk] = r - 1;
    } else if (column_of_row[kk] && *column_of_row[kk] != kk) {
      rep.outcomes[kk] = MarkerOutcome::cross_matched;  // mu_k went to x_{j}
      rep.partners[kk] = *column_of_row[kk];
    } else {
      // x_k fell to the unmatched row; with hard matching mu_k is then also
      // unused (anything else would be a cross-match), i.e. unmatched in both.
      rep.outcomes[kk] = MarkerOutcome::unmatched_in_x;
    }
    if (rep.outcomes[kk] == MarkerOutcome::matched_to_self) rep.retained.push_back(kk);
  }

  if (rep.retained.size() < d + 2)
    throw DegenerateError("cannot proceed: only " + std::to_string(rep.retained.size()) + " of " +
                          std::to_string(k) + " markers retained by QC");

  std::vector<Point> mu_kept, x_kept;
  for (std::size_t kk : rep.retained) {
    mu_kept.push_back(mu_markers[kk]);
    x_kept.push_back(x_markers[kk]);
  }
  rep.refit = initial_transform(mu_kept, x_kept);
  std::vector<std::size_t> kept_idx(mu_kept.size());
  for (std::size_t i = 0; i < kept_idx.size(); ++i) kept_idx[i] = i;
  rep.rmsd_after = rmsd(transformed_pairs(mu_kept, x_kept, rep.refit, kept_idx));
  return rep;
}

MissingResolution resolve_missing(const Configuration& mu, const Configuration& x) {
  mu.validate();
  x.validate();
  if (mu.marker_count() != x.marker_count())
    throw std::invalid_argument("resolve_missing: marker counts differ");

  MissingResolution res;
  res.mu = mu;
  res.x = x;
  res.mu.marker_slots.clear();
  res.x.marker_slots.clear();
  res.cases.reserve(mu.marker_count());
  for (std::size_t k = 0; k < mu.marker_count(); ++k) {
    const bool in_mu = mu.marker_slots[k].has_value();
    const bool in_x = x.marker_slots[k].has_value();
    if (in_mu && in_x) {
      res.cases.push_back(MissingCase::both);
      res.kept.push_back(k);
      res.mu.marker_slots.push_back(mu.marker_slots[k]);
      res.x.marker_slots.push_back(x.marker_slots[k]);
    } else if (in_mu) {
      res.cases.push_back(MissingCase::mu_only);  // mu_k demoted to nonmarker
    } else if (in_x) {
      res.cases.push_back(MissingCase::x_only);   // x_k demoted to nonmarker
    } else {
      res.cases.push_back(MissingCase::neither);  // marker k dropped outright
    }
  }
  if (res.kept.empty())
    throw DegenerateError("cannot initialize: no marker is located in both configurations");
  return res;
}

RefitResult final_refit(const Configuration& x, const Configuration& mu, const MatchMatrix& m) {
  const auto pairs = m.matched_pairs();
  if (pairs.size() < x.dim + 1)
    throw InfeasibleError("insufficient matches: affine refit needs at least d+1 pairs, got " +
                          std::to_string(pairs.size()));
  std::vector<Point> mu_pts, x_pts;
  mu_pts.reserve(pairs.size());
  x_pts.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    mu_pts.push_back(mu.points[i]);
    x_pts.push_back(x.points[j]);
  }
  RefitResult out;
  out.transform = initial_transform(mu_pts, x_pts);
  std::vector<std::pair<Point, Point>> rp;
  rp.reserve(pairs.size());
  for (std::size_t i = 0; i < mu_pts.size(); ++i)
    rp.emplace_back(out.transform.apply(mu_pts[i]), x_pts[i]);
  out.rmsd = rmsd(rp);
  return out;
}

}  // namespace gelmatch
