#pragma once

#include "gelmatch/core.hpp"
#include "gelmatch/em.hpp"

namespace gelmatch {

enum class MatchMode { hard, soft };

// log p_ji with -inf allowed for exact zeros. Rows: x points. Columns: row 0
// (unmatched) then mu points.
struct HardeningProblem {
  Matrix log_post;  // (K+n) x (K+m+1)
  MatchMode mode = MatchMode::hard;

  static HardeningProblem from_posterior(const PosteriorMatrix& p, MatchMode mode);
};

// Maximizes sum_j log p_{j, i(j)}. Hard mode: each row i >= 1 used at most
// once (exact rectangular assignment; the unmatched row is replicated so the
// one-option-per-point constraint applies); soft mode: per-column argmax.
// Equal-objective ties resolve to the assignment vector (row for x point 0,
// row for x point 1, ...) that is lexicographically smallest.
// Throws InfeasibleError when some x point has no finite candidate.
MatchMatrix harden(const HardeningProblem& prob);

// sum_ij M_ij log p_ji for a feasible matching; throws InfeasibleError when m
// violates the mode's constraints.
double matching_objective(const MatchMatrix& m, const HardeningProblem& prob);

}  // namespace gelmatch
