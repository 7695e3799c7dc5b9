#include "gelmatch/hardening.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace gelmatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exact rectangular min-cost assignment (Jonker-Volgenant style shortest
// augmenting paths with potentials). Every left node gets a distinct right
// node; +inf marks a forbidden pair. n_left <= n_right required.
struct LapResult {
  std::vector<std::size_t> right_for_left;
  std::vector<double> u, v;  // potentials, 0-based like the cost matrix
};

LapResult solve_lap(const std::vector<std::vector<double>>& cost, std::size_t n_left,
                    std::size_t n_right) {
  std::vector<double> u(n_left + 1, 0.0), v(n_right + 1, 0.0);
  std::vector<std::size_t> match(n_right + 1, 0);  // column j -> row (1-based, 0 = free)
  std::vector<std::size_t> way(n_right + 1, 0);

  for (std::size_t i = 1; i <= n_left; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n_right + 1, kInf);
    std::vector<bool> used(n_right + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = match[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      const std::vector<double>& row = cost[i0 - 1];
      for (std::size_t j = 1; j <= n_right; ++j) {
        if (used[j]) continue;
        const double cur = row[j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (delta == kInf)
        throw InfeasibleError("infeasible column: x point " + std::to_string(i - 1) +
                              " has no assignable candidate");
      for (std::size_t j = 0; j <= n_right; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  LapResult res;
  res.right_for_left.assign(n_left, 0);
  for (std::size_t j = 1; j <= n_right; ++j)
    if (match[j] != 0) res.right_for_left[match[j] - 1] = j - 1;
  res.u.assign(u.begin() + 1, u.end());
  res.v.assign(v.begin() + 1, v.end());
  return res;
}

// Cost layout for the hard matcher: left = x points; right = the K+m real mu
// rows followed by one private "unmatched" copy per x point, so the square
// assignment formulation covers the unlimited row 0.
struct HardInstance {
  std::size_t n_x, n_real;
  std::vector<std::vector<double>> cost;

  std::size_t right_count() const { return n_real + n_x; }
  std::size_t right_of(std::size_t out_row, std::size_t j) const {
    return out_row == 0 ? n_real + j : out_row - 1;
  }
  std::size_t out_of(std::size_t right, std::size_t j) const {
    return right >= n_real ? (right == n_real + j ? 0 : kBadRow) : right + 1;
  }
  static constexpr std::size_t kBadRow = static_cast<std::size_t>(-1);
};

HardInstance make_instance(const Matrix& log_post) {
  HardInstance inst;
  inst.n_x = log_post.rows();
  inst.n_real = log_post.cols() - 1;
  inst.cost.assign(inst.n_x, std::vector<double>(inst.right_count(), kInf));
  for (std::size_t j = 0; j < inst.n_x; ++j) {
    for (std::size_t i = 0; i < inst.n_real; ++i) inst.cost[j][i] = -log_post(j, i + 1);
    inst.cost[j][inst.n_real + j] = -log_post(j, 0);
  }
  return inst;
}

std::vector<std::size_t> rows_from_lap(const HardInstance& inst, const LapResult& res) {
  std::vector<std::size_t> rows(inst.n_x);
  for (std::size_t j = 0; j < inst.n_x; ++j) rows[j] = inst.out_of(res.right_for_left[j], j);
  return rows;
}

// Fixed-order total so tie comparisons agree bit for bit with enumeration.
double assignment_cost(const HardInstance& inst, const std::vector<std::size_t>& rows) {
  double total = 0.0;
  for (std::size_t j = 0; j < inst.n_x; ++j) total += inst.cost[j][inst.right_of(rows[j], j)];
  return total;
}

LapResult solve_forced(const HardInstance& inst, const std::vector<std::size_t>& rows,
                       std::size_t upto, std::size_t j_forced, std::size_t right_forced) {
  std::vector<std::vector<double>> cost = inst.cost;
  auto pin = [&](std::size_t j, std::size_t right) {
    for (std::size_t r = 0; r < inst.right_count(); ++r)
      if (r != right) cost[j][r] = kInf;
  };
  for (std::size_t j = 0; j < upto; ++j) pin(j, inst.right_of(rows[j], j));
  pin(j_forced, right_forced);
  return solve_lap(cost, inst.n_x, inst.right_count());
}

// Rewrites the optimum into the lexicographically smallest equal-cost
// assignment. Candidates are screened with the solver's duals (any optimal
// assignment uses only zero-reduced-cost pairs), then confirmed by an exact
// constrained re-solve, so the pass is free on tie-less instances.
std::vector<std::size_t> lexicographic_refine(const HardInstance& inst, const LapResult& base,
                                              std::vector<std::size_t> rows) {
  const double target = assignment_cost(inst, rows);
  double scale = 1.0;
  for (const auto& row : inst.cost)
    for (double c : row)
      if (c != kInf) scale = std::max(scale, std::abs(c));
  const double eps = 1e-7 * scale;

  for (std::size_t j = 0; j < inst.n_x; ++j) {
    for (std::size_t out = 0; out < rows[j]; ++out) {
      const std::size_t right = inst.right_of(out, j);
      const double c = inst.cost[j][right];
      if (c == kInf) continue;
      if (c - base.u[j] - base.v[right] > eps) continue;
      try {
        LapResult forced = solve_forced(inst, rows, j, j, right);
        std::vector<std::size_t> cand = rows_from_lap(inst, forced);
        if (assignment_cost(inst, cand) == target) {
          rows = std::move(cand);
          break;
        }
      } catch (const InfeasibleError&) {
        // forcing this pair strands another point; keep looking
      }
    }
  }
  return rows;
}

std::vector<std::size_t> harden_soft(const Matrix& log_post) {
  std::vector<std::size_t> rows(log_post.rows());
  for (std::size_t j = 0; j < log_post.rows(); ++j) {
    std::size_t best = 0;
    double best_v = -kInf;
    for (std::size_t i = 0; i < log_post.cols(); ++i) {
      if (log_post(j, i) > best_v) {
        best_v = log_post(j, i);
        best = i;
      }
    }
    if (best_v == -kInf)
      throw InfeasibleError("infeasible column: x point " + std::to_string(j) +
                            " has no finite posterior");
    rows[j] = best;
  }
  return rows;
}

}  // namespace

HardeningProblem HardeningProblem::from_posterior(const PosteriorMatrix& p, MatchMode mode) {
  Matrix lp(p.rows(), p.cols());
  for (std::size_t j = 0; j < p.rows(); ++j)
    for (std::size_t i = 0; i < p.cols(); ++i) lp(j, i) = std::log(p.p(j, i));
  return {std::move(lp), mode};
}

MatchMatrix harden(const HardeningProblem& prob) {
  if (prob.log_post.cols() < 1) throw std::invalid_argument("harden: no rows");
  MatchMatrix m;
  m.rows = prob.log_post.cols();
  if (prob.log_post.rows() == 0) return m;

  if (prob.mode == MatchMode::soft) {
    m.row_for_column = harden_soft(prob.log_post);
    return m;
  }
  const HardInstance inst = make_instance(prob.log_post);
  const LapResult base = solve_lap(inst.cost, inst.n_x, inst.right_count());
  m.row_for_column = lexicographic_refine(inst, base, rows_from_lap(inst, base));
  return m;
}

double matching_objective(const MatchMatrix& m, const HardeningProblem& prob) {
  if (m.row_for_column.size() != prob.log_post.rows() || m.rows != prob.log_post.cols())
    throw std::invalid_argument("matching_objective: shape mismatch");
  m.validate();
  if (prob.mode == MatchMode::hard && !m.hard_feasible())
    throw InfeasibleError("matching_objective: matching reuses a row in hard mode");
  double total = 0.0;
  for (std::size_t j = 0; j < m.row_for_column.size(); ++j)
    total += prob.log_post(j, m.row_for_column[j]);
  return total;
}

}  // namespace gelmatch
