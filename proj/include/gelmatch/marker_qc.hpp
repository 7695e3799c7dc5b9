#pragma once

#include <optional>

#include "gelmatch/core.hpp"
#include "gelmatch/hardening.hpp"

namespace gelmatch {

// Missing-marker cases for marker k: located in both (a), in mu alone (b),
// in x alone (c), in neither (d).
enum class MissingCase { both, mu_only, x_only, neither };

enum class MarkerOutcome { matched_to_self, unmatched_in_x, mu_unmatched, cross_matched };

const char* to_string(MissingCase c);
const char* to_string(MarkerOutcome o);

struct QCOptions {
  double convergence_exponent = 8.0;
  std::size_t max_iterations = 500;
  double omega_margin = 3.0;           // bbox expansion in sigma-hat units
  std::optional<Region> omega;         // explicit override
};

struct QCReport {
  std::vector<MarkerOutcome> outcomes;               // per marker, 0-based
  std::vector<std::optional<std::size_t>> partners;  // cross-match partner
  std::vector<std::size_t> retained;                 // markers kept (0-based, ascending)
  double rmsd_before = 0.0;  // all K pairs under the full-set fit
  double rmsd_after = 0.0;   // retained pairs under the retained-set refit
  AffineTransform initial_fit, refit;
  double sigma2 = 0.0;       // variance used for the screen
};

// Gross-misallocation screen: runs the marker-only composite (flat prior, EM,
// hard matching) and classifies every marker. Markers are retained only when
// matched to themselves; a cross-match excludes both labels involved.
// Requires K >= d+2 both on input and after exclusions.
QCReport detect_misallocated(const std::vector<Point>& mu_markers,
                             const std::vector<Point>& x_markers, double p_m, double sigma2,
                             const QCOptions& opts = {});

struct MissingResolution {
  Configuration mu, x;                // marker slots reduced to the case-(a) set
  std::vector<MissingCase> cases;     // per original marker
  std::vector<std::size_t> kept;      // original labels (0-based) of the case-(a) markers
};

// Applies the four missing-marker rules: markers located on one side only are
// demoted to nonmarkers (their points stay), markers located in neither are
// dropped, and the effective K becomes the count of case-(a) markers.
// Throws DegenerateError when no marker survives in both.
MissingResolution resolve_missing(const Configuration& mu, const Configuration& x);

struct RefitResult {
  AffineTransform transform;
  double rmsd = 0.0;
};

// Treats the hardened matches as known and refits the affine map by least
// squares over the matched pairs. Throws InfeasibleError for < d+1 matches.
RefitResult final_refit(const Configuration& x, const Configuration& mu, const MatchMatrix& m);

}  // namespace gelmatch
