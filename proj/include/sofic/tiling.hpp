#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sofic/bsgroup.hpp"
#include "sofic/soficcheck.hpp"

namespace sofic {

using Point = Permutation::Point;

struct TilingPlan {
  Rational eps;
  Rational kappa;           // as requested; conclusion (4) is checked against this
  Rational kappa_internal;  // min(kappa, eps/2), the value the construction works with
  unsigned k = 0;
  std::vector<Rational> lambda;  // lambda[j-1] = lambda_j
  Rational sigma1;
  Rational eta;  // kappa_internal / (24/eps)^{k-1}
};

/// Throws std::invalid_argument unless 0 < eps <= 1/4 and kappa > 0.
TilingPlan plan_parameters(const Rational& eps, const Rational& kappa);

/// sigma_j = lambda_j + ... + lambda_k, 1-based j; sigma_{k+1} = 0.
Rational sigma(const TilingPlan& plan, unsigned j);

/// Subsets of {0, ..., ground_size - 1}, indexed by position.
struct SetFamily {
  std::size_t ground_size = 0;
  std::vector<std::vector<Point>> sets;
};

struct Extraction {
  std::vector<std::size_t> selected;           // indices into the family, in selection order
  std::vector<std::vector<Point>> witnesses;   // pairwise disjoint A_i' subset of A_i
  std::size_t covered = 0;                     // |union of selected|
  std::size_t multiplicity = 0;                // measured M
  Rational rho;                                // 1 - sum|A| / (M |X|)
  Rational goal;                               // coverage the selection was required to reach
  bool goal_reached = false;
};

/// Greedy maximal epsilon-disjoint selection (descending size, ties by index)
/// stopped at the coverage goal eps (1 - rho) |X|, optionally capped below by
/// goal_cap, then pruned to a minimal selection.
Extraction extract_eps_disjoint(const SetFamily& family, const Rational& eps,
                                std::optional<Rational> goal_cap = std::nullopt);

/// Exact check that sets admit pairwise disjoint cores of size >= (1 - eps)|A|
/// (bipartite flow); sets must have distinct elements.
bool is_eps_disjoint(const std::vector<std::vector<Point>>& sets, std::size_t ground_size, const Rational& eps);

/// F_1 subset ... subset F_k; all shapes contain the identity.
using Shapes = std::vector<std::vector<BsElement>>;

Shapes interval_shapes(const std::vector<std::uint64_t>& lengths, std::uint64_t m);
Shapes box_shapes(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& extents, std::uint64_t m);

struct TilingOptions {
  Rational eps{1, 4};
  Rational kappa{1, 4};
  /// Admissibility threshold N; absent means 64 |F_k| / (eps kappa).
  std::optional<std::size_t> min_degree;
  /// Largest tolerated fraction of points outside B.
  std::optional<Rational> max_bad_fraction;
  /// Generators for the Folner diagnostics recorded in the tiling.
  std::vector<BsElement> probe_generators;
};

struct ShapeDiagnostics {
  std::size_t good_centers = 0;  // |B_j|
  Rational rho;
  std::size_t multiplicity = 0;
  Rational goal;
  std::vector<FolnerReport> folner;  // one per probe generator
};

struct Tiling {
  TilingPlan plan;
  Shapes shapes;
  std::vector<std::vector<Point>> centers;  // centers[j-1] = C_j
  SoficApprox phi;
  std::optional<ModelSpec> model;
  std::size_t bad_points = 0;  // n - |B|
  std::vector<ShapeDiagnostics> diagnostics;
  std::size_t min_degree = 0;
};

struct TypedTilingError : std::runtime_error {
  enum class Kind { DegreeTooSmall, NotDefined, TooCoarse, BadShapes };
  TypedTilingError(Kind kind, const std::string& what) : std::runtime_error(what), kind(kind) {}
  Kind kind;
};

/// Runs the downward construction C_k, ..., C_1. Throws TypedTilingError.
Tiling quasi_tile(const SoficApprox& phi, const Shapes& shapes, const TilingOptions& options);

struct ConclusionResult {
  bool pass = false;
  std::string detail;
};

struct TilingCertificate {
  ConclusionResult plan;       // lambda recursion and 1 - eps <= sum <= 1
  ConclusionResult disjoint;   // (1)
  ConclusionResult injective;  // (2)
  ConclusionResult covering;   // (3)
  ConclusionResult density;    // (4)
  std::vector<Rational> ratios;        // |phi(F_j) C_j| / n
  std::vector<Rational> lower_margin;  // ratio - (1 - kappa) lambda_j
  std::vector<Rational> upper_margin;  // (1 + kappa) lambda_j - ratio
  Rational coverage;
  bool pass() const {
    return plan.pass && disjoint.pass && injective.pass && covering.pass && density.pass;
  }
};

/// Recomputes all four conclusions from phi, the shapes and the centers alone.
TilingCertificate verify_tiling(const Tiling& t);

nlohmann::json to_json(const Tiling& t, const TilingCertificate& cert);
/// Rebuilds the tiling from a certificate; requires the "model" record.
Tiling tiling_from_json(const nlohmann::json& j);

}  // namespace sofic
