#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sofic/tiling.hpp"

namespace sofic {

struct ConjugatorOptions {
  Rational eps{1, 4};
  /// Tiling parameters for both sides; the construction uses eps/7 for both.
  std::optional<Rational> tile_eps;
  std::optional<Rational> tile_kappa;
  Shapes shapes;
  std::optional<std::size_t> min_degree;
  std::optional<Rational> max_bad_fraction;
};

struct Conjugator {
  Permutation tau;
  std::vector<Point> support1;  // Lambda_1, ascending
  std::vector<Point> support2;  // Lambda_2 = tau(Lambda_1), ascending
  /// rho[j-1] pairs (c, rho_j(c)) for c in C'_{1,j}, ascending in c.
  std::vector<std::vector<std::pair<Point, Point>>> rho;
  /// trimmed[j-1][i] lists indices into F_j forming F_{j,c} for the i-th pair.
  std::vector<std::vector<std::vector<std::uint32_t>>> trimmed;
  Tiling tiling1;
  Tiling tiling2;
  Rational support_fraction;
  Rational min_trim_fraction;  // min |F_{j,c}| / |F_j|
  std::size_t s_prime_size = 0;  // |S_0 u S u S F_k u F_k^{-1}| for S = {a_1, a_2}
};

struct InsufficientSupport : std::runtime_error {
  InsufficientSupport(const std::string& what, Rational fraction) : std::runtime_error(what), fraction(std::move(fraction)) {}
  Rational fraction;
};

/// Tiles both approximations, trims the shapes to genuinely disjoint tiles,
/// equalizes center counts and transports tiles coordinate-wise. Throws
/// TypedTilingError when a side cannot be tiled and InsufficientSupport when
/// |Lambda_1| < (1 - 4 eps/7) n.
Conjugator build_conjugator(const SoficApprox& phi1, const SoficApprox& phi2, const ConjugatorOptions& options);

struct ConjugacyDefect {
  std::vector<std::pair<std::string, HammingValue>> per_key;
  std::optional<HammingValue> max;
  bool pass = false;
  /// Proof bookkeeping per key: |Lambda_{1,s}|, |R_1|, |R_2| over n.
  std::vector<std::array<Rational, 3>> regularity;
};

/// max over s in S of d_h(tau phi1(s) tau^{-1}, phi2(s)); pass iff <= eps.
ConjugacyDefect conjugacy_defect(const Conjugator& c, const SoficApprox& phi1, const SoficApprox& phi2,
                                 const std::vector<BsElement>& keys, const Rational& eps);

/// The same measurement for an arbitrary tau (no tile bookkeeping).
ConjugacyDefect conjugacy_defect(const Permutation& tau, const SoficApprox& phi1, const SoficApprox& phi2,
                                 const std::vector<BsElement>& keys, const Rational& eps);

nlohmann::json to_json(const Conjugator& c);

}  // namespace sofic
