#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sofic/perm.hpp"

namespace sofic {

/// An arbitrary function Z/nZ -> Z/nZ; bijective() is verified at construction.
class ZnFunction {
 public:
  ZnFunction() = default;
  explicit ZnFunction(std::vector<std::uint64_t> image);
  static ZnFunction from_permutation(const Permutation& p);

  std::uint64_t n() const { return image_.size(); }
  std::uint64_t operator()(std::uint64_t x) const { return image_[x]; }
  const std::vector<std::uint64_t>& image() const { return image_; }
  bool bijective() const { return bijective_; }

  /// Throws std::invalid_argument when not bijective.
  ZnFunction inverse() const;
  Permutation as_permutation() const;

  friend bool operator==(const ZnFunction& a, const ZnFunction& b) { return a.image_ == b.image_; }

 private:
  std::vector<std::uint64_t> image_;
  bool bijective_ = false;
};

ZnFunction compose(const ZnFunction& f, const ZnFunction& g);  // f(g(x))

struct DefectReport {
  std::vector<std::uint64_t> defect;                  // f(x+1) != m f(x), cyclically
  std::vector<std::uint64_t> four_periodic_failures;  // f^4(x) != x
  Rational defect_fraction;
  Rational failure_fraction;
};

/// Throws std::invalid_argument when gcd(m, n) != 1.
DefectReport defect_report(const ZnFunction& f, std::uint64_t m);

/// Recomputes both sets by a second, table-based scan and compares.
bool defect_report_consistent(const ZnFunction& f, std::uint64_t m, const DefectReport& report);

/// |{x : f(x+1) != m f(x) or f^3(x) != x}|.
std::size_t mezo_failures(const ZnFunction& f, std::uint64_t m);

struct MezoMinimum {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::size_t min_failures = 0;
  ZnFunction minimizer;  // lexicographically first attaining the minimum
};

/// Exhaustive over all n! bijections (n <= 10).
MezoMinimum min_mezo_failures(std::uint64_t n, std::uint64_t m);

struct InducedMap {
  ZnFunction g;                 // g(x) = f^2(f^{-2}(x) + 1)
  std::size_t praktisch_holds;  // |{x : g(m x) = m^m g(x)}|
};

InducedMap induce_g(const ZnFunction& f, std::uint64_t m);

struct H3Witness {
  ZnFunction g1, g2, g3;
  HammingValue g1_displacement{0, 1};
  std::array<HammingValue, 3> relator_defect{HammingValue{0, 1}, HammingValue{0, 1}, HammingValue{0, 1}};
  bool conjugation_identities = false;  // g3 = f g1 f^-1 and g2 = f^2 g1 f^-2
};

H3Witness h3_witness(const ZnFunction& f, std::uint64_t m);

/// f(x) = m^x for x < n-1, f(n-1) = 0; n prime and m a primitive root.
ZnFunction exp_like_bijection(std::uint64_t n, std::uint64_t m);

struct PadicContext {
  std::uint64_t p = 0;
  unsigned r = 0;
  std::uint64_t m = 0;  // 0 when built from s directly
  std::uint64_t modulus = 0;  // p^r
  std::uint64_t s = 0;
  bool p_divides_m_minus_1 = false;
  /// s^x mod p^r with x reduced mod p^{r-1}.
  std::uint64_t s_pow(std::uint64_t x) const;
};

PadicContext padic_context(std::uint64_t p, unsigned r, std::uint64_t m);
/// Requires s = 1 mod p.
PadicContext padic_context_from_s(std::uint64_t p, unsigned r, std::uint64_t s);

using Quad = std::array<std::uint64_t, 4>;

struct PadicFixedPoint {
  Quad candidate{};
  bool fixed = false;
};

/// G(x) = (c4 s^{x4}, c1 s^{x1}, c2 s^{x2}, c3 s^{x3}); lifts the unique
/// candidate digit by digit. Throws when some c_j is not a unit.
PadicFixedPoint padic_fixed_point(const PadicContext& ctx, const Quad& c);
Quad padic_G(const PadicContext& ctx, const Quad& c, const Quad& x);

/// All fixed points by exhaustion over (Z/p^r)^4; refuses p^{4r} > limit.
std::vector<Quad> padic_fixed_points_brute(const PadicContext& ctx, const Quad& c, std::uint64_t limit = 1'000'000);

struct NorviReport {
  std::size_t defect_count = 0;         // f(x+1) != m f(x)
  std::size_t defect_count_recheck = 0;
  std::size_t nonperiodic_count = 0;    // f^4(x) != x
  std::size_t nonperiodic_recheck = 0;
  bool periodic_branch = false;  // nonperiodic >= p^r / 2
  bool defect_branch = false;    // defect >= p^{r/4 - 1} / 2^{1/4}
  bool dichotomy = false;
  bool proof_regime = false;     // r >= 5
  bool hypothesis_ok = false;    // p does not divide m - 1
  std::size_t multiplier_count = 0;  // |{g(x) s^{-x}}| with g(x) = m^{-1} f(m x)
};

/// n must be p^r; f bijective.
NorviReport norvi_audit(const ZnFunction& f, std::uint64_t m);

struct DegreeMAudit {
  std::vector<std::uint64_t> multipliers;  // distinct g(x)/x^m, x != 0, ascending
  std::uint64_t g_at_zero = 0;
  std::size_t triple_solutions = 0;         // summed over all (j1, j2, j3)
  std::size_t max_solutions_per_triple = 0;
  bool per_triple_cap_ok = true;            // <= m^3
  std::size_t relator_solutions = 0;        // g(g(g(x)+1)+1)+1 = x
};

/// n = p prime, p does not divide m. Refuses k^3 p above budget.
DegreeMAudit degree_m_audit(const ZnFunction& g, std::uint64_t m, std::uint64_t budget = 200'000'000);

struct SearchResult {
  ZnFunction f;
  std::uint64_t n = 0, m = 0, seed = 0, budget = 0;
  std::size_t defect = 0;
  bool exhaustive = false;
  bool budget_exhausted = false;
  std::uint64_t steps = 0;
  std::array<std::size_t, 3> cycle_histogram{};  // fixed points, 2-cycles, 4-cycles
};

struct AnnealSchedule {
  double t_start = 2.0;
  double t_end = 0.02;
};

/// Minimizes |D| over f with f^4 = id: exhaustive for n <= 10 (budget caps the
/// enumeration), simulated annealing above (budget = moves).
SearchResult search_local_exp(std::uint64_t n, std::uint64_t m, std::uint64_t budget, std::uint64_t seed,
                              const AnnealSchedule& schedule = {});

/// Runs each seed on a worker pool and keeps the lowest defect, then lowest seed.
SearchResult search_best_of(std::uint64_t n, std::uint64_t m, std::uint64_t budget,
                            const std::vector<std::uint64_t>& seeds, unsigned workers,
                            const AnnealSchedule& schedule = {});

nlohmann::json to_json(const ZnFunction& f);
ZnFunction zn_function_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SearchResult& r);

}  // namespace sofic
