#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sofic/numeric.hpp"

namespace sofic {

/// x -> m^x mod n on {0, ..., n-1}; a function, not a permutation in general.
class ExpMap {
 public:
  std::uint64_t m() const { return m_; }
  std::uint64_t n() const { return n_; }
  std::uint64_t operator()(std::uint64_t x) const { return image_[x]; }
  const std::vector<std::uint64_t>& image() const { return image_; }

  friend ExpMap exp_map(std::uint64_t m, std::uint64_t n);

 private:
  std::uint64_t m_ = 0;
  std::uint64_t n_ = 0;
  std::vector<std::uint64_t> image_;
};

/// Running-product tabulation, spot-checked by square-and-multiply at 16
/// points (all points when n <= 16). Throws std::invalid_argument when
/// gcd(m, n) != 1 or n < 2, std::logic_error on a spot-check mismatch.
ExpMap exp_map(std::uint64_t m, std::uint64_t n);

/// Full comparison against square-and-multiply.
bool exp_map_matches_pow(const ExpMap& f);

/// |{x : f^k(x) = x}| by iterating f k times from each x, 1 <= k <= 4.
std::size_t count_k_periodic(const ExpMap& f, unsigned k);

/// The same counts from precomputed f^2, f^3, f^4 tables: index k-1.
std::array<std::size_t, 4> count_periodic_tables(const ExpMap& f);

struct CycleCensus {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::uint64_t order = 0;  // ord_n(m)
  std::array<std::size_t, 4> fix{};
  bool methods_agree = true;  // iteration vs tables
  bool degenerate = false;    // n <= 4
};

CycleCensus cycle_census(std::uint64_t m, std::uint64_t n);

struct GapCensus {
  std::uint64_t k = 0;
  std::size_t count = 0;  // |X n (X - k)| without wraparound
  Rational guarantee;     // delta^2 n / 4 - 1
  bool guarantee_holds = false;
};

/// Smallest 1 <= k < 2/delta maximizing |X n (X - k)|. Throws when |X| < delta n.
GapCensus gap_census(const std::vector<std::uint64_t>& X, std::uint64_t n, const Rational& delta);

struct RictuResult {
  std::uint64_t degree = 0;  // d = l^{m^k}
  std::uint64_t c = 0;       // m^{kappa_exp * n} mod n
  std::size_t count = 0;
  double bound = 0;  // (d/e + C log^2 d) n^{1 - 1/d}
  bool degenerate = false;
  bool n_prime = false;
  bool within_bound = true;  // only meaningful for prime n, non-degenerate
};

inline constexpr std::uint64_t kDefaultDegreeCap = 1'000'000;

/// Roots z in Z/nZ of (z + k)^d - c (z^l + k). Throws std::length_error past the degree cap.
RictuResult rictu_roots(std::uint64_t n, std::uint64_t m, std::uint64_t k, std::uint64_t l, std::uint64_t kappa_exp,
                        double C = 1.0, std::uint64_t degree_cap = kDefaultDegreeCap);

/// Primes in [lo, hi] by a segmented sieve.
std::vector<std::uint64_t> primes_in_range(std::uint64_t lo, std::uint64_t hi);

/// p^r for r in [rmin, rmax], ascending.
std::vector<std::uint64_t> prime_powers(std::uint64_t p, unsigned rmin, unsigned rmax);

/// One census per modulus (moduli sharing a factor with m are skipped), run on
/// a bounded worker pool and returned in modulus order.
std::vector<CycleCensus> census_sweep(std::uint64_t m, std::vector<std::uint64_t> moduli, unsigned workers);

void write_census_csv(std::ostream& os, const std::vector<CycleCensus>& rows);

}  // namespace sofic
