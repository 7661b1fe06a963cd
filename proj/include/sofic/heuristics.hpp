#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sofic/numeric.hpp"

namespace sofic {

/// P_1..P_N; exact up to n_exact, log-space only beyond.
struct RationalSeq {
  std::size_t n_exact = 0;
  std::vector<Rational> exact;   // exact[n-1] = P_n, n <= n_exact
  std::vector<double> log_p;     // log_p[n-1] = log P_n, all n

  std::size_t size() const { return log_p.size(); }
  const Rational& at(std::size_t n) const { return exact.at(n - 1); }
};

RationalSeq p_sequence(std::size_t N, std::size_t n_exact = 500);

struct SequenceChecks {
  bool recurrence = true;      // n P_n = P_{n-1} + P_{n-2} + P_{n-4}, n >= 5
  bool integral_counts = true; // n! P_n is an integer matching the order-4 count recurrence
  bool non_increasing = true;
  /// P_n < 1/floor(n/4)! for n >= 3; at n <= 2 equality holds (P_n = 1 = 1/0!).
  bool factorial_bound = true;
  std::vector<std::size_t> factorial_bound_equalities;  // n where P_n = 1/floor(n/4)!
};

/// Checks over the exact prefix only.
SequenceChecks check_sequence(const RationalSeq& seq);

/// |{s in Sym(n) : s^4 = id}| by the recurrence a_n = a_{n-1} + (n-1) a_{n-2} + (n-1)(n-2)(n-3) a_{n-4}.
BigInt order4_count(std::size_t n);

/// The same count by enumerating Sym(n); n <= 10.
std::uint64_t order4_census(std::size_t n);

/// log C(n, m) + log(n!/(n-m)!) with m = floor(eps n).
double log_s_bound(std::size_t n, const Rational& eps);

struct TailRow {
  std::size_t n = 0;
  double log_p = 0, log_s_bound = 0, log_product = 0;
};

struct TailTable {
  Rational eps;
  std::vector<TailRow> rows;  // n = N..N_max
  double log_tail_sum = 0;    // log of sum_n exp(log_product)
  std::size_t peak_n = 0;     // argmax of log_product
  bool decay_asserted = false;  // 0 < eps < 1/4
  /// Per-n values jump up whenever floor(eps n) steps, so decay is judged on
  /// block maxima over blocks of ceil(1/eps) consecutive n (one step of m each).
  std::size_t block_length = 1;
  std::size_t upward_steps = 0;  // n with log_product(n) > log_product(n-1)
  bool eventually_decreasing = false;  // block maxima strictly decrease from the peak block on, peak not last
};

/// Throws std::invalid_argument unless 1 <= N <= N_max <= 1e5 and 0 <= eps < 1.
TailTable s_bound_tail(std::size_t N, std::size_t N_max, const Rational& eps);

/// CSV n,P_n_num,P_n_den,log_Pn,log_Sn_bound,log_product for n = 1..seq.size();
/// num/den are empty beyond the exact prefix.
void write_heuristics_csv(std::ostream& os, const RationalSeq& seq, const Rational& eps);

}  // namespace sofic
