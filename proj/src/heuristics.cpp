#include "sofic/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace sofic {

namespace {

double log_sum_exp(double a, double b) {
  double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

BigInt factorial(std::size_t n) {
  BigInt f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

RationalSeq p_sequence(std::size_t N, std::size_t n_exact) {
  if (N == 0) throw std::invalid_argument("N must be >= 1");
  RationalSeq seq;
  seq.n_exact = std::min(N, n_exact);
  const Rational base[4] = {Rational(1), Rational(1), Rational(2, 3), Rational(2, 3)};
  for (std::size_t n = 1; n <= seq.n_exact; ++n) {
    Rational p = n <= 4 ? base[n - 1] : Rational((seq.exact[n - 2] + seq.exact[n - 3] + seq.exact[n - 5]) / n);
    seq.exact.push_back(p);
    seq.log_p.push_back(log_of(p));
  }
  for (std::size_t n = seq.n_exact + 1; n <= N; ++n) {
    if (n <= 4) {
      seq.log_p.push_back(log_of(base[n - 1]));
      continue;
    }
    double s = log_sum_exp(log_sum_exp(seq.log_p[n - 2], seq.log_p[n - 3]), seq.log_p[n - 5]);
    seq.log_p.push_back(s - std::log(static_cast<double>(n)));
  }
  return seq;
}

BigInt order4_count(std::size_t n) {
  std::vector<BigInt> a{1};  // a_0
  for (std::size_t k = 1; k <= n; ++k) {
    BigInt v = a[k - 1];
    if (k >= 2) v += BigInt(k - 1) * a[k - 2];
    if (k >= 4) v += BigInt(k - 1) * (k - 2) * (k - 3) * a[k - 4];
    a.push_back(v);
  }
  return a[n];
}

std::uint64_t order4_census(std::size_t n) {
  if (n > 10) throw std::invalid_argument("census limited to n <= 10");
  std::vector<std::size_t> s(n);
  std::iota(s.begin(), s.end(), 0);
  std::uint64_t count = 0;
  do {
    bool ok = true;
    for (std::size_t x = 0; x < n && ok; ++x) ok = s[s[s[s[x]]]] == x;
    count += ok;
  } while (std::next_permutation(s.begin(), s.end()));
  return count;
}

SequenceChecks check_sequence(const RationalSeq& seq) {
  SequenceChecks c;
  BigInt fact = 1;
  for (std::size_t n = 1; n <= seq.exact.size(); ++n) {
    const Rational& p = seq.at(n);
    if (n >= 5 && p * n != seq.at(n - 1) + seq.at(n - 2) + seq.at(n - 4)) c.recurrence = false;
    fact *= n;
    Rational scaled = p * fact;
    if (denominator(scaled) != 1 || numerator(scaled) != order4_count(n)) c.integral_counts = false;
    if (n >= 2 && p > seq.at(n - 1)) c.non_increasing = false;
    Rational bound(BigInt(1), factorial(n / 4));
    if (p == bound) c.factorial_bound_equalities.push_back(n);
    if (n >= 3 ? !(p < bound) : p > bound) c.factorial_bound = false;
  }
  return c;
}

double log_s_bound(std::size_t n, const Rational& eps) {
  Rational scaled = eps * n;
  auto m = static_cast<std::size_t>(BigInt(numerator(scaled) / denominator(scaled)));
  if (m > n) throw std::invalid_argument("eps n exceeds n");
  const double dn = static_cast<double>(n), dm = static_cast<double>(m);
  double log_binom = std::lgamma(dn + 1) - std::lgamma(dm + 1) - std::lgamma(dn - dm + 1);
  double log_falling = std::lgamma(dn + 1) - std::lgamma(dn - dm + 1);
  return log_binom + log_falling;
}

TailTable s_bound_tail(std::size_t N, std::size_t N_max, const Rational& eps) {
  if (N < 1 || N > N_max || N_max > 100000) throw std::invalid_argument("need 1 <= N <= N_max <= 1e5");
  if (eps < 0 || eps >= 1) throw std::invalid_argument("need 0 <= eps < 1");
  RationalSeq seq = p_sequence(N_max, 0);
  TailTable t;
  t.eps = eps;
  t.decay_asserted = eps > 0 && eps < Rational(1, 4);
  double best = -INFINITY;
  for (std::size_t n = N; n <= N_max; ++n) {
    TailRow row{n, seq.log_p[n - 1], log_s_bound(n, eps), 0};
    row.log_product = row.log_p + row.log_s_bound;
    t.log_tail_sum = t.rows.empty() ? row.log_product : log_sum_exp(t.log_tail_sum, row.log_product);
    if (row.log_product > best) {
      best = row.log_product;
      t.peak_n = n;
    }
    t.rows.push_back(row);
  }
  for (std::size_t i = 1; i < t.rows.size(); ++i) t.upward_steps += t.rows[i].log_product > t.rows[i - 1].log_product;
  if (eps > 0) {
    Rational inv = 1 / eps;
    BigInt q = numerator(inv) / denominator(inv);
    if (q * denominator(inv) < numerator(inv)) ++q;
    t.block_length = q.convert_to<std::size_t>();
  }
  std::vector<double> block_max;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (i % t.block_length == 0) block_max.push_back(-INFINITY);
    block_max.back() = std::max(block_max.back(), t.rows[i].log_product);
  }
  const std::size_t peak_block = (t.peak_n - N) / t.block_length;
  t.eventually_decreasing = peak_block + 1 < block_max.size();
  for (std::size_t b = peak_block + 1; b < block_max.size(); ++b) {
    if (!(block_max[b] < block_max[b - 1])) t.eventually_decreasing = false;
  }
  return t;
}

void write_heuristics_csv(std::ostream& os, const RationalSeq& seq, const Rational& eps) {
  os << "n,P_n_num,P_n_den,log_Pn,log_Sn_bound,log_product\n";
  for (std::size_t n = 1; n <= seq.size(); ++n) {
    os << n << ',';
    if (n <= seq.exact.size()) os << numerator(seq.at(n)) << ',' << denominator(seq.at(n));
    else os << ',';
    double ls = log_s_bound(n, eps);
    os << ',' << format_fixed10(seq.log_p[n - 1]) << ',' << format_fixed10(ls) << ','
       << format_fixed10(seq.log_p[n - 1] + ls) << '\n';
  }
}

}  // namespace sofic
