#include "sofic/expcycles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

namespace sofic {

ExpMap exp_map(std::uint64_t m, std::uint64_t n) {
  if (n < 2) throw std::invalid_argument("exp_map needs n >= 2");
  if (modarith::gcd(m % n, n) != 1) throw std::invalid_argument("exp_map needs gcd(m, n) = 1");
  ExpMap f;
  f.m_ = m;
  f.n_ = n;
  f.image_.resize(n);
  std::uint64_t v = 1 % n;
  for (std::uint64_t x = 0; x < n; ++x) {
    f.image_[x] = v;
    v = modarith::mul_mod(v, m % n, n);
  }
  std::mt19937_64 rng(m * 0x9E3779B97F4A7C15ULL ^ n);
  std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
  for (int i = 0; i < 16; ++i) {
    std::uint64_t x = n <= 16 ? static_cast<std::uint64_t>(i) % n : pick(rng);
    if (f.image_[x] != modarith::pow_mod(m, x, n)) throw std::logic_error("exp_map spot check failed");
  }
  return f;
}

bool exp_map_matches_pow(const ExpMap& f) {
  for (std::uint64_t x = 0; x < f.n(); ++x) {
    if (f(x) != modarith::pow_mod(f.m(), x, f.n())) return false;
  }
  return true;
}

std::size_t count_k_periodic(const ExpMap& f, unsigned k) {
  if (k < 1 || k > 4) throw std::invalid_argument("k must be in 1..4");
  std::size_t count = 0;
  for (std::uint64_t x = 0; x < f.n(); ++x) {
    std::uint64_t y = x;
    for (unsigned i = 0; i < k; ++i) y = f(y);
    count += y == x;
  }
  return count;
}

std::array<std::size_t, 4> count_periodic_tables(const ExpMap& f) {
  const std::uint64_t n = f.n();
  const auto& f1 = f.image();
  std::vector<std::uint64_t> f2(n), f3(n), f4(n);
  for (std::uint64_t x = 0; x < n; ++x) f2[x] = f1[f1[x]];
  for (std::uint64_t x = 0; x < n; ++x) f3[x] = f1[f2[x]];
  for (std::uint64_t x = 0; x < n; ++x) f4[x] = f2[f2[x]];
  std::array<std::size_t, 4> out{};
  for (std::uint64_t x = 0; x < n; ++x) {
    out[0] += f1[x] == x;
    out[1] += f2[x] == x;
    out[2] += f3[x] == x;
    out[3] += f4[x] == x;
  }
  return out;
}

CycleCensus cycle_census(std::uint64_t m, std::uint64_t n) {
  ExpMap f = exp_map(m, n);
  CycleCensus c;
  c.n = n;
  c.m = m;
  c.order = modarith::multiplicative_order(m % n, n);
  c.fix = count_periodic_tables(f);
  for (unsigned k = 1; k <= 4; ++k) c.methods_agree = c.methods_agree && count_k_periodic(f, k) == c.fix[k - 1];
  c.degenerate = n <= 4;
  return c;
}

GapCensus gap_census(const std::vector<std::uint64_t>& X, std::uint64_t n, const Rational& delta) {
  if (delta <= 0) throw std::invalid_argument("delta must be positive");
  std::vector<char> in(n, 0);
  std::size_t size = 0;
  for (std::uint64_t x : X) {
    if (x >= n) throw std::out_of_range("gap census element outside {0..n-1}");
    size += !in[x];
    in[x] = 1;
  }
  if (Rational(static_cast<std::int64_t>(size)) < delta * static_cast<std::int64_t>(n)) {
    throw std::invalid_argument("gap census needs |X| >= delta n");
  }
  GapCensus g;
  Rational limit = 2 / delta;
  for (std::uint64_t k = 1; Rational(static_cast<std::int64_t>(k)) < limit && k < n; ++k) {
    std::size_t count = 0;
    for (std::uint64_t x = 0; x + k < n; ++x) count += in[x] && in[x + k];
    if (g.k == 0 || count > g.count) {
      g.k = k;
      g.count = count;
    }
  }
  g.guarantee = delta * delta * static_cast<std::int64_t>(n) / 4 - 1;
  g.guarantee_holds = Rational(static_cast<std::int64_t>(g.count)) >= g.guarantee;
  return g;
}

RictuResult rictu_roots(std::uint64_t n, std::uint64_t m, std::uint64_t k, std::uint64_t l, std::uint64_t kappa_exp,
                        double C, std::uint64_t degree_cap) {
  if (n < 2) throw std::invalid_argument("rictu_roots needs n >= 2");
  if (l == 0) throw std::invalid_argument("rictu_roots needs l >= 1");
  RictuResult r;
  // d = l^{m^k}
  std::uint64_t mk = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    if (mk > degree_cap / m) throw std::length_error("degree l^{m^k} exceeds the cap");
    mk *= m;
  }
  std::uint64_t d = 1;
  for (std::uint64_t i = 0; i < mk; ++i) {
    if (d > degree_cap / l) throw std::length_error("degree l^{m^k} exceeds the cap");
    d *= l;
    if (l == 1) break;
  }
  r.degree = d;
  // m^{kappa n} with the exponent taken exactly (kappa n may exceed 64 bits only for huge inputs).
  BigInt e = BigInt(kappa_exp) * n;
  std::uint64_t c = 1 % n, base = m % n;
  for (BigInt t = e; t > 0; t >>= 1) {
    if ((t & 1) != 0) c = modarith::mul_mod(c, base, n);
    base = modarith::mul_mod(base, base, n);
  }
  r.c = c;
  r.degenerate = l == 1 && c == 1 % n;
  const std::uint64_t kk = k % n;
  for (std::uint64_t z = 0; z < n; ++z) {
    std::uint64_t lhs = modarith::pow_mod((z + kk) % n, d, n);
    std::uint64_t rhs = modarith::mul_mod(c, (modarith::pow_mod(z, l, n) + kk) % n, n);
    r.count += lhs == rhs;
  }
  double ld = std::log(static_cast<double>(d));
  double cd = static_cast<double>(d) / std::exp(1.0) + C * ld * ld;
  r.bound = cd * std::pow(static_cast<double>(n), 1.0 - 1.0 / static_cast<double>(d));
  r.n_prime = modarith::is_prime(n);
  r.within_bound = !r.n_prime || r.degenerate || static_cast<double>(r.count) <= r.bound;
  return r;
}

std::vector<std::uint64_t> primes_in_range(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  if (hi < 2 || lo > hi) return out;
  lo = std::max<std::uint64_t>(lo, 2);
  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(hi)));
  while (root * root > hi) --root;
  while ((root + 1) * (root + 1) <= hi) ++root;
  std::vector<char> small(root + 1, 1);
  std::vector<std::uint64_t> base;
  for (std::uint64_t i = 2; i <= root; ++i) {
    if (!small[i]) continue;
    base.push_back(i);
    for (std::uint64_t j = i * i; j <= root; j += i) small[j] = 0;
  }
  constexpr std::uint64_t kSegment = 1 << 18;
  std::vector<char> seg;
  for (std::uint64_t start = lo; start <= hi; start += kSegment) {
    std::uint64_t end = std::min(hi, start + kSegment - 1);
    seg.assign(end - start + 1, 1);
    for (std::uint64_t p : base) {
      std::uint64_t first = std::max(p * p, (start + p - 1) / p * p);
      for (std::uint64_t j = first; j <= end; j += p) seg[j - start] = 0;
    }
    for (std::uint64_t x = start; x <= end; ++x) {
      if (seg[x - start]) out.push_back(x);
    }
    if (end == hi) break;
  }
  return out;
}

std::vector<std::uint64_t> prime_powers(std::uint64_t p, unsigned rmin, unsigned rmax) {
  if (!modarith::is_prime(p)) throw std::invalid_argument("prime_powers needs a prime base");
  std::vector<std::uint64_t> out;
  std::uint64_t v = 1;
  for (unsigned r = 1; r <= rmax; ++r) {
    if (v > UINT64_MAX / p) throw std::overflow_error("prime power overflows 64 bits");
    v *= p;
    if (r >= rmin) out.push_back(v);
  }
  return out;
}

std::vector<CycleCensus> census_sweep(std::uint64_t m, std::vector<std::uint64_t> moduli, unsigned workers) {
  std::sort(moduli.begin(), moduli.end());
  moduli.erase(std::unique(moduli.begin(), moduli.end()), moduli.end());
  std::erase_if(moduli, [m](std::uint64_t n) { return n < 2 || modarith::gcd(m % n, n) != 1; });
  std::vector<CycleCensus> rows(moduli.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < moduli.size(); i = next++) {
      try {
        rows[i] = cycle_census(m, moduli[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, moduli.size()))));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

void write_census_csv(std::ostream& os, const std::vector<CycleCensus>& rows) {
  os << "n,m,order,fix1,fix2,fix3,fix4,frac3,frac4\n";
  for (const auto& r : rows) {
    double n = static_cast<double>(r.n);
    os << r.n << ',' << r.m << ',' << r.order << ',' << r.fix[0] << ',' << r.fix[1] << ',' << r.fix[2] << ','
       << r.fix[3] << ',' << format_fixed10(static_cast<double>(r.fix[2]) / n) << ','
       << format_fixed10(static_cast<double>(r.fix[3]) / n) << '\n';
  }
}

}  // namespace sofic
