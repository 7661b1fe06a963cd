#include "sofic/localexp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <set>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace sofic {

ZnFunction::ZnFunction(std::vector<std::uint64_t> image) : image_(std::move(image)) {
  const std::size_t n = image_.size();
  std::vector<char> seen(n, 0);
  bijective_ = true;
  for (std::uint64_t y : image_) {
    if (y >= n) throw std::invalid_argument("function value outside Z/nZ");
    if (seen[y]) bijective_ = false;
    seen[y] = 1;
  }
}

ZnFunction ZnFunction::from_permutation(const Permutation& p) {
  return ZnFunction(std::vector<std::uint64_t>(p.image().begin(), p.image().end()));
}

ZnFunction ZnFunction::inverse() const {
  if (!bijective_) throw std::invalid_argument("function is not a bijection");
  std::vector<std::uint64_t> inv(image_.size());
  for (std::size_t x = 0; x < image_.size(); ++x) inv[image_[x]] = x;
  return ZnFunction(std::move(inv));
}

Permutation ZnFunction::as_permutation() const {
  if (!bijective_) throw std::invalid_argument("function is not a bijection");
  return Permutation(std::vector<Permutation::Point>(image_.begin(), image_.end()));
}

ZnFunction compose(const ZnFunction& f, const ZnFunction& g) {
  if (f.n() != g.n()) throw std::invalid_argument("degree mismatch");
  std::vector<std::uint64_t> out(f.n());
  for (std::uint64_t x = 0; x < f.n(); ++x) out[x] = f(g(x));
  return ZnFunction(std::move(out));
}

namespace {

void require_coprime(std::uint64_t m, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("empty function");
  if (modarith::gcd(m % n, n) != 1) throw std::invalid_argument("need gcd(m, n) = 1");
}

Rational frac(std::size_t a, std::size_t b) {
  return Rational(static_cast<std::int64_t>(a), static_cast<std::int64_t>(b));
}

std::size_t defect_at(const std::vector<std::uint64_t>& f, std::uint64_t x, std::uint64_t m, std::uint64_t n) {
  std::uint64_t next = x + 1 == n ? 0 : x + 1;
  return f[next] != modarith::mul_mod(m, f[x], n);
}

}  // namespace

DefectReport defect_report(const ZnFunction& f, std::uint64_t m) {
  const std::uint64_t n = f.n();
  require_coprime(m, n);
  DefectReport r;
  for (std::uint64_t x = 0; x < n; ++x) {
    if (defect_at(f.image(), x, m, n)) r.defect.push_back(x);
    if (f(f(f(f(x)))) != x) r.four_periodic_failures.push_back(x);
  }
  r.defect_fraction = frac(r.defect.size(), n);
  r.failure_fraction = frac(r.four_periodic_failures.size(), n);
  return r;
}

bool defect_report_consistent(const ZnFunction& f, std::uint64_t m, const DefectReport& report) {
  const std::uint64_t n = f.n();
  const auto& img = f.image();
  // Shifted copy against the scaled copy, then a squared table.
  std::vector<std::uint64_t> shifted(img.begin() + 1, img.end());
  shifted.push_back(img.front());
  std::vector<std::uint64_t> defect, fail;
  for (std::uint64_t x = 0; x < n; ++x) {
    if (shifted[x] != (m % n) * img[x] % n) defect.push_back(x);
  }
  std::vector<std::uint64_t> sq(n);
  for (std::uint64_t x = 0; x < n; ++x) sq[x] = img[img[x]];
  for (std::uint64_t x = 0; x < n; ++x) {
    if (sq[sq[x]] != x) fail.push_back(x);
  }
  return defect == report.defect && fail == report.four_periodic_failures;
}

std::size_t mezo_failures(const ZnFunction& f, std::uint64_t m) {
  const std::uint64_t n = f.n();
  require_coprime(m, n);
  std::size_t count = 0;
  for (std::uint64_t x = 0; x < n; ++x) count += defect_at(f.image(), x, m, n) || f(f(f(x))) != x;
  return count;
}

MezoMinimum min_mezo_failures(std::uint64_t n, std::uint64_t m) {
  if (n > 10) throw std::invalid_argument("exhaustive mezo census is limited to n <= 10");
  require_coprime(m, n);
  std::vector<std::uint64_t> img(n);
  for (std::uint64_t i = 0; i < n; ++i) img[i] = i;
  MezoMinimum best;
  best.n = n;
  best.m = m;
  bool first = true;
  do {
    std::size_t count = 0;
    for (std::uint64_t x = 0; x < n && (first || count < best.min_failures); ++x) {
      count += defect_at(img, x, m, n) || img[img[img[x]]] != x;
    }
    if (first || count < best.min_failures) {
      best.min_failures = count;
      best.minimizer = ZnFunction(img);
      first = false;
    }
  } while (std::next_permutation(img.begin(), img.end()));
  return best;
}

InducedMap induce_g(const ZnFunction& f, std::uint64_t m) {
  const std::uint64_t n = f.n();
  require_coprime(m, n);
  ZnFunction inv = f.inverse();
  std::vector<std::uint64_t> g(n);
  for (std::uint64_t x = 0; x < n; ++x) {
    std::uint64_t y = inv(inv(x)) + 1;
    if (y == n) y = 0;
    g[x] = f(f(y));
  }
  InducedMap out{ZnFunction(std::move(g)), 0};
  const std::uint64_t mm = modarith::pow_mod(m, m, n);
  for (std::uint64_t x = 0; x < n; ++x) {
    out.praktisch_holds += out.g(modarith::mul_mod(m, x, n)) == modarith::mul_mod(mm, out.g(x), n);
  }
  return out;
}

H3Witness h3_witness(const ZnFunction& f, std::uint64_t m) {
  const std::uint64_t n = f.n();
  require_coprime(m, n);
  ZnFunction inv = f.inverse();
  std::vector<std::uint64_t> g1(n), g2(n), g3(n);
  for (std::uint64_t x = 0; x < n; ++x) {
    g1[x] = (x + n - 1) % n;
    g3[x] = f((inv(x) + n - 1) % n);
    g2[x] = f(f((inv(inv(x)) + n - 1) % n));
  }
  H3Witness w;
  w.g1 = ZnFunction(g1);
  w.g2 = ZnFunction(g2);
  w.g3 = ZnFunction(g3);
  const Permutation p1 = w.g1.as_permutation(), p2 = w.g2.as_permutation(), p3 = w.g3.as_permutation();
  const Permutation pf = f.as_permutation();
  const Permutation pf2 = compose(pf, pf);
  w.conjugation_identities = p3 == compose(pf, compose(p1, pf.inverse())) &&
                             p2 == compose(pf2, compose(p1, pf2.inverse()));
  const auto me = static_cast<std::int64_t>(m);
  // w(a, b) = a^{-1} b a b^{-m}
  auto relator = [me](const Permutation& a, const Permutation& b) {
    return compose(a.inverse(), compose(b, compose(a, power(b, -me))));
  };
  w.g1_displacement = hamming_to_identity(p1);
  w.relator_defect = {hamming_to_identity(relator(p1, p2)), hamming_to_identity(relator(p2, p3)),
                      hamming_to_identity(relator(p3, p1))};
  return w;
}

ZnFunction exp_like_bijection(std::uint64_t n, std::uint64_t m) {
  if (!modarith::is_prime(n)) throw std::invalid_argument("exp-like bijection needs n prime");
  if (m % n == 0 || modarith::multiplicative_order(m % n, n) != n - 1) {
    throw std::invalid_argument("exp-like bijection needs m to be a primitive root mod n");
  }
  std::vector<std::uint64_t> img(n);
  std::uint64_t v = 1 % n;
  for (std::uint64_t x = 0; x + 1 < n; ++x) {
    img[x] = v;
    v = modarith::mul_mod(v, m, n);
  }
  img[n - 1] = 0;
  return ZnFunction(std::move(img));
}

std::uint64_t PadicContext::s_pow(std::uint64_t x) const {
  std::uint64_t period = modulus / p;  // p^{r-1}
  return modarith::pow_mod(s, x % period, modulus);
}

PadicContext padic_context_from_s(std::uint64_t p, unsigned r, std::uint64_t s) {
  if (!modarith::is_prime(p)) throw std::invalid_argument("p must be prime");
  if (r == 0) throw std::invalid_argument("r must be positive");
  PadicContext ctx;
  ctx.p = p;
  ctx.r = r;
  ctx.modulus = 1;
  for (unsigned i = 0; i < r; ++i) {
    if (ctx.modulus > UINT64_MAX / p / p) throw std::overflow_error("p^r too large");
    ctx.modulus *= p;
  }
  ctx.s = s % ctx.modulus;
  if (ctx.s % p != 1 % p) throw std::invalid_argument("s must be 1 mod p");
  return ctx;
}

PadicContext padic_context(std::uint64_t p, unsigned r, std::uint64_t m) {
  if (m % p == 0) throw std::invalid_argument("p must not divide m");
  PadicContext probe = padic_context_from_s(p, r, 1);
  PadicContext ctx = padic_context_from_s(p, r, modarith::pow_mod(m, p - 1, probe.modulus));
  ctx.m = m;
  ctx.p_divides_m_minus_1 = (m - 1) % p == 0;
  return ctx;
}

Quad padic_G(const PadicContext& ctx, const Quad& c, const Quad& x) {
  const std::uint64_t q = ctx.modulus;
  return {modarith::mul_mod(c[3], ctx.s_pow(x[3]), q), modarith::mul_mod(c[0], ctx.s_pow(x[0]), q),
          modarith::mul_mod(c[1], ctx.s_pow(x[1]), q), modarith::mul_mod(c[2], ctx.s_pow(x[2]), q)};
}

PadicFixedPoint padic_fixed_point(const PadicContext& ctx, const Quad& c) {
  for (std::uint64_t cj : c) {
    if (cj % ctx.p == 0) throw std::invalid_argument("c_j must be units mod p");
  }
  Quad x{c[3] % ctx.p, c[0] % ctx.p, c[1] % ctx.p, c[2] % ctx.p};
  std::uint64_t pk = ctx.p;
  for (unsigned k = 1; k < ctx.r; ++k) {
    pk *= ctx.p;
    Quad next = padic_G(ctx, c, x);
    for (auto& v : next) v %= pk;
    x = next;
  }
  PadicFixedPoint out;
  out.candidate = x;
  out.fixed = padic_G(ctx, c, x) == x;
  return out;
}

std::vector<Quad> padic_fixed_points_brute(const PadicContext& ctx, const Quad& c, std::uint64_t limit) {
  const std::uint64_t q = ctx.modulus;
  if (q > limit || q * q > limit || q * q * q > limit || q * q * q * q > limit) {
    throw std::length_error("brute force over (Z/p^r)^4 exceeds the limit");
  }
  std::vector<std::uint64_t> spow(q);
  for (std::uint64_t x = 0; x < q; ++x) spow[x] = ctx.s_pow(x);
  std::vector<Quad> out;
  for (std::uint64_t a = 0; a < q; ++a)
    for (std::uint64_t b = 0; b < q; ++b)
      for (std::uint64_t cc = 0; cc < q; ++cc)
        for (std::uint64_t d = 0; d < q; ++d) {
          if (a == c[3] * spow[d] % q && b == c[0] * spow[a] % q && cc == c[1] * spow[b] % q &&
              d == c[2] * spow[cc] % q) {
            out.push_back({a, b, cc, d});
          }
        }
  return out;
}

NorviReport norvi_audit(const ZnFunction& f, std::uint64_t m) {
  const std::uint64_t n = f.n();
  auto [p, r] = modarith::prime_power(n);
  if (p == 0) throw std::invalid_argument("norvi audit needs n = p^r");
  if (!f.bijective()) throw std::invalid_argument("norvi audit needs a bijection");
  require_coprime(m, n);
  NorviReport rep;
  DefectReport d = defect_report(f, m);
  rep.defect_count = d.defect.size();
  rep.nonperiodic_count = d.four_periodic_failures.size();
  for (std::uint64_t x = 0; x < n; ++x) {
    rep.defect_count_recheck += f((x + 1) % n) != (m % n) * f(x) % n;
    std::uint64_t y = x;
    for (int i = 0; i < 4; ++i) y = f(y);
    rep.nonperiodic_recheck += y != x;
  }
  rep.periodic_branch = 2 * rep.nonperiodic_count >= n;
  // defect >= p^{r/4 - 1} / 2^{1/4}  <=>  2 defect^4 p^4 >= p^r
  BigInt lhs = BigInt(2) * BigInt(rep.defect_count) * rep.defect_count * rep.defect_count * rep.defect_count * p * p * p * p;
  rep.defect_branch = lhs >= BigInt(n);
  rep.dichotomy = rep.periodic_branch || rep.defect_branch;
  rep.proof_regime = r >= 5;
  rep.hypothesis_ok = (m - 1) % p != 0;

  PadicContext ctx = padic_context(p, r, m);
  const std::uint64_t minv = modarith::inverse_mod(m % n, n);
  std::set<std::uint64_t> mults;
  for (std::uint64_t x = 0; x < n; ++x) {
    std::uint64_t g = modarith::mul_mod(minv, f(modarith::mul_mod(m % n, x, n)), n);
    std::uint64_t sx_inv = modarith::inverse_mod(ctx.s_pow(x), n);
    mults.insert(modarith::mul_mod(g, sx_inv, n));
  }
  rep.multiplier_count = mults.size();
  return rep;
}

DegreeMAudit degree_m_audit(const ZnFunction& g, std::uint64_t m, std::uint64_t budget) {
  const std::uint64_t p = g.n();
  if (!modarith::is_prime(p)) throw std::invalid_argument("degree-m audit needs a prime modulus");
  if (m % p == 0) throw std::invalid_argument("p must not divide m");
  DegreeMAudit a;
  a.g_at_zero = g(0);
  std::set<std::uint64_t> mults;
  for (std::uint64_t x = 1; x < p; ++x) {
    std::uint64_t xm = modarith::pow_mod(x, m, p);
    mults.insert(modarith::mul_mod(g(x), modarith::inverse_mod(xm, p), p));
  }
  a.multipliers.assign(mults.begin(), mults.end());
  const std::uint64_t k = a.multipliers.size();
  if (k * k * k > budget / p) throw std::length_error("triple scan exceeds the budget");
  std::vector<std::uint64_t> xpow(p);
  for (std::uint64_t x = 0; x < p; ++x) xpow[x] = modarith::pow_mod(x, m, p);
  const std::uint64_t cap = m * m * m;
  for (std::uint64_t c1 : a.multipliers)
    for (std::uint64_t c2 : a.multipliers)
      for (std::uint64_t c3 : a.multipliers) {
        std::size_t sols = 0;
        for (std::uint64_t x = 0; x < p; ++x) {
          std::uint64_t v = (c1 * xpow[x] + 1) % p;
          v = (c2 * xpow[v] + 1) % p;
          v = (c3 * xpow[v] + 1) % p;
          sols += v == x;
        }
        a.triple_solutions += sols;
        a.max_solutions_per_triple = std::max(a.max_solutions_per_triple, sols);
        if (sols > cap) a.per_triple_cap_ok = false;
      }
  for (std::uint64_t x = 0; x < p; ++x) {
    a.relator_solutions += (g((g((g(x) + 1) % p) + 1) % p) + 1) % p == x;
  }
  return a;
}

namespace {

std::size_t full_defect(const std::vector<std::uint64_t>& f, std::uint64_t m, std::uint64_t n) {
  std::size_t d = 0;
  for (std::uint64_t x = 0; x < n; ++x) d += defect_at(f, x, m, n);
  return d;
}

std::array<std::size_t, 3> histogram(const std::vector<std::uint64_t>& f) {
  std::array<std::size_t, 3> h{};
  for (std::uint64_t x = 0; x < f.size(); ++x) {
    if (f[x] == x) ++h[0];
    else if (f[f[x]] == x) ++h[1];
    else ++h[2];
  }
  h[1] /= 2;
  h[2] /= 4;
  return h;
}

// Depth-first enumeration of all f with f^4 = id, smallest free point first.
struct Enumerator {
  std::uint64_t n = 0, m = 0, budget = 0;
  std::vector<std::uint64_t> f;
  std::vector<char> used;
  std::vector<std::uint64_t> best;
  std::size_t best_defect = SIZE_MAX;
  std::uint64_t visited = 0;
  bool exhausted = false;

  void run() {
    f.assign(n, 0);
    used.assign(n, 0);
    step();
  }

  void consider() {
    ++visited;
    std::size_t d = full_defect(f, m, n);
    if (d < best_defect || (d == best_defect && f < best)) {
      best_defect = d;
      best = f;
    }
  }

  void step() {
    if (exhausted) return;
    if (visited >= budget) {
      exhausted = true;
      return;
    }
    std::uint64_t a = 0;
    while (a < n && used[a]) ++a;
    if (a == n) {
      consider();
      return;
    }
    used[a] = 1;
    f[a] = a;
    step();
    for (std::uint64_t b = a + 1; b < n; ++b) {
      if (used[b]) continue;
      used[b] = 1;
      f[a] = b;
      f[b] = a;
      step();
      for (std::uint64_t c = a + 1; c < n; ++c) {
        if (used[c]) continue;
        used[c] = 1;
        for (std::uint64_t d = a + 1; d < n; ++d) {
          if (used[d]) continue;
          used[d] = 1;
          f[a] = b;
          f[b] = c;
          f[c] = d;
          f[d] = a;
          step();
          used[d] = 0;
        }
        used[c] = 0;
      }
      used[b] = 0;
    }
    used[a] = 0;
  }
};

}  // namespace

SearchResult search_local_exp(std::uint64_t n, std::uint64_t m, std::uint64_t budget, std::uint64_t seed,
                              const AnnealSchedule& schedule) {
  require_coprime(m, n);
  SearchResult res;
  res.n = n;
  res.m = m % n;
  res.seed = seed;
  res.budget = budget;
  const std::uint64_t mm = m % n;

  if (n <= 10) {
    Enumerator e;
    e.n = n;
    e.m = mm;
    e.budget = budget;
    e.run();
    res.exhaustive = true;
    res.budget_exhausted = e.exhausted;
    res.steps = e.visited;
    if (e.best.empty()) {
      e.best.resize(n);
      for (std::uint64_t i = 0; i < n; ++i) e.best[i] = i;
    }
    res.f = ZnFunction(e.best);
  } else {
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> order(n);
    for (std::uint64_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::uint64_t> f(n);
    std::uint64_t i = 0;
    for (; i + 4 <= n; i += 4) {
      f[order[i]] = order[i + 1];
      f[order[i + 1]] = order[i + 2];
      f[order[i + 2]] = order[i + 3];
      f[order[i + 3]] = order[i];
    }
    for (; i < n; ++i) f[order[i]] = order[i];

    std::size_t cur = full_defect(f, mm, n);
    std::vector<std::uint64_t> best = f;
    std::size_t best_d = cur;
    std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> change;  // (point, new value)
    std::vector<std::uint64_t> touched;
    const double ratio = schedule.t_end / schedule.t_start;

    auto cycle_len = [&](std::uint64_t x) { return f[x] == x ? 1 : f[f[x]] == x ? 2 : 4; };

    for (std::uint64_t step = 0; step < budget; ++step) {
      change.clear();
      std::uint64_t a = pick(rng);
      if (unit(rng) < 0.5) {
        std::uint64_t b = pick(rng);
        if (a == b) continue;
        // f' = t f t with t = (a b)
        auto t = [a, b](std::uint64_t x) { return x == a ? b : x == b ? a : x; };
        std::uint64_t pts[4] = {a, b, 0, 0};
        std::size_t np = 2;
        for (std::uint64_t x = 0; x < 2; ++x) {
          // preimages of a and b under f
          std::uint64_t target = x == 0 ? a : b;
          std::uint64_t y = target;
          while (f[y] != target) y = f[y];
          pts[np++] = y;
        }
        std::sort(pts, pts + np);
        np = static_cast<std::size_t>(std::unique(pts, pts + np) - pts);
        for (std::size_t k = 0; k < np; ++k) change.push_back({pts[k], t(f[t(pts[k])])});
      } else {
        int len = cycle_len(a);
        if (len == 1) {
          std::uint64_t b = pick(rng);
          if (b == a || f[b] != b) continue;
          change = {{a, b}, {b, a}};
        } else if (len == 2) {
          std::uint64_t a2 = f[a];
          if (unit(rng) < 0.5) {
            change = {{a, a}, {a2, a2}};
          } else {
            std::uint64_t c = pick(rng);
            if (c == a || c == a2 || cycle_len(c) != 2) continue;
            std::uint64_t c2 = f[c];
            change = {{a, c}, {c, a2}, {a2, c2}, {c2, a}};
          }
        } else {
          std::uint64_t b = f[a], c = f[b], d = f[c];
          change = {{a, b}, {b, a}, {c, d}, {d, c}};
        }
      }
      ++res.steps;
      touched.clear();
      for (auto [x, v] : change) {
        touched.push_back(x);
        touched.push_back(x == 0 ? n - 1 : x - 1);
      }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      std::size_t before = 0, after = 0;
      for (std::uint64_t x : touched) before += defect_at(f, x, mm, n);
      std::vector<std::uint64_t> old;
      for (auto [x, v] : change) old.push_back(f[x]);
      for (auto [x, v] : change) f[x] = v;
      for (std::uint64_t x : touched) after += defect_at(f, x, mm, n);
      double temp = schedule.t_start * std::pow(ratio, static_cast<double>(step) / static_cast<double>(budget));
      long delta = static_cast<long>(after) - static_cast<long>(before);
      if (delta <= 0 || unit(rng) < std::exp(-static_cast<double>(delta) / temp)) {
        cur = cur + after - before;
        if (cur < best_d) {
          best_d = cur;
          best = f;
        }
      } else {
        for (std::size_t k = 0; k < change.size(); ++k) f[change[k].first] = old[k];
      }
    }
    res.budget_exhausted = true;
    res.f = ZnFunction(best);
  }

  DefectReport rep = defect_report(res.f, mm);
  res.defect = rep.defect.size();
  if (!rep.four_periodic_failures.empty() || !res.f.bijective()) {
    throw std::logic_error("searcher produced a map with f^4 != id");
  }
  res.cycle_histogram = histogram(res.f.image());
  return res;
}

SearchResult search_best_of(std::uint64_t n, std::uint64_t m, std::uint64_t budget,
                            const std::vector<std::uint64_t>& seeds, unsigned workers,
                            const AnnealSchedule& schedule) {
  if (seeds.empty()) throw std::invalid_argument("no seeds");
  std::vector<SearchResult> results(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        results[i] = search_local_exp(n, m, budget, seeds[i], schedule);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(seeds.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return *std::min_element(results.begin(), results.end(), [](const SearchResult& a, const SearchResult& b) {
    return a.defect != b.defect ? a.defect < b.defect : a.seed < b.seed;
  });
}

nlohmann::json to_json(const ZnFunction& f) { return f.image(); }

ZnFunction zn_function_from_json(const nlohmann::json& j) {
  return ZnFunction(j.get<std::vector<std::uint64_t>>());
}

nlohmann::json to_json(const SearchResult& r) {
  return {{"n", r.n},
          {"m", r.m},
          {"seed", r.seed},
          {"budget", r.budget},
          {"defect", r.defect},
          {"exhaustive", r.exhaustive},
          {"budget_exhausted", r.budget_exhausted},
          {"steps", r.steps},
          {"cycle_histogram", {{"fixed", r.cycle_histogram[0]}, {"two", r.cycle_histogram[1]}, {"four", r.cycle_histogram[2]}}},
          {"f", r.f.image()}};
}

}  // namespace sofic
