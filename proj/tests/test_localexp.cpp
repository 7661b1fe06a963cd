#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "sofic/localexp.hpp"

using namespace sofic;

namespace {

ZnFunction identity_fn(std::uint64_t n) {
  std::vector<std::uint64_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return ZnFunction(v);
}

ZnFunction random_bijection(std::uint64_t n, std::mt19937_64& rng) {
  std::vector<std::uint64_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  std::shuffle(v.begin(), v.end(), rng);
  return ZnFunction(v);
}

}  // namespace

TEST_CASE("functions on Z/nZ") {
  ZnFunction f({1, 2, 4, 3, 1});
  CHECK_FALSE(f.bijective());
  CHECK_THROWS_AS(f.inverse(), std::invalid_argument);
  CHECK_THROWS_AS(ZnFunction({0, 5}), std::invalid_argument);
  ZnFunction g({2, 0, 1});
  CHECK(g.bijective());
  CHECK(compose(g, g.inverse()) == identity_fn(3));
  CHECK(ZnFunction::from_permutation(g.as_permutation()) == g);
  CHECK(zn_function_from_json(to_json(g)) == g);
}

TEST_CASE("defect reports") {
  // f_{2,5}: only the wraparound point fails
  ZnFunction f({1, 2, 4, 3, 1});
  auto r = defect_report(f, 2);
  CHECK(r.defect == std::vector<std::uint64_t>{4});
  CHECK(defect_report_consistent(f, 2, r));

  auto id = defect_report(identity_fn(5), 2);
  CHECK(id.defect.size() == 4);
  CHECK(std::find(id.defect.begin(), id.defect.end(), 1) == id.defect.end());
  CHECK(id.four_periodic_failures.empty());

  Permutation p = Permutation::from_cycles(12, {{0, 5, 7, 2}, {1, 3}, {4, 6, 8, 11}});
  auto q = defect_report(ZnFunction::from_permutation(p), 5);
  CHECK(q.four_periodic_failures.empty());
  CHECK(defect_report_consistent(ZnFunction::from_permutation(p), 5, q));
  CHECK_THROWS_AS(defect_report(identity_fn(6), 2), std::invalid_argument);
}

TEST_CASE("induced g") {
  auto ind = induce_g(identity_fn(7), 3);
  for (std::uint64_t x = 0; x < 7; ++x) CHECK(ind.g(x) == (x + 1) % 7);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    auto f = random_bijection(31, rng);
    auto g = induce_g(f, 2).g;
    CHECK(g.bijective());
    // g = f^2 o (x+1) o f^-2
    std::vector<std::uint64_t> s(31);
    for (std::uint64_t x = 0; x < 31; ++x) s[x] = (x + 1) % 31;
    auto f2 = compose(f, f);
    CHECK(g == compose(f2, compose(ZnFunction(s), f2.inverse())));
  }
}

TEST_CASE("praktisch identity on exact windows") {
  // if f(x+1) = m f(x) on a window, then g(m y) = m^m g(y) where the chain stays inside it
  const std::uint64_t n = 11, m = 2;
  ZnFunction f = exp_like_bijection(n, m);
  auto ind = induce_g(f, m);
  CHECK(ind.praktisch_holds <= n);
  std::size_t direct = 0;
  for (std::uint64_t x = 0; x < n; ++x) direct += ind.g(m * x % n) == modarith::pow_mod(m, m, n) * ind.g(x) % n;
  CHECK(ind.praktisch_holds == direct);
}

TEST_CASE("H3 witness") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 10; ++t) {
    auto f = random_bijection(23, rng);
    auto w = h3_witness(f, 3);
    CHECK(w.g1_displacement.value() == 1);
    CHECK(w.conjugation_identities);
    auto d = defect_report(f, 3);
    CHECK(w.relator_defect[2].value() <= 2 * d.defect_fraction);
  }
  auto f = exp_like_bijection(5, 2);
  CHECK(f.image() == std::vector<std::uint64_t>{1, 2, 4, 3, 0});
  auto w = h3_witness(f, 2);
  CHECK(w.relator_defect[2].value() <= Rational(2 * static_cast<std::int64_t>(mezo_failures(f, 2)), 5));
  CHECK_THROWS_AS(exp_like_bijection(7, 2), std::invalid_argument);  // 2 has order 3 mod 7
}

TEST_CASE("mezo minima match the brute-force oracle") {
  // tests/oracles/localexp_oracle.py
  struct Case {
    std::uint64_t n, m;
    std::size_t min;
  };
  for (auto c : {Case{4, 3, 3}, Case{5, 2, 2}, Case{5, 3, 2}, Case{5, 4, 3}, Case{6, 5, 4}, Case{7, 2, 3},
                 Case{7, 3, 2}, Case{7, 6, 4}}) {
    auto r = min_mezo_failures(c.n, c.m);
    CHECK(r.min_failures == c.min);
    CHECK(mezo_failures(r.minimizer, c.m) == c.min);
  }
  CHECK(min_mezo_failures(5, 2).minimizer.image() == std::vector<std::uint64_t>{0, 2, 4, 3, 1});
  CHECK_THROWS_AS(min_mezo_failures(11, 2), std::invalid_argument);
}

TEST_CASE("p-adic lifting") {
  auto ctx = padic_context(3, 3, 2);
  CHECK(ctx.s == 4);
  CHECK(ctx.modulus == 27);
  CHECK_FALSE(ctx.p_divides_m_minus_1);
  CHECK(padic_context(5, 2, 2).s == 16);
  CHECK(padic_context(3, 2, 4).p_divides_m_minus_1);

  auto fp = padic_fixed_point(ctx, {1, 2, 4, 5});
  CHECK(fp.fixed);
  CHECK(fp.candidate == Quad{20, 16, 17, 1});
  CHECK(padic_fixed_points_brute(ctx, {1, 2, 4, 5}) == std::vector<Quad>{{20, 16, 17, 1}});

  auto c5 = padic_context(5, 2, 2);
  CHECK(padic_fixed_point(c5, {1, 1, 1, 1}).candidate == Quad{16, 16, 16, 16});

  auto trivial = padic_context_from_s(5, 2, 1);
  auto t = padic_fixed_point(trivial, {1, 1, 1, 1});
  CHECK(t.fixed);
  CHECK(t.candidate == Quad{1, 1, 1, 1});
  CHECK(padic_G(trivial, {1, 1, 1, 1}, {7, 3, 9, 12}) == Quad{1, 1, 1, 1});

  CHECK_THROWS_AS(padic_fixed_point(ctx, {3, 1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(padic_context_from_s(5, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(padic_fixed_points_brute(padic_context(7, 2, 2), {1, 1, 1, 1}), std::length_error);
}

TEST_CASE("norvi audit") {
  auto rep = norvi_audit(ZnFunction({0, 2, 4, 3, 1, 5, 6, 8, 7}), 2);
  CHECK(rep.defect_count == rep.defect_count_recheck);
  CHECK(rep.nonperiodic_count == rep.nonperiodic_recheck);
  CHECK_FALSE(rep.proof_regime);
  CHECK(rep.hypothesis_ok);

  // every bijection of Z/9Z satisfies the dichotomy, and the two scans agree
  std::vector<std::uint64_t> v(9);
  std::iota(v.begin(), v.end(), 0);
  bool all = true, consistent = true;
  do {
    auto r = norvi_audit(ZnFunction(v), 2);
    all = all && r.dichotomy;
    consistent = consistent && r.defect_count == r.defect_count_recheck && r.nonperiodic_count == r.nonperiodic_recheck;
  } while (std::next_permutation(v.begin(), v.end()));
  CHECK(all);
  CHECK(consistent);

  CHECK_THROWS_AS(norvi_audit(identity_fn(12), 5), std::invalid_argument);
  auto big = norvi_audit(identity_fn(243), 2);
  CHECK(big.proof_regime);
}

TEST_CASE("degree-m audit") {
  const std::uint64_t p = 101, m = 2;
  std::vector<std::uint64_t> sq(p);
  for (std::uint64_t x = 0; x < p; ++x) sq[x] = x * x % p;
  auto a = degree_m_audit(ZnFunction(sq), m);
  CHECK(a.multipliers == std::vector<std::uint64_t>{1});
  CHECK(a.g_at_zero == 0);
  CHECK(a.triple_solutions == 0);  // oracle: (((x^2+1)^2+1)^2+1) = x has no roots mod 101
  CHECK(a.relator_solutions == 0);
  CHECK(a.per_triple_cap_ok);

  std::mt19937_64 rng(2);
  std::vector<std::uint64_t> mult{1, 3, 7, 10};
  for (int t = 0; t < 5; ++t) {
    std::vector<std::uint64_t> g(p);
    for (std::uint64_t x = 0; x < p; ++x) g[x] = mult[rng() % 4] * sq[x] % p;
    auto r = degree_m_audit(ZnFunction(g), m);
    CHECK(r.multipliers.size() <= 4);
    CHECK(r.max_solutions_per_triple <= m * m * m);
    CHECK(r.per_triple_cap_ok);
  }
}

TEST_CASE("exhaustive searcher matches the oracle") {
  struct Case {
    std::uint64_t n, m;
    std::size_t defect;
    std::vector<std::uint64_t> f;
  };
  for (const auto& c : {Case{4, 3, 3, {0, 1, 3, 2}}, Case{5, 2, 2, {0, 1, 2, 4, 3}}, Case{5, 3, 2, {0, 2, 1, 3, 4}},
                        Case{6, 5, 4, {0, 1, 5, 3, 4, 2}}, Case{7, 3, 2, {0, 6, 4, 5, 1, 3, 2}},
                        Case{8, 3, 5, {0, 1, 3, 2, 6, 4, 7, 5}}, Case{9, 2, 3, {0, 6, 3, 4, 8, 7, 5, 1, 2}}}) {
    auto r = search_local_exp(c.n, c.m, 10'000'000, 1);
    CHECK(r.exhaustive);
    CHECK_FALSE(r.budget_exhausted);
    CHECK(r.defect == c.defect);
    CHECK(r.f.image() == c.f);
    CHECK(search_local_exp(c.n, c.m, 10'000'000, 99).f == r.f);
  }
  auto r10 = search_local_exp(10, 3, 10'000'000, 1);
  CHECK(r10.steps == 218656);
  CHECK(r10.defect == 4);
  CHECK(search_local_exp(10, 3, 1000, 1).budget_exhausted);
}

TEST_CASE("annealing output is sound") {
  for (std::uint64_t seed : {1, 2, 3}) {
    auto r = search_local_exp(16, 3, 20000, seed);
    CHECK_FALSE(r.exhaustive);
    auto rep = defect_report(r.f, 3);
    CHECK(rep.four_periodic_failures.empty());
    CHECK(rep.defect.size() == r.defect);
    CHECK(r.cycle_histogram[0] + 2 * r.cycle_histogram[1] + 4 * r.cycle_histogram[2] == 16);
    CHECK(search_local_exp(16, 3, 20000, seed).f == r.f);
  }
  auto best = search_best_of(31, 2, 20000, {5, 6, 7, 8}, 2);
  std::size_t lowest = SIZE_MAX;
  for (std::uint64_t s : {5, 6, 7, 8}) lowest = std::min(lowest, search_local_exp(31, 2, 20000, s).defect);
  CHECK(best.defect == lowest);
  auto j = to_json(best);
  CHECK(j.at("f").size() == 31);
}
