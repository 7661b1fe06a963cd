// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "sofic/conjugacy.hpp"
#include "sofic/expcycles.hpp"
#include "sofic/heuristics.hpp"
#include "sofic/localexp.hpp"
#include "sofic/soficcheck.hpp"
#include "sofic/tiling.hpp"

using namespace sofic;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      detail << " [" << why << "]";
    }
  }
};

int failures = 0;

template <class F>
void criterion(int id, double limit_s, F&& body) {
  auto t0 = Clock::now();
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  o.require(secs < limit_s, "runtime over " + std::to_string(static_cast<int>(limit_s)) + " s");
  char t[32];
  std::snprintf(t, sizeof t, "%.2fs", secs);
  std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " (" << t << ")" << o.detail.str() << std::endl;
  failures += !o.pass;
}

Word random_word(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(1, 8), gen(0, 1), ex(-4, 4);
  std::vector<Letter> letters;
  for (int i = len(rng); i > 0; --i) {
    int e = ex(rng);
    if (e != 0) letters.push_back({gen(rng), e});
  }
  return Word(letters);
}

void heuristics(Outcome& o) {
  auto seq = p_sequence(500);
  const Rational first[] = {Rational(1), Rational(1), Rational(2, 3), Rational(2, 3), Rational(7, 15)};
  bool values = true;
  for (std::size_t n = 1; n <= 5; ++n) values = values && seq.at(n) == first[n - 1];
  o.require(values, "P_1..P_5 differ from 1, 1, 2/3, 2/3, 7/15");
  BigInt fact = 1;
  bool census = true;
  for (std::size_t n = 1; n <= 9; ++n) {
    fact *= n;
    census = census && seq.at(n) * fact == Rational(BigInt(order4_census(n)));
  }
  o.require(census, "n! P_n differs from the Sym(n) census");
  auto c = check_sequence(seq);
  o.require(c.non_increasing, "P_n increases somewhere");
  o.require(c.recurrence && c.integral_counts, "exactness checks failed");
  // strict bound as stated, over every n <= 500
  std::vector<std::size_t> violations;
  BigInt f4 = 1;
  for (std::size_t n = 1; n <= 500; ++n) {
    if (n % 4 == 0) f4 *= n / 4;
    if (!(seq.at(n) < Rational(BigInt(1), f4))) violations.push_back(n);
  }
  std::ostringstream v;
  for (std::size_t n : violations) v << (v.tellp() ? "," : "") << n;
  o.detail << " P_1..P_5 exact; census n<=9 matches; non-increasing to 500; strict P_n < 1/floor(n/4)! fails at n = {"
           << v.str() << "} and holds for the other " << 500 - violations.size() << " values";
  o.require(violations.empty(), "P_n < 1/floor(n/4)! is false where P_n = 1 = 1/0!");
}

void arithmetic(Outcome& o) {
  std::size_t triples = 0;
  for (std::size_t n : {101, 1009}) {
    for (std::uint64_t m : {2, 3}) {
      auto phi = arithmetic_bs_approx(n, m).with_domain(bs_ball(m, 2, 2, 8));
      auto rep = check_sofic(phi, Rational(1, 4));
      triples += rep.triples_checked;
      o.require(!rep.vacuous && rep.max_defect && rep.max_defect->numerator() == 0,
                "nonzero multiplicativity defect at n=" + std::to_string(n) + " m=" + std::to_string(m));
    }
  }
  std::mt19937_64 rng(2024);
  std::size_t mismatches = 0;
  const std::size_t moduli[] = {101, 1009, 105, 343};
  for (int i = 0; i < 500; ++i) {
    std::size_t n = moduli[i % 4];
    std::uint64_t m = i % 2 ? 2 : 11;
    Word w = random_word(rng);
    auto pred = affine_fixed_points(w, m, n).predicted;
    mismatches += pred != psi_image(evaluate_bs(w, m), n).fixed_points();
  }
  o.detail << " defect 0 on " << triples << " triples; affine prediction mismatches " << mismatches << "/500";
  o.require(mismatches == 0, "affine fixed-point prediction differs from brute force");
}

void tiling(Outcome& o) {
  TilingOptions z;
  z.min_degree = 1000;
  Tiling a = quasi_tile(cyclic_model(1000), interval_shapes({4, 6, 8, 10, 13, 16, 20, 25}, 2), z);
  auto ca = verify_tiling(a);
  o.require(ca.pass(), "Z model certificate fails");

  TilingOptions b;
  b.min_degree = 1000;
  auto phi = amplify(arithmetic_bs_approx(4999, 2), 10000);
  Tiling t = quasi_tile(phi, box_shapes({{1, 4}, {1, 6}, {1, 8}, {1, 12}, {1, 16}, {1, 24}, {1, 32}, {2, 64}}, 2), b);
  auto cb = verify_tiling(t);
  o.require(cb.pass(), "BS(1,2) certificate fails");
  auto min_margin = [](const TilingCertificate& c) {
    Rational lo = c.lower_margin[0];
    for (std::size_t j = 0; j < c.lower_margin.size(); ++j) {
      lo = std::min(lo, c.lower_margin[j]);
      lo = std::min(lo, c.upper_margin[j]);
    }
    return to_double(lo);
  };
  o.detail << " (a) Z n=1000 coverage " << to_double(ca.coverage) << " min margin " << min_margin(ca)
           << "; (b) psi BS(1,2) n=10000 coverage " << to_double(cb.coverage) << " min margin " << min_margin(cb)
           << " bad points " << t.bad_points;
}

void conjugator(Outcome& o) {
  const std::size_t n = 1000;
  const std::uint64_t m = 3;  // gcd(2, 1000) != 1
  const Rational eps(1, 4);
  auto phi1 = arithmetic_bs_approx(n, m);
  auto plan = plan_parameters(eps / 7, eps / 7);
  std::vector<std::uint64_t> lengths;
  for (unsigned j = 1; j <= plan.k; ++j) {
    auto want = static_cast<std::uint64_t>(to_double(plan.lambda[j - 1]) * static_cast<double>(n) / 5);
    lengths.push_back(std::max<std::uint64_t>(lengths.empty() ? 1 : lengths.back() + 1, want));
  }
  ConjugatorOptions opt;
  opt.eps = eps;
  opt.min_degree = n;
  opt.max_bad_fraction = Rational(1, 4);
  opt.shapes = interval_shapes(lengths, m);
  int passed = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::vector<Point> v(n);
    std::iota(v.begin(), v.end(), 0);
    std::shuffle(v.begin(), v.end(), rng);
    Permutation sigma(v), sinv = sigma.inverse();
    auto phi2 = phi1.transformed([&](const Permutation& p) { return compose(sigma, compose(p, sinv)); }, n, "conj");
    o.detail << " seed " << seed << ":";
    try {
      Conjugator c = build_conjugator(phi1, phi2, opt);
      std::vector<Point> img(c.tau.image().begin(), c.tau.image().end());
      std::sort(img.begin(), img.end());
      bool bijective = true;
      for (std::size_t i = 0; i < n; ++i) bijective = bijective && img[i] == i;
      auto d = conjugacy_defect(c, phi1, phi2, {BsElement::a1(m), BsElement::a2(m)}, eps);
      char buf[96];
      std::snprintf(buf, sizeof buf, " support %.3f a1 %.3f a2 %.3f", to_double(c.support_fraction),
                    d.per_key[0].second.to_double(), d.per_key[1].second.to_double());
      o.detail << buf;
      o.require(bijective, "tau not bijective");
      passed += d.pass && bijective;
    } catch (const InsufficientSupport& e) {
      o.detail << " insufficient support " << to_double(e.fraction);
    }
    o.detail << ";";
  }
  o.detail << " " << passed << "/10 seeds within eps";
  o.require(passed == 10, "defect > eps on some seed");
}

void census(Outcome& o) {
  auto primes = primes_in_range(1000, 100000);
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  auto rows = census_sweep(2, primes, workers);
  std::size_t disagree = 0, violations = 0, max_fix3 = 0;
  for (const auto& r : rows) {
    disagree += !r.methods_agree;
    if (4 * static_cast<std::uint64_t>(r.fix[2]) > 3 * r.n + 400) ++violations;
    max_fix3 = std::max(max_fix3, r.fix[2]);
  }
  // frozen oracle values from tests/oracles/misc_oracle.py
  std::map<std::uint64_t, std::array<std::size_t, 4>> oracle{{1009, {0, 0, 0, 4}}, {9973, {0, 4, 0, 4}}};
  std::size_t oracle_mismatch = 0;
  for (const auto& r : rows) {
    auto it = oracle.find(r.n);
    if (it != oracle.end() && it->second != r.fix) ++oracle_mismatch;
  }
  o.detail << " " << rows.size() << " primes, " << workers << " workers; method disagreements " << disagree
           << "; oracle mismatches " << oracle_mismatch << "; fix3 > 3p/4+100 findings " << violations << " (max fix3 "
           << max_fix3 << ")";
  o.require(rows.size() == primes.size(), "moduli missing from the sweep");
  o.require(disagree == 0, "iteration and table counts disagree");
  o.require(oracle_mismatch == 0, "oracle mismatch");
}

void padic(Outcome& o) {
  std::mt19937_64 rng(77);
  for (auto [p, r, s] : {std::tuple{3ull, 3u, 4ull}, std::tuple{5ull, 2u, 16ull}}) {
    auto ctx = padic_context_from_s(p, r, s);
    std::uniform_int_distribution<std::uint64_t> pick(1, ctx.modulus - 1);
    std::size_t agree = 0, most = 0;
    for (int i = 0; i < 100; ++i) {
      Quad c;
      for (auto& v : c) {
        do v = pick(rng);
        while (v % p == 0);
      }
      auto lifted = padic_fixed_point(ctx, c);
      auto brute = padic_fixed_points_brute(ctx, c);
      most = std::max(most, brute.size());
      agree += lifted.fixed ? brute.size() == 1 && brute[0] == lifted.candidate : brute.empty();
    }
    o.detail << " p=" << p << " r=" << r << " s=" << s << ": agree " << agree << "/100, max fixed points " << most << ";";
    o.require(agree == 100 && most <= 1, "lifting and brute force disagree at p=" + std::to_string(p));
  }
}

void mezo(Outcome& o) {
  // frozen from tests/oracles/localexp_oracle.py: minimum failures per (n, m)
  const std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t> oracle{
      {{4, 3}, 3}, {{5, 2}, 2}, {{5, 3}, 2}, {{5, 4}, 3}, {{6, 5}, 4},
      {{7, 2}, 3}, {{7, 3}, 2}, {{7, 4}, 3}, {{7, 5}, 2}, {{7, 6}, 4}};
  for (std::uint64_t n = 4; n <= 7; ++n) {
    Rational overall = 1;
    for (std::uint64_t m = 2; m < n; ++m) {
      if (modarith::gcd(m, n) != 1) continue;
      auto first = min_mezo_failures(n, m), again = min_mezo_failures(n, m);
      o.require(first.min_failures == again.min_failures && first.minimizer == again.minimizer,
                "unstable across re-runs");
      o.require(first.min_failures == oracle.at({n, m}), "differs from the oracle at n=" + std::to_string(n));
      overall = std::min(overall, Rational(static_cast<std::int64_t>(first.min_failures), static_cast<std::int64_t>(n)));
    }
    o.detail << " n=" << n << " min fraction " << to_string(overall) << ";";
    o.require(overall > 0, "zero minimum");
  }
}

void searcher(Outcome& o) {
  std::size_t runs = 0, unsound = 0, seed_dependent = 0;
  for (std::uint64_t n = 2; n <= 6; ++n) {
    for (std::uint64_t m = 1; m < std::max<std::uint64_t>(n, 2); ++m) {
      if (modarith::gcd(m, n) != 1) continue;
      auto ref = search_local_exp(n, m, 10'000'000, 1);
      for (std::uint64_t seed = 2; seed <= 6; ++seed) {
        seed_dependent += !(search_local_exp(n, m, 10'000'000, seed).f == ref.f);
      }
    }
  }
  for (std::uint64_t n : {7, 9, 10, 16, 27, 31, 81, 125, 243, 1009}) {
    std::uint64_t m = n % 3 == 0 ? 2 : 3;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      auto r = search_local_exp(n, m, 30000, seed);
      ++runs;
      auto rep = defect_report(r.f, m);
      bool ok = r.f.bijective() && rep.four_periodic_failures.empty() && rep.defect.size() == r.defect &&
                defect_report_consistent(r.f, m, rep);
      for (std::uint64_t x = 0; x < n && ok; ++x) ok = r.f(r.f(r.f(r.f(x)))) == x;
      unsound += !ok;
    }
  }
  o.detail << " " << runs << " searches sound except " << unsound << "; exhaustive optima n<=6 seed-dependent in "
           << seed_dependent << " cases";
  o.require(unsound == 0, "searcher output fails f^4 = id or defect recomputation");
  o.require(seed_dependent == 0, "exhaustive optimum depends on the seed");
}

}  // namespace

int main() {
  criterion(1, 5, heuristics);
  criterion(2, 30, arithmetic);
  criterion(3, 120, tiling);
  criterion(4, 120, conjugator);
  criterion(5, 300, census);
  criterion(6, 180, padic);
  criterion(7, 120, mezo);
  criterion(8, 60, searcher);
  std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed")) << std::endl;
  return failures ? 1 : 0;
}
