#include "doctest.h"

#include <random>

#include <nlohmann/json.hpp>

#include "sofic/tiling.hpp"

using namespace sofic;

namespace {

Tiling z_tiling() {
  TilingOptions o;
  o.min_degree = 1000;
  Tiling t = quasi_tile(cyclic_model(1000), interval_shapes({4, 6, 8, 10, 13, 16, 20, 25}, 2), o);
  t.model = ModelSpec{"cyclic", 1000, 2, 1000};
  return t;
}

}  // namespace

TEST_CASE("plan parameters") {
  auto plan = plan_parameters(Rational(1, 4), Rational(1, 4));
  CHECK(plan.k == 8);
  REQUIRE(plan.lambda.size() == 8);
  CHECK(plan.lambda.back() == Rational(1, 4));
  CHECK(plan.kappa_internal == Rational(1, 8));
  for (unsigned j = 1; j <= plan.k; ++j) {
    Rational closed = 1;
    for (unsigned i = 0; i < plan.k - j + 1; ++i) closed *= Rational(3, 4);
    CHECK(sigma(plan, j) == 1 - closed);
    if (j < plan.k) CHECK(plan.lambda[j - 1] == Rational(1, 4) * (1 - sigma(plan, j + 1)));
  }
  CHECK(sigma(plan, plan.k + 1) == 0);
  CHECK(plan.sigma1 >= Rational(3, 4));
  CHECK(plan.sigma1 <= 1);

  CHECK(plan_parameters(Rational(1, 28), Rational(1, 28)).k == 111);
  CHECK_THROWS_AS(plan_parameters(Rational(3, 10), Rational(1, 4)), std::invalid_argument);
  CHECK_THROWS_AS(plan_parameters(Rational(1, 4), Rational(0)), std::invalid_argument);
}

TEST_CASE("extraction basics") {
  SetFamily disjoint{9, {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}}};
  auto e = extract_eps_disjoint(disjoint, Rational(1, 4));
  CHECK(e.selected.size() >= 1);
  for (std::size_t i = 0; i < e.selected.size(); ++i) CHECK(e.witnesses[i] == disjoint.sets[e.selected[i]]);
  CHECK(e.multiplicity == 1);

  SetFamily twins{5, {{0, 1, 2}, {0, 1, 2}}};
  auto t = extract_eps_disjoint(twins, Rational(1, 2));
  CHECK(t.selected.size() == 1);
}

TEST_CASE("extraction on random intervals") {
  const std::size_t n = 1000;
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> start(0, n - 1), len(5, 40);
  SetFamily fam{n, {}};
  std::vector<int> mult(n, 0);
  while (fam.sets.size() < 200) {
    std::size_t s = start(rng), l = len(rng);
    if (s + l > n) continue;
    bool ok = true;
    for (std::size_t x = s; x < s + l; ++x) ok = ok && mult[x] < 4;
    if (!ok) continue;
    std::vector<Point> set;
    for (std::size_t x = s; x < s + l; ++x) {
      set.push_back(x);
      ++mult[x];
    }
    fam.sets.push_back(set);
  }
  std::size_t M = *std::max_element(mult.begin(), mult.end());
  std::size_t mass = 0;
  for (const auto& s : fam.sets) mass += s.size();
  Rational rho = 1 - Rational(static_cast<std::int64_t>(mass), static_cast<std::int64_t>(M * n));
  Rational eps(1, 4);

  auto e = extract_eps_disjoint(fam, eps);
  CHECK(e.multiplicity == M);
  CHECK(e.rho == rho);
  std::vector<char> cov(n, 0);
  std::vector<std::vector<Point>> chosen;
  for (std::size_t i : e.selected) {
    chosen.push_back(fam.sets[i]);
    for (Point x : fam.sets[i]) cov[x] = 1;
  }
  std::size_t covered = std::count(cov.begin(), cov.end(), 1);
  CHECK(covered == e.covered);
  CHECK(Rational(static_cast<std::int64_t>(covered)) >= eps * (1 - rho) * n);
  CHECK(is_eps_disjoint(chosen, n, eps));
  for (std::size_t i = 0; i < e.witnesses.size(); ++i) {
    CHECK(Rational(static_cast<std::int64_t>(e.witnesses[i].size())) >=
          (1 - eps) * static_cast<std::int64_t>(chosen[i].size()));
    for (std::size_t j = 0; j < i; ++j) {
      for (Point x : e.witnesses[i]) CHECK(std::find(e.witnesses[j].begin(), e.witnesses[j].end(), x) == e.witnesses[j].end());
    }
  }
}

TEST_CASE("eps-disjointness by flow") {
  CHECK(is_eps_disjoint({{0, 1, 2, 3}, {3, 4, 5, 6}}, 7, Rational(1, 4)));
  CHECK(is_eps_disjoint({{0, 1, 2, 3}, {2, 3, 4, 5}}, 6, Rational(1, 4)));
  CHECK_FALSE(is_eps_disjoint({{0, 1, 2, 3}, {1, 2, 3, 4}}, 5, Rational(1, 4)));
  CHECK(is_eps_disjoint({{0, 1, 2, 3}, {1, 2, 3, 4}}, 5, Rational(1, 2)));
  // three sets sharing one point pairwise: cores must route around it
  CHECK(is_eps_disjoint({{0, 1, 2, 9}, {3, 4, 5, 9}, {6, 7, 8, 9}}, 10, Rational(1, 4)));
}

TEST_CASE("Z model tiling passes all conclusions") {
  Tiling t = z_tiling();
  auto c = verify_tiling(t);
  CHECK(c.plan.pass);
  CHECK(c.disjoint.pass);
  CHECK(c.injective.pass);
  CHECK(c.covering.pass);
  CHECK(c.density.pass);
  CHECK(c.coverage >= Rational(3, 4));
  for (std::size_t j = 0; j < c.ratios.size(); ++j) {
    CHECK(c.lower_margin[j] >= 0);
    CHECK(c.upper_margin[j] >= 0);
  }
}

TEST_CASE("certificate round-trip and tampering") {
  Tiling t = z_tiling();
  auto j = to_json(t, verify_tiling(t));
  Tiling back = tiling_from_json(j);
  CHECK(verify_tiling(back).pass());

  // a center of C_1 moved onto an existing tile
  auto bad = j;
  auto& c1 = bad["centers"][0];
  REQUIRE(!c1.empty());
  c1[0] = bad["centers"][1][0];
  CHECK_FALSE(verify_tiling(tiling_from_json(bad)).pass());
}

TEST_CASE("hand-built tilings fail the right conclusion") {
  Tiling t = z_tiling();
  Tiling overlap = t;
  // shift the first C_1 tile so it meets a C_2 tile
  overlap.centers[0][0] = overlap.centers[1][0] + 1;
  auto c = verify_tiling(overlap);
  CHECK_FALSE(c.disjoint.pass);

  Tiling sparse = t;
  sparse.centers[7].resize(sparse.centers[7].size() / 2);
  auto d = verify_tiling(sparse);
  CHECK_FALSE(d.density.pass);
  CHECK(d.lower_margin[7] < 0);
}

TEST_CASE("typed errors") {
  TilingOptions o;
  auto shapes = interval_shapes({4, 6, 8, 10, 13, 16, 20, 25}, 2);
  // default N = 64 * 25 / (1/16) = 25600
  CHECK_THROWS_AS(quasi_tile(cyclic_model(1000), shapes, o), TypedTilingError);
  try {
    quasi_tile(cyclic_model(1000), shapes, o);
  } catch (const TypedTilingError& e) {
    CHECK(e.kind == TypedTilingError::Kind::DegreeTooSmall);
  }
  o.min_degree = 10;
  CHECK_THROWS_AS(quasi_tile(cyclic_model(1000), interval_shapes({4, 6}, 2), o), TypedTilingError);
}

TEST_CASE("corrupted approximation never certifies") {
  const std::size_t n = 1000;
  std::mt19937_64 rng(23);
  std::vector<Point> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  std::shuffle(v.begin(), v.begin() + n / 2, rng);
  Permutation noise(v);
  auto phi = cyclic_model(n).transformed([&](const Permutation& p) { return compose(noise, compose(p, noise)); }, n,
                                         "corrupted");
  TilingOptions o;
  o.min_degree = n;
  bool certified = false;
  try {
    Tiling t = quasi_tile(phi, interval_shapes({4, 6, 8, 10, 13, 16, 20, 25}, 2), o);
    certified = verify_tiling(t).pass() && Rational(static_cast<std::int64_t>(t.bad_points), n) <= Rational(1, 16);
  } catch (const TypedTilingError&) {
  }
  CHECK_FALSE(certified);
}
