#include "doctest.h"

#include <algorithm>
#include <random>

#include <nlohmann/json.hpp>

#include "sofic/conjugacy.hpp"

using namespace sofic;

namespace {

// Interval shapes sized to the plan at eps/7, strictly increasing.
Shapes z_shapes(std::size_t n) {
  auto plan = plan_parameters(Rational(1, 28), Rational(1, 28));
  std::vector<std::uint64_t> L;
  for (unsigned j = 1; j <= plan.k; ++j) {
    auto want = static_cast<std::uint64_t>(to_double(plan.lambda[j - 1]) * static_cast<double>(n) / 5);
    L.push_back(std::max<std::uint64_t>(L.empty() ? 1 : L.back() + 1, want));
  }
  return interval_shapes(L, 2);
}

SoficApprox phase(const SoficApprox& phi, int k) {
  return phi.transformed([k](const Permutation& p) { return power(p, k); }, phi.degree(), "phase");
}

ConjugatorOptions z_options(std::size_t n) {
  ConjugatorOptions o;
  o.min_degree = n;
  o.max_bad_fraction = Rational(1, 4);
  o.shapes = z_shapes(n);
  return o;
}

}  // namespace

TEST_CASE("defect of explicit conjugators") {
  const std::size_t n = 200;
  auto psi = arithmetic_bs_approx(n + 1, 2);  // n + 1 = 201 is odd
  std::vector<BsElement> keys{BsElement::a1(2), BsElement::a2(2)};
  auto same = conjugacy_defect(Permutation::identity(n + 1), psi, psi, keys, Rational(1, 4));
  REQUIRE(same.max);
  CHECK(same.max->numerator() == 0);
  CHECK(same.pass);

  std::mt19937_64 rng(9);
  std::vector<Point> v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) v[i] = i;
  std::shuffle(v.begin(), v.end(), rng);
  Permutation sigma(v);
  auto conj = psi.transformed([&](const Permutation& p) { return compose(sigma, compose(p, sigma.inverse())); }, n + 1,
                              "conj");
  CHECK(conjugacy_defect(sigma, psi, conj, keys, Rational(1, 4)).max->numerator() == 0);

  std::shuffle(v.begin(), v.end(), rng);
  auto random = conjugacy_defect(Permutation(v), psi, conj, keys, Rational(1, 4));
  CHECK(random.max->value() > Rational(1, 2));
  CHECK_FALSE(random.pass);
}

TEST_CASE("identical Z models") {
  const std::size_t n = 1000;
  auto phi = cyclic_model(n);
  auto c = build_conjugator(phi, phi, z_options(n));
  auto d = conjugacy_defect(c, phi, phi, {BsElement::a2(2)}, Rational(1, 4));
  CHECK(d.pass);
  CHECK(d.max->value() <= Rational(1, 4));
  CHECK(c.support_fraction >= Rational(6, 7));
}

TEST_CASE("Z models with coprime phases") {
  const std::size_t n = 1000;
  auto phi1 = cyclic_model(n);
  auto phi2 = phase(phi1, 3);
  auto c = build_conjugator(phi1, phi2, z_options(n));
  auto d = conjugacy_defect(c, phi1, phi2, {BsElement::a2(2)}, Rational(1, 4));
  CHECK(d.pass);
  CHECK(d.max->value() <= Rational(1, 4));

  // tau is a bijection carrying Lambda_1 onto Lambda_2
  CHECK(c.tau.degree() == n);
  std::vector<Point> image;
  for (Point x : c.support1) image.push_back(c.tau(x));
  std::sort(image.begin(), image.end());
  CHECK(image == c.support2);
  CHECK(c.support_fraction == Rational(static_cast<std::int64_t>(c.support1.size()), static_cast<std::int64_t>(n)));
  REQUIRE(d.regularity.size() == 1);
  for (const auto& r : d.regularity[0]) {
    CHECK(r >= 0);
    CHECK(r <= 1);
  }
  CHECK(c.s_prime_size > 0);

  auto j = to_json(c);
  CHECK(j.at("tau").size() == n);
}

TEST_CASE("insufficient support is reported") {
  const std::size_t n = 1000;
  auto phi1 = cyclic_model(n);
  auto phi2 = phase(phi1, 7);
  CHECK_THROWS_AS(build_conjugator(phi1, phi2, z_options(n)), InsufficientSupport);
  try {
    build_conjugator(phi1, phi2, z_options(n));
  } catch (const InsufficientSupport& e) {
    CHECK(e.fraction < 1 - Rational(4, 28));
  }
}
