#include "sofic/conjugacy.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace sofic {

namespace {

// Per-center trims on one side: F_{j,c} = {g : phi(g) c lies in the core of c},
// cores taken greedily in ascending center order (the extraction order).
std::vector<std::vector<std::vector<char>>> side_trims(const Tiling& t) {
  const std::size_t n = t.phi.degree();
  std::vector<std::vector<std::vector<char>>> out(t.plan.k);
  for (unsigned j = 1; j <= t.plan.k; ++j) {
    const auto& Fj = t.shapes[j - 1];
    std::vector<Permutation> img;
    for (const BsElement& g : Fj) img.push_back(t.phi.at(g));
    std::vector<char> taken(n, 0);
    for (Point c : t.centers[j - 1]) {
      std::vector<char> keep(Fj.size(), 0);
      for (std::size_t i = 0; i < Fj.size(); ++i) {
        Point y = img[i](c);
        if (!taken[y]) {
          keep[i] = 1;
          taken[y] = 1;
        }
      }
      out[j - 1].push_back(std::move(keep));
    }
  }
  return out;
}

Rational frac(std::size_t a, std::size_t b) {
  return Rational(static_cast<std::int64_t>(a), static_cast<std::int64_t>(b));
}

}  // namespace

Conjugator build_conjugator(const SoficApprox& phi1, const SoficApprox& phi2, const ConjugatorOptions& options) {
  if (phi1.degree() != phi2.degree()) throw std::invalid_argument("approximations have different degrees");
  const std::size_t n = phi1.degree();
  TilingOptions topt;
  topt.eps = options.tile_eps.value_or(options.eps / 7);
  topt.kappa = options.tile_kappa.value_or(options.eps / 7);
  topt.min_degree = options.min_degree;
  topt.max_bad_fraction = options.max_bad_fraction;

  Conjugator out;
  out.tiling1 = quasi_tile(phi1, options.shapes, topt);
  out.tiling2 = quasi_tile(phi2, options.shapes, topt);
  const unsigned k = out.tiling1.plan.k;

  auto trims1 = side_trims(out.tiling1);
  auto trims2 = side_trims(out.tiling2);

  std::vector<Point> tau(n, 0);
  std::vector<char> in1(n, 0), in2(n, 0);
  out.rho.assign(k, {});
  out.trimmed.assign(k, {});
  out.min_trim_fraction = 1;
  std::size_t support = 0;
  for (unsigned j = 1; j <= k; ++j) {
    const auto& Fj = options.shapes[j - 1];
    std::vector<Permutation> img1, img2;
    for (const BsElement& g : Fj) {
      img1.push_back(phi1.at(g));
      img2.push_back(phi2.at(g));
    }
    const auto& C1 = out.tiling1.centers[j - 1];
    const auto& C2 = out.tiling2.centers[j - 1];
    const std::size_t count = std::min(C1.size(), C2.size());
    for (std::size_t i = 0; i < count; ++i) {
      const Point c1 = C1[i], c2 = C2[i];
      out.rho[j - 1].push_back({c1, c2});
      std::vector<std::uint32_t> shape;
      for (std::size_t g = 0; g < Fj.size(); ++g) {
        if (!trims1[j - 1][i][g] || !trims2[j - 1][i][g]) continue;
        shape.push_back(static_cast<std::uint32_t>(g));
        Point x = img1[g](c1), y = img2[g](c2);
        tau[x] = y;
        in1[x] = 1;
        in2[y] = 1;
        ++support;
      }
      out.min_trim_fraction = std::min(out.min_trim_fraction, frac(shape.size(), Fj.size()));
      out.trimmed[j - 1].push_back(std::move(shape));
    }
  }
  out.support_fraction = frac(support, n);

  // Order-preserving bijection between the complements.
  std::vector<Point> rest1, rest2;
  for (std::size_t x = 0; x < n; ++x) {
    if (in1[x]) out.support1.push_back(static_cast<Point>(x));
    else rest1.push_back(static_cast<Point>(x));
    if (in2[x]) out.support2.push_back(static_cast<Point>(x));
    else rest2.push_back(static_cast<Point>(x));
  }
  if (rest1.size() != rest2.size()) throw std::logic_error("tile transport is not a bijection");
  for (std::size_t i = 0; i < rest1.size(); ++i) tau[rest1[i]] = rest2[i];
  out.tau = Permutation(std::move(tau));

  {
    const auto& Fk = options.shapes.back();
    const std::uint64_t m = Fk.front().base();
    std::unordered_set<BsElement, BsElementHash> sp;
    const std::vector<BsElement> S{BsElement::a1(m), BsElement::a2(m)};
    for (const BsElement& g : Fk) {
      BsElement ginv = g.inverse();
      sp.insert(ginv);
      for (const BsElement& h : Fk) sp.insert(bs_op(ginv, h));
    }
    for (const BsElement& s : S) {
      sp.insert(s);
      for (const BsElement& g : Fk) sp.insert(bs_op(s, g));
    }
    out.s_prime_size = sp.size();
  }

  if (out.support_fraction < 1 - Rational(4, 7) * options.eps) {
    throw InsufficientSupport("insufficient support: |Lambda| / n = " + to_string(out.support_fraction) + " < 1 - 4 eps/7",
                              out.support_fraction);
  }
  return out;
}

ConjugacyDefect conjugacy_defect(const Permutation& tau, const SoficApprox& phi1, const SoficApprox& phi2,
                                 const std::vector<BsElement>& keys, const Rational& eps) {
  if (keys.empty()) throw std::invalid_argument("conjugacy defect over an empty key set");
  ConjugacyDefect out;
  const Permutation tau_inv = tau.inverse();
  for (const BsElement& s : keys) {
    if (!phi1.defined_at(s) || !phi2.defined_at(s)) throw std::out_of_range("key missing: " + s.to_string());
    HammingValue d = hamming(compose(tau, compose(phi1.at(s), tau_inv)), phi2.at(s));
    out.per_key.push_back({s.to_string(), d});
    if (!out.max || d > *out.max) out.max = d;
  }
  out.pass = out.max->value() <= eps;
  return out;
}

ConjugacyDefect conjugacy_defect(const Conjugator& c, const SoficApprox& phi1, const SoficApprox& phi2,
                                 const std::vector<BsElement>& keys, const Rational& eps) {
  ConjugacyDefect out = conjugacy_defect(c.tau, phi1, phi2, keys, eps);
  const std::size_t n = phi1.degree();
  const auto& shapes = c.tiling1.shapes;
  const auto& Fk = shapes.back();
  std::vector<Permutation> f1, f1inv, f2, f2inv;
  for (const BsElement& g : Fk) {
    f1.push_back(phi1.at(g));
    f2.push_back(phi2.at(g));
    f1inv.push_back(f1.back().inverse());
    f2inv.push_back(f2.back().inverse());
  }
  for (const BsElement& s : keys) {
    // Lambda_{1,s}: points phi_1(g) c with g and s g both in F_{j,c}.
    std::size_t lambda_s = 0;
    for (std::size_t j = 0; j < shapes.size(); ++j) {
      std::unordered_map<BsElement, std::uint32_t, BsElementHash> pos;
      for (std::size_t i = 0; i < shapes[j].size(); ++i) pos.emplace(shapes[j][i], static_cast<std::uint32_t>(i));
      std::vector<std::int64_t> shifted(shapes[j].size(), -1);
      for (std::size_t i = 0; i < shapes[j].size(); ++i) {
        auto it = pos.find(bs_op(s, shapes[j][i]));
        if (it != pos.end()) shifted[i] = it->second;
      }
      for (const auto& trimmed : c.trimmed[j]) {
        std::vector<char> member(shapes[j].size(), 0);
        for (auto g : trimmed) member[g] = 1;
        for (auto g : trimmed) lambda_s += shifted[g] >= 0 && member[shifted[g]];
      }
    }
    auto regular = [&](const SoficApprox& phi, const std::vector<Permutation>& inv) {
      const Permutation ps = phi.at(s);
      std::vector<char> ok(n, 1);
      for (std::size_t g = 0; g < Fk.size(); ++g) {
        const Permutation psg = phi.at(bs_op(s, Fk[g]));
        for (std::size_t x = 0; x < n; ++x) {
          if (ps(static_cast<Point>(x)) != psg(inv[g](static_cast<Point>(x)))) ok[x] = 0;
        }
      }
      return static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 1));
    };
    out.regularity.push_back({frac(lambda_s, n), frac(regular(phi1, f1inv), n), frac(regular(phi2, f2inv), n)});
  }
  return out;
}

nlohmann::json to_json(const Conjugator& c) {
  nlohmann::json j;
  j["degree"] = c.tau.degree();
  j["tau"] = std::vector<Point>(c.tau.image().begin(), c.tau.image().end());
  j["support1"] = c.support1;
  j["support2"] = c.support2;
  j["support_fraction"] = to_string(c.support_fraction);
  j["min_trim_fraction"] = to_string(c.min_trim_fraction);
  j["s_prime_size"] = c.s_prime_size;
  nlohmann::json rho = nlohmann::json::array();
  for (const auto& r : c.rho) rho.push_back(r);
  j["rho"] = rho;
  return j;
}

}  // namespace sofic
