#include "sofic/tiling.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace sofic {

namespace {

bool at_least_fraction(std::size_t part, const Rational& fraction, std::size_t whole) {
  return Rational(static_cast<std::int64_t>(part)) >= fraction * static_cast<std::int64_t>(whole);
}

Rational ratio(std::size_t a, std::size_t b) {
  return Rational(static_cast<std::int64_t>(a), static_cast<std::int64_t>(b));
}

// Dinic max-flow, just enough for the epsilon-disjointness check.
class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t nodes) : head_(nodes, -1), level_(nodes), iter_(nodes) {}

  void add_edge(std::size_t u, std::size_t v, std::int64_t cap) {
    edges_.push_back({v, cap, head_[u]});
    head_[u] = static_cast<int>(edges_.size() - 1);
    edges_.push_back({u, 0, head_[v]});
    head_[v] = static_cast<int>(edges_.size() - 1);
  }

  std::int64_t max_flow(std::size_t s, std::size_t t) {
    std::int64_t flow = 0;
    while (bfs(s, t)) {
      for (std::size_t i = 0; i < head_.size(); ++i) iter_[i] = head_[i];
      while (std::int64_t f = dfs(s, t, std::numeric_limits<std::int64_t>::max())) flow += f;
    }
    return flow;
  }

 private:
  struct Edge {
    std::size_t to;
    std::int64_t cap;
    int next;
  };

  bool bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      std::size_t u = q.front();
      q.pop();
      for (int e = head_[u]; e != -1; e = edges_[e].next) {
        if (edges_[e].cap > 0 && level_[edges_[e].to] < 0) {
          level_[edges_[e].to] = level_[u] + 1;
          q.push(edges_[e].to);
        }
      }
    }
    return level_[t] >= 0;
  }

  // Iterative augmenting-path search; recursion depth is only 3 here but the
  // explicit stack keeps it safe for other callers.
  std::int64_t dfs(std::size_t s, std::size_t t, std::int64_t limit) {
    std::vector<int> path;
    std::size_t u = s;
    while (true) {
      if (u == t) {
        std::int64_t f = limit;
        for (int e : path) f = std::min(f, edges_[e].cap);
        for (int e : path) {
          edges_[e].cap -= f;
          edges_[e ^ 1].cap += f;
        }
        return f;
      }
      int& e = iter_[u];
      while (e != -1 && !(edges_[e].cap > 0 && level_[edges_[e].to] == level_[u] + 1)) e = edges_[e].next;
      if (e == -1) {
        if (path.empty()) return 0;
        level_[u] = -1;  // dead end
        int back = path.back();
        path.pop_back();
        u = edges_[back ^ 1].to;
        iter_[u] = edges_[iter_[u]].next;
        continue;
      }
      path.push_back(e);
      u = edges_[e].to;
    }
  }

  std::vector<Edge> edges_;
  std::vector<int> head_;
  std::vector<int> level_;
  std::vector<int> iter_;
};

std::vector<Permutation> images_of(const SoficApprox& phi, const std::vector<BsElement>& elems) {
  std::vector<Permutation> out;
  out.reserve(elems.size());
  for (const BsElement& g : elems) out.push_back(phi.at(g));
  return out;
}

void check_shapes(const Shapes& shapes, unsigned k) {
  using K = TypedTilingError::Kind;
  if (shapes.size() != k) {
    throw TypedTilingError(K::BadShapes, "expected " + std::to_string(k) + " shapes, got " +
                                             std::to_string(shapes.size()));
  }
  std::unordered_set<BsElement, BsElementHash> previous;
  for (std::size_t j = 0; j < shapes.size(); ++j) {
    std::unordered_set<BsElement, BsElementHash> cur(shapes[j].begin(), shapes[j].end());
    if (cur.size() != shapes[j].size()) throw TypedTilingError(K::BadShapes, "shape has repeated elements");
    if (cur.empty() || !cur.count(BsElement::identity(shapes[j].front().base()))) {
      throw TypedTilingError(K::BadShapes, "shape F_" + std::to_string(j + 1) + " does not contain the identity");
    }
    for (const BsElement& g : previous) {
      if (!cur.count(g)) throw TypedTilingError(K::BadShapes, "shapes are not nested at F_" + std::to_string(j + 1));
    }
    previous = std::move(cur);
  }
}

}  // namespace

TilingPlan plan_parameters(const Rational& eps, const Rational& kappa) {
  if (eps <= 0 || eps > Rational(1, 4)) throw std::invalid_argument("tiling needs 0 < eps <= 1/4");
  if (kappa <= 0) throw std::invalid_argument("tiling needs kappa > 0");
  TilingPlan plan;
  plan.eps = eps;
  plan.kappa = kappa;
  plan.kappa_internal = kappa < eps / 2 ? kappa : Rational(eps / 2);

  Rational p = 1;
  while (p > eps / 2) {
    p *= 1 - eps;
    ++plan.k;
  }
  plan.lambda.assign(plan.k, Rational(0));
  Rational tail = 0;  // sigma_{j+1}
  for (unsigned j = plan.k; j >= 1; --j) {
    plan.lambda[j - 1] = j == plan.k ? eps : eps * (1 - tail);
    tail += plan.lambda[j - 1];
  }
  plan.sigma1 = tail;
  Rational eta = plan.kappa_internal;
  for (unsigned i = 1; i < plan.k; ++i) eta *= eps / 24;
  plan.eta = eta;
  return plan;
}

Rational sigma(const TilingPlan& plan, unsigned j) {
  Rational s = 0;
  for (unsigned i = j; i <= plan.k; ++i) s += plan.lambda[i - 1];
  return s;
}

Extraction extract_eps_disjoint(const SetFamily& family, const Rational& eps, std::optional<Rational> goal_cap) {
  if (family.sets.empty()) throw std::invalid_argument("extraction from an empty family");
  const std::size_t n = family.ground_size;
  std::vector<std::uint32_t> mult(n, 0);
  std::size_t total = 0;
  for (const auto& a : family.sets) {
    for (Point x : a) {
      if (x >= n) throw std::out_of_range("family member outside the ground set");
      ++mult[x];
    }
    total += a.size();
  }

  Extraction out;
  out.multiplicity = n == 0 ? 0 : *std::max_element(mult.begin(), mult.end());
  out.rho = out.multiplicity == 0 ? Rational(1) : 1 - ratio(total, out.multiplicity * n);
  out.goal = eps * (1 - out.rho) * static_cast<std::int64_t>(n);
  if (goal_cap && *goal_cap < out.goal) out.goal = *goal_cap;

  std::vector<std::size_t> order(family.sets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return family.sets[a].size() > family.sets[b].size(); });

  const Rational keep = 1 - eps;
  std::vector<std::uint32_t> count(n, 0);
  std::size_t covered = 0;
  for (std::size_t idx : order) {
    if (Rational(static_cast<std::int64_t>(covered)) >= out.goal) break;
    const auto& a = family.sets[idx];
    if (a.empty()) continue;
    std::size_t fresh = 0;
    for (Point x : a) fresh += count[x] == 0;
    if (!at_least_fraction(fresh, keep, a.size())) continue;
    for (Point x : a) covered += count[x]++ == 0;
    out.selected.push_back(idx);
  }

  // Prune to a minimal selection, latest first.
  std::vector<std::size_t> kept;
  for (auto it = out.selected.rbegin(); it != out.selected.rend(); ++it) {
    const auto& a = family.sets[*it];
    std::size_t unique = 0;
    for (Point x : a) unique += count[x] == 1;
    if (Rational(static_cast<std::int64_t>(covered - unique)) >= out.goal) {
      for (Point x : a) --count[x];
      covered -= unique;
    } else {
      kept.push_back(*it);
    }
  }
  std::reverse(kept.begin(), kept.end());
  out.selected = std::move(kept);
  out.covered = covered;
  out.goal_reached = Rational(static_cast<std::int64_t>(covered)) >= out.goal;

  std::vector<char> taken(n, 0);
  for (std::size_t idx : out.selected) {
    std::vector<Point> w;
    for (Point x : family.sets[idx]) {
      if (!taken[x]) w.push_back(x);
    }
    for (Point x : w) taken[x] = 1;
    out.witnesses.push_back(std::move(w));
  }
  return out;
}

bool is_eps_disjoint(const std::vector<std::vector<Point>>& sets, std::size_t ground_size, const Rational& eps) {
  const std::size_t source = sets.size() + ground_size;
  const std::size_t sink = source + 1;
  FlowNetwork net(sink + 1);
  std::int64_t demand = 0;
  const Rational keep = 1 - eps;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    Rational need = keep * static_cast<std::int64_t>(sets[i].size());
    BigInt ceil_need = numerator(need) / denominator(need);
    if (ceil_need * denominator(need) < numerator(need)) ++ceil_need;
    auto d = ceil_need.convert_to<std::int64_t>();
    if (d <= 0) continue;
    demand += d;
    net.add_edge(source, i, d);
    for (Point x : sets[i]) {
      if (x >= ground_size) return false;
      net.add_edge(i, sets.size() + x, 1);
    }
  }
  for (std::size_t x = 0; x < ground_size; ++x) net.add_edge(sets.size() + x, sink, 1);
  return net.max_flow(source, sink) == demand;
}

Shapes interval_shapes(const std::vector<std::uint64_t>& lengths, std::uint64_t m) {
  Shapes shapes;
  for (std::uint64_t len : lengths) shapes.push_back(box_set(1, len, m));
  return shapes;
}

Shapes box_shapes(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& extents, std::uint64_t m) {
  Shapes shapes;
  for (auto [rows, cols] : extents) shapes.push_back(box_set(rows, cols, m));
  return shapes;
}

Tiling quasi_tile(const SoficApprox& phi, const Shapes& shapes, const TilingOptions& options) {
  using K = TypedTilingError::Kind;
  Tiling t;
  t.plan = plan_parameters(options.eps, options.kappa);
  const unsigned k = t.plan.k;
  check_shapes(shapes, k);
  t.shapes = shapes;
  t.phi = phi;
  const std::size_t n = phi.degree();
  const auto& Fk = shapes.back();

  if (options.min_degree) {
    t.min_degree = *options.min_degree;
  } else {
    Rational bound = Rational(64 * static_cast<std::int64_t>(Fk.size())) / (options.eps * options.kappa);
    BigInt c = numerator(bound) / denominator(bound);
    if (c * denominator(bound) < numerator(bound)) ++c;
    t.min_degree = c.convert_to<std::size_t>();
  }
  if (n < t.min_degree) {
    throw TypedTilingError(K::DegreeTooSmall, "degree " + std::to_string(n) + " is below the admissibility threshold N = " +
                                                  std::to_string(t.min_degree));
  }

  std::vector<Permutation> img, inv;
  try {
    img = images_of(phi, Fk);
  } catch (const std::out_of_range& e) {
    throw TypedTilingError(K::NotDefined, std::string("approximation not defined on F_k: ") + e.what());
  }
  for (const auto& p : img) inv.push_back(p.inverse());

  // B: multiplicative and free on F_k^{-1} F_k. Pairs are grouped by g^{-1} h
  // so each product image is synthesized once.
  std::map<BsElement, std::vector<std::pair<std::size_t, std::size_t>>> by_product;
  for (std::size_t a = 0; a < Fk.size(); ++a) {
    BsElement ginv = Fk[a].inverse();
    for (std::size_t b = 0; b < Fk.size(); ++b) by_product[bs_op(ginv, Fk[b])].push_back({a, b});
  }
  std::vector<char> bad(n, 0);
  for (const auto& [u, pairs] : by_product) {
    Permutation pu;
    try {
      pu = phi.at(u);
    } catch (const std::exception& e) {
      throw TypedTilingError(K::NotDefined, "approximation not defined on F_k^{-1} F_k at " + u.to_string());
    }
    const bool trivial = u.is_identity();
    for (const auto& [a, b] : pairs) {
      const Permutation& ga = inv[a];
      const Permutation& hb = img[b];
      for (std::size_t x = 0; x < n; ++x) {
        Point ux = pu(static_cast<Point>(x));
        if (ga(hb(static_cast<Point>(x))) != ux || (!trivial && ux == x)) bad[x] = 1;
      }
    }
  }
  t.bad_points = static_cast<std::size_t>(std::count(bad.begin(), bad.end(), 1));
  Rational max_bad = options.max_bad_fraction.value_or(t.plan.kappa / 4);
  if (ratio(t.bad_points, n) > max_bad) {
    throw TypedTilingError(K::TooCoarse, "approximation too coarse: " + std::to_string(t.bad_points) + " of " +
                                             std::to_string(n) + " points fail multiplicativity or freeness on F_k^{-1} F_k");
  }

  std::unordered_map<BsElement, std::size_t, BsElementHash> index_in_fk;
  for (std::size_t i = 0; i < Fk.size(); ++i) index_in_fk.emplace(Fk[i], i);

  std::vector<char> occupied(n, 0);
  t.centers.assign(k, {});
  t.diagnostics.assign(k, {});
  for (unsigned j = k; j >= 1; --j) {
    const auto& Fj = shapes[j - 1];
    std::vector<std::size_t> idx;
    for (const BsElement& g : Fj) idx.push_back(index_in_fk.at(g));

    SetFamily fam;
    fam.ground_size = n;
    std::vector<Point> good;
    for (std::size_t c = 0; c < n; ++c) {
      if (bad[c]) continue;
      std::vector<Point> tile;
      tile.reserve(idx.size());
      bool clear = true;
      for (std::size_t i : idx) {
        Point y = img[i](static_cast<Point>(c));
        if (occupied[y]) {
          clear = false;
          break;
        }
        tile.push_back(y);
      }
      if (!clear) continue;
      good.push_back(static_cast<Point>(c));
      fam.sets.push_back(std::move(tile));
    }

    ShapeDiagnostics& diag = t.diagnostics[j - 1];
    diag.good_centers = good.size();
    if (!good.empty()) {
      Extraction ex = extract_eps_disjoint(fam, t.plan.eps, t.plan.lambda[j - 1] * static_cast<std::int64_t>(n));
      diag.rho = ex.rho;
      diag.multiplicity = ex.multiplicity;
      diag.goal = ex.goal;
      for (std::size_t s : ex.selected) {
        t.centers[j - 1].push_back(good[s]);
        for (Point y : fam.sets[s]) occupied[y] = 1;
      }
      std::sort(t.centers[j - 1].begin(), t.centers[j - 1].end());
    } else {
      diag.rho = 1;
    }
    const std::vector<BsElement> unit{BsElement::identity(Fj.front().base())};
    for (const BsElement& s : options.probe_generators) {
      diag.folner.push_back(folner_diagnostics(j > 1 ? shapes[j - 2] : unit, Fj, s, j, t.plan.eta));
    }
  }
  return t;
}

TilingCertificate verify_tiling(const Tiling& t) {
  TilingCertificate cert;
  const std::size_t n = t.phi.degree();
  const TilingPlan& plan = t.plan;
  const unsigned k = plan.k;

  {
    std::string why;
    TilingPlan fresh = plan_parameters(plan.eps, plan.kappa);
    Rational sum = 0;
    for (const Rational& l : plan.lambda) sum += l;
    if (plan.lambda.size() != k || fresh.k != k) {
      why = "k does not match the plan";
    } else if (plan.lambda[k - 1] != plan.eps) {
      why = "lambda_k != eps";
    } else {
      Rational tail = plan.lambda[k - 1];
      for (unsigned j = k - 1; j >= 1 && why.empty(); --j) {
        if (plan.lambda[j - 1] != plan.eps * (1 - tail)) why = "lambda recursion fails at j = " + std::to_string(j);
        tail += plan.lambda[j - 1];
      }
    }
    if (why.empty() && (sum < 1 - plan.eps || sum > 1)) why = "sum of lambdas outside [1 - eps, 1]";
    if (why.empty() && (t.shapes.size() != k || t.centers.size() != k)) why = "shape or center count differs from k";
    cert.plan = {why.empty(), why.empty() ? "sum lambda = " + to_string(sum) : why};
    if (!cert.plan.pass) {
      cert.disjoint = cert.injective = cert.covering = cert.density = {false, "plan invalid"};
      return cert;
    }
  }

  std::vector<int> owner(n, -1);
  std::vector<std::vector<Point>> tiles;
  std::vector<std::size_t> shape_union(k, 0);
  bool injective = true;
  bool disjoint = true;
  std::string inj_detail = "all tiles injective", dis_detail = "shape unions pairwise disjoint";
  for (unsigned j = 1; j <= k; ++j) {
    std::vector<Permutation> img;
    try {
      img = images_of(t.phi, t.shapes[j - 1]);
    } catch (const std::exception& e) {
      cert.disjoint = cert.injective = cert.covering = cert.density = {false, e.what()};
      return cert;
    }
    std::vector<char> in_shape(n, 0);
    for (Point c : t.centers[j - 1]) {
      if (c >= n) {
        injective = false;
        inj_detail = "center outside the ground set";
        continue;
      }
      std::vector<Point> tile;
      for (const auto& p : img) tile.push_back(p(c));
      std::vector<Point> sorted = tile;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        injective = false;
        inj_detail = "s -> phi(s) c not injective for j = " + std::to_string(j) + ", c = " + std::to_string(c);
      }
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      for (Point y : sorted) {
        if (owner[y] != -1 && owner[y] != static_cast<int>(j)) {
          disjoint = false;
          dis_detail = "phi(F_" + std::to_string(owner[y]) + ")C and phi(F_" + std::to_string(j) + ")C meet at " +
                       std::to_string(y);
        }
        if (!in_shape[y]) {
          in_shape[y] = 1;
          ++shape_union[j - 1];
        }
        if (owner[y] == -1) owner[y] = static_cast<int>(j);
      }
      tiles.push_back(std::move(sorted));
    }
  }
  cert.injective = {injective, inj_detail};
  cert.disjoint = {disjoint, dis_detail};

  std::size_t covered = static_cast<std::size_t>(std::count_if(owner.begin(), owner.end(), [](int o) { return o != -1; }));
  cert.coverage = ratio(covered, n);
  bool eps_disjoint = is_eps_disjoint(tiles, n, plan.eps);
  bool covers = cert.coverage >= 1 - plan.eps;
  cert.covering = {eps_disjoint && covers, std::string(eps_disjoint ? "eps-disjoint" : "NOT eps-disjoint") +
                                               ", coverage " + to_string(cert.coverage)};

  bool density = true;
  std::string den_detail = "all shapes within [(1-kappa) lambda_j, (1+kappa) lambda_j]";
  for (unsigned j = 1; j <= k; ++j) {
    Rational r = ratio(shape_union[j - 1], n);
    Rational lo = r - (1 - plan.kappa) * plan.lambda[j - 1];
    Rational hi = (1 + plan.kappa) * plan.lambda[j - 1] - r;
    cert.ratios.push_back(r);
    cert.lower_margin.push_back(lo);
    cert.upper_margin.push_back(hi);
    if ((lo < 0 || hi < 0) && density) {
      density = false;
      den_detail = "shape " + std::to_string(j) + " density " + to_string(r) + " outside bounds (margins " +
                   std::to_string(to_double(lo)) + ", " + std::to_string(to_double(hi)) + ")";
    }
  }
  cert.density = {density, den_detail};
  return cert;
}

nlohmann::json to_json(const Tiling& t, const TilingCertificate& cert) {
  nlohmann::json j;
  if (t.model) j["model"] = to_json(*t.model);
  j["degree"] = t.phi.degree();
  j["eps"] = to_string(t.plan.eps);
  j["kappa"] = to_string(t.plan.kappa);
  j["k"] = t.plan.k;
  j["eta"] = to_double(t.plan.eta);
  j["min_degree"] = t.min_degree;
  j["bad_points"] = t.bad_points;
  nlohmann::json lambda = nlohmann::json::array(), shapes = nlohmann::json::array(), sizes = nlohmann::json::array();
  for (const Rational& l : t.plan.lambda) lambda.push_back(to_string(l));
  for (const auto& F : t.shapes) {
    nlohmann::json s = nlohmann::json::array();
    for (const BsElement& g : F) s.push_back(to_json(g));
    shapes.push_back(std::move(s));
    sizes.push_back(F.size());
  }
  j["lambda"] = lambda;
  j["shapes"] = shapes;
  j["shape_sizes"] = sizes;
  j["centers"] = t.centers;
  nlohmann::json margins = nlohmann::json::array();
  for (std::size_t i = 0; i < cert.ratios.size(); ++i) {
    margins.push_back({{"j", i + 1},
                       {"ratio", to_string(cert.ratios[i])},
                       {"lower_margin", to_double(cert.lower_margin[i])},
                       {"upper_margin", to_double(cert.upper_margin[i])}});
  }
  j["margins"] = margins;
  nlohmann::json diag = nlohmann::json::array();
  for (std::size_t i = 0; i < t.diagnostics.size(); ++i) {
    const auto& d = t.diagnostics[i];
    nlohmann::json f = nlohmann::json::array();
    for (const auto& r : d.folner) {
      f.push_back({{"boundary_ratio", to_double(r.boundary_ratio)},
                   {"boundary_ok", r.boundary_ok},
                   {"nesting_ratio", to_double(r.nesting_ratio)},
                   {"nesting_ok", r.nesting_ok}});
    }
    diag.push_back({{"j", i + 1},
                    {"good_centers", d.good_centers},
                    {"rho", to_double(d.rho)},
                    {"multiplicity", d.multiplicity},
                    {"goal", to_double(d.goal)},
                    {"folner", f}});
  }
  j["diagnostics"] = diag;
  auto conc = [](const ConclusionResult& c) { return nlohmann::json{{"pass", c.pass}, {"detail", c.detail}}; };
  j["conclusions"] = {{"plan", conc(cert.plan)},
                      {"disjoint", conc(cert.disjoint)},
                      {"injective", conc(cert.injective)},
                      {"covering", conc(cert.covering)},
                      {"density", conc(cert.density)}};
  j["pass"] = cert.pass();
  return j;
}

Tiling tiling_from_json(const nlohmann::json& j) {
  if (!j.contains("model")) throw std::invalid_argument("certificate lacks a model record");
  Tiling t;
  t.model = model_spec_from_json(j.at("model"));
  t.phi = build_model(*t.model);
  t.plan = plan_parameters(parse_rational(j.at("eps").get<std::string>()),
                           parse_rational(j.at("kappa").get<std::string>()));
  t.plan.k = j.at("k").get<unsigned>();
  t.plan.lambda.clear();
  for (const auto& l : j.at("lambda")) t.plan.lambda.push_back(parse_rational(l.get<std::string>()));
  for (const auto& s : j.at("shapes")) {
    std::vector<BsElement> F;
    for (const auto& g : s) F.push_back(bs_element_from_json(g, t.model->m));
    t.shapes.push_back(std::move(F));
  }
  t.centers = j.at("centers").get<std::vector<std::vector<Point>>>();
  t.min_degree = j.value("min_degree", std::size_t{0});
  t.bad_points = j.value("bad_points", std::size_t{0});
  return t;
}

}  // namespace sofic
