#include "sofic/soficcheck.hpp"

#include <mutex>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace sofic {

struct SoficApprox::Cache {
  static constexpr std::size_t kMaxEntries = 4096;
  std::mutex mutex;
  std::unordered_map<BsElement, Permutation, BsElementHash> images;
};

SoficApprox SoficApprox::tabulated(std::uint64_t m, std::size_t degree,
                                   std::vector<std::pair<BsElement, Permutation>> entries) {
  SoficApprox phi;
  phi.degree_ = degree;
  phi.kind_ = KeyKind::Element;
  phi.m_ = m;
  phi.description_ = "table";
  for (auto& [g, p] : entries) {
    if (g.base() != m) throw std::invalid_argument("table key has the wrong base");
    if (p.degree() != degree) throw std::invalid_argument("table image has the wrong degree");
    phi.element_domain_.push_back(g);
    if (!phi.elements_.emplace(g, std::move(p)).second) throw std::invalid_argument("duplicate table key");
  }
  return phi;
}

SoficApprox SoficApprox::tabulated_words(std::size_t degree, std::vector<std::pair<Word, Permutation>> entries) {
  SoficApprox phi;
  phi.degree_ = degree;
  phi.kind_ = KeyKind::Word;
  phi.description_ = "word table";
  for (auto& [w, p] : entries) {
    if (p.degree() != degree) throw std::invalid_argument("table image has the wrong degree");
    phi.word_domain_.push_back(w);
    if (!phi.words_.emplace(w, std::move(p)).second) throw std::invalid_argument("duplicate table key");
  }
  return phi;
}

SoficApprox SoficApprox::lazy(std::uint64_t m, std::size_t degree, Synthesizer synth, std::string description) {
  SoficApprox phi;
  phi.degree_ = degree;
  phi.kind_ = KeyKind::Element;
  phi.m_ = m;
  phi.synth_ = std::move(synth);
  phi.cache_ = std::make_shared<Cache>();
  phi.description_ = std::move(description);
  return phi;
}

bool SoficApprox::defined_at(const BsElement& g) const {
  if (kind_ != KeyKind::Element || g.base() != m_) return false;
  if (elements_.count(g)) return true;
  if (!synth_) return false;
  try {
    (void)at(g);
    return true;
  } catch (const std::domain_error&) {
    return false;
  }
}

bool SoficApprox::defined_at(const Word& w) const { return kind_ == KeyKind::Word && words_.count(w); }

Permutation SoficApprox::at(const BsElement& g) const {
  if (kind_ != KeyKind::Element) throw std::out_of_range("approximation is keyed by words");
  if (auto it = elements_.find(g); it != elements_.end()) return it->second;
  if (!synth_) throw std::out_of_range("no image for element " + g.to_string());
  {
    std::lock_guard lock(cache_->mutex);
    if (auto it = cache_->images.find(g); it != cache_->images.end()) return it->second;
  }
  Permutation p = synth_(g);
  std::lock_guard lock(cache_->mutex);
  if (cache_->images.size() < Cache::kMaxEntries) cache_->images.emplace(g, p);
  return p;
}

Permutation SoficApprox::at(const Word& w) const {
  if (kind_ != KeyKind::Word) throw std::out_of_range("approximation is keyed by elements");
  auto it = words_.find(w);
  if (it == words_.end()) throw std::out_of_range("no image for word " + w.to_string());
  return it->second;
}

SoficApprox SoficApprox::with_domain(std::vector<BsElement> domain) const {
  if (kind_ != KeyKind::Element) throw std::invalid_argument("with_domain needs an element-keyed approximation");
  for (const BsElement& g : domain) {
    if (!defined_at(g)) throw std::out_of_range("no image for element " + g.to_string());
  }
  SoficApprox copy = *this;
  copy.element_domain_ = std::move(domain);
  return copy;
}

SoficApprox SoficApprox::transformed(const std::function<Permutation(const Permutation&)>& f,
                                     std::size_t new_degree, std::string description) const {
  SoficApprox out;
  out.degree_ = new_degree;
  out.kind_ = kind_;
  out.m_ = m_;
  out.description_ = std::move(description);
  out.element_domain_ = element_domain_;
  out.word_domain_ = word_domain_;
  for (const auto& [g, p] : elements_) out.elements_.emplace(g, f(p));
  for (const auto& [w, p] : words_) out.words_.emplace(w, f(p));
  if (synth_) {
    auto inner = synth_;
    out.synth_ = [inner, f](const BsElement& g) { return f(inner(g)); };
    out.cache_ = std::make_shared<Cache>();
  }
  return out;
}

SoficReport check_sofic(const SoficApprox& phi, const Rational& delta) {
  SoficReport report;
  const std::size_t n = phi.degree();
  const Rational one_minus_delta = Rational(1) - delta;

  if (phi.key_kind() == KeyKind::Element) {
    const auto& S = phi.element_domain();
    if (S.empty()) throw std::invalid_argument("sofic check on an empty domain");
    std::unordered_map<BsElement, Permutation, BsElementHash> images;
    for (const BsElement& g : S) images.emplace(g, phi.at(g));
    for (const BsElement& g : S) {
      for (const BsElement& h : S) {
        BsElement gh = bs_op(g, h);
        auto it = images.find(gh);
        if (it == images.end()) continue;
        ++report.triples_checked;
        HammingValue d = hamming(compose(images.at(g), images.at(h)), it->second);
        if (!report.max_defect || d > *report.max_defect) {
          report.max_defect = d;
          report.defect_witness = {g.to_string(), h.to_string()};
        }
      }
      if (!g.is_identity()) {
        HammingValue disp = hamming_to_identity(images.at(g));
        if (!report.min_displacement || disp < *report.min_displacement) {
          report.min_displacement = disp;
          report.displacement_witness = g.to_string();
        }
      }
    }
  } else {
    const auto& S = phi.word_domain();
    if (S.empty()) throw std::invalid_argument("sofic check on an empty domain");
    std::map<Word, Permutation> images;
    for (const Word& w : S) images.emplace(w, phi.at(w));
    for (const Word& g : S) {
      for (const Word& h : S) {
        auto it = images.find(g * h);
        if (it == images.end()) continue;
        ++report.triples_checked;
        HammingValue d = hamming(compose(images.at(g), images.at(h)), it->second);
        if (!report.max_defect || d > *report.max_defect) {
          report.max_defect = d;
          report.defect_witness = {g.to_string(), h.to_string()};
        }
      }
      if (!g.empty()) {
        HammingValue disp = hamming_to_identity(images.at(g));
        if (!report.min_displacement || disp < *report.min_displacement) {
          report.min_displacement = disp;
          report.displacement_witness = g.to_string();
        }
      }
    }
  }

  report.vacuous = report.triples_checked == 0;
  report.multiplicative_ok = !report.max_defect || report.max_defect->value() < delta;
  report.displacement_ok = !report.min_displacement || report.min_displacement->value() > one_minus_delta;
  (void)n;
  return report;
}

Permutation psi_image(const BsElement& g, std::size_t n) {
  const std::uint64_t m = g.base();
  if (modarith::gcd(m % n, n) != 1 && n > 1) throw std::domain_error("psi needs gcd(m, n) = 1");
  std::uint64_t scale = modarith::pow_mod_signed(m, g.dilation(), n);
  std::uint64_t shift = modarith::mul_mod(modarith::reduce(g.numerator(), n),
                                          modarith::pow_mod_signed(m, -g.denominator_exponent(), n), n);
  std::vector<Permutation::Point> image(n);
  for (std::uint64_t x = 0; x < n; ++x) {
    std::uint64_t y = modarith::mul_mod(scale, x, n);
    image[x] = static_cast<Permutation::Point>((y + n - shift) % n);
  }
  return Permutation(std::move(image));
}

SoficApprox arithmetic_bs_approx(std::size_t n, std::uint64_t m) {
  if (n == 0) throw std::invalid_argument("degree must be positive");
  if (modarith::gcd(m, n) != 1) throw std::invalid_argument("psi needs gcd(m, n) = 1");
  return SoficApprox::lazy(m, n, [n](const BsElement& g) { return psi_image(g, n); },
                           "psi(n=" + std::to_string(n) + ",m=" + std::to_string(m) + ")");
}

SoficApprox cyclic_model(std::size_t n, std::uint64_t m) {
  if (n == 0) throw std::invalid_argument("degree must be positive");
  return SoficApprox::lazy(
      m, n,
      [n](const BsElement& g) {
        if (g.dilation() != 0 || g.denominator_exponent() != 0) {
          throw std::domain_error("cyclic model is defined on <a_2> only");
        }
        std::uint64_t shift = modarith::reduce(g.numerator(), n);
        std::vector<Permutation::Point> image(n);
        for (std::uint64_t x = 0; x < n; ++x) image[x] = static_cast<Permutation::Point>((x + n - shift) % n);
        return Permutation(std::move(image));
      },
      "cyclic(n=" + std::to_string(n) + ")");
}

Permutation eval_word(const SoficApprox& phi, const Word& w) {
  Permutation result = Permutation::identity(phi.degree());
  for (const Letter& l : w.letters()) {
    Permutation image;
    if (phi.key_kind() == KeyKind::Element) {
      BsElement gen = l.generator == kA1   ? BsElement::a1(phi.base())
                      : l.generator == kA2 ? BsElement::a2(phi.base())
                                           : throw std::out_of_range("generator outside BS(1,m)");
      if (l.exponent < 0 && phi.defined_at(gen.inverse())) {
        image = power(phi.at(gen.inverse()), -l.exponent);
      } else if (phi.defined_at(gen)) {
        image = power(phi.at(gen), l.exponent);
      } else {
        throw std::out_of_range("missing generator image for " + gen.to_string());
      }
    } else {
      Word gen = Word::letter(l.generator, 1);
      Word gen_inv = Word::letter(l.generator, -1);
      if (l.exponent < 0 && phi.defined_at(gen_inv)) {
        image = power(phi.at(gen_inv), -l.exponent);
      } else if (phi.defined_at(gen)) {
        image = power(phi.at(gen), l.exponent);
      } else {
        throw std::out_of_range("missing generator image for generator " + std::to_string(l.generator));
      }
    }
    result = compose(result, image);
  }
  return result;
}

Permutation amplify_permutation(const Permutation& p, std::size_t target_n) {
  const std::size_t k = p.degree();
  if (target_n < k) throw std::invalid_argument("amplification target below the current degree");
  const std::size_t r = target_n / k;
  std::vector<Permutation::Point> image(target_n);
  for (std::size_t block = 0; block < r; ++block) {
    for (std::size_t i = 0; i < k; ++i) {
      image[block * k + i] = static_cast<Permutation::Point>(block * k + p(static_cast<Permutation::Point>(i)));
    }
  }
  for (std::size_t i = r * k; i < target_n; ++i) image[i] = static_cast<Permutation::Point>(i);
  return Permutation(std::move(image));
}

SoficApprox amplify(const SoficApprox& phi, std::size_t target_n) {
  if (target_n < phi.degree()) throw std::invalid_argument("amplification target below the current degree");
  return phi.transformed([target_n](const Permutation& p) { return amplify_permutation(p, target_n); }, target_n,
                         "amplified(" + phi.description() + "->" + std::to_string(target_n) + ")");
}

AffineFixedPoints affine_fixed_points(const Word& w, std::uint64_t m, std::size_t n) {
  if (modarith::gcd(m, n) != 1) throw std::invalid_argument("affine analysis needs gcd(m, n) = 1");
  BsElement g = evaluate_bs(w, m);
  // psi(g)(x) = m^e x - num m^{-d}
  std::uint64_t shift = modarith::mul_mod(modarith::reduce(g.numerator(), n),
                                          modarith::pow_mod_signed(m, -g.denominator_exponent(), n), n);
  AffineFixedPoints out;
  out.dilation = g.dilation();
  out.translation = (n - shift) % n;
  std::uint64_t slope = (modarith::pow_mod_signed(m, g.dilation(), n) + n - 1) % n;
  std::uint64_t rhs = shift;  // -b
  std::uint64_t gcd = modarith::gcd(slope, n);  // gcd(0, n) = n
  out.predicted = rhs % gcd == 0 ? gcd : 0;
  return out;
}

std::vector<BsElement> bs_ball(std::uint64_t m, std::int64_t max_e, std::int64_t max_d, std::int64_t max_num) {
  std::vector<BsElement> out;
  for (std::int64_t e = -max_e; e <= max_e; ++e) {
    for (std::int64_t d = 0; d <= max_d; ++d) {
      for (std::int64_t num = -max_num; num <= max_num; ++num) {
        if (d > 0 && num % static_cast<std::int64_t>(m) == 0) continue;
        if (num == 0 && d > 0) continue;
        out.emplace_back(m, e, BigInt(num), d);
      }
    }
  }
  return out;
}

SoficApprox build_model(const ModelSpec& spec) {
  SoficApprox base;
  if (spec.kind == "psi") {
    base = arithmetic_bs_approx(spec.base_degree, spec.m);
  } else if (spec.kind == "cyclic") {
    base = cyclic_model(spec.base_degree, spec.m);
  } else {
    throw std::invalid_argument("unknown model kind '" + spec.kind + "'");
  }
  if (spec.degree == 0 || spec.degree == spec.base_degree) return base;
  return amplify(base, spec.degree);
}

nlohmann::json to_json(const ModelSpec& spec) {
  return {{"kind", spec.kind}, {"base_degree", spec.base_degree}, {"m", spec.m}, {"degree", spec.degree}};
}

ModelSpec model_spec_from_json(const nlohmann::json& j) {
  ModelSpec spec;
  spec.kind = j.at("kind").get<std::string>();
  spec.base_degree = j.at("base_degree").get<std::size_t>();
  spec.m = j.at("m").get<std::uint64_t>();
  spec.degree = j.value("degree", spec.base_degree);
  return spec;
}

nlohmann::json to_json(const SoficApprox& phi) {
  nlohmann::json entries = nlohmann::json::array();
  if (phi.key_kind() == KeyKind::Element) {
    for (const BsElement& g : phi.element_domain()) {
      Permutation p = phi.at(g);
      entries.push_back({{"key", to_json(g)}, {"image", std::vector<Permutation::Point>(p.image().begin(), p.image().end())}});
    }
    return {{"degree", phi.degree()}, {"key_kind", "element"}, {"m", phi.base()}, {"entries", entries}};
  }
  for (const Word& w : phi.word_domain()) {
    Permutation p = phi.at(w);
    entries.push_back({{"key", to_json(w)}, {"image", std::vector<Permutation::Point>(p.image().begin(), p.image().end())}});
  }
  return {{"degree", phi.degree()}, {"key_kind", "word"}, {"entries", entries}};
}

SoficApprox sofic_approx_from_json(const nlohmann::json& j) {
  auto degree = j.at("degree").get<std::size_t>();
  auto kind = j.at("key_kind").get<std::string>();
  auto read_image = [degree](const nlohmann::json& e) {
    auto image = e.at("image").get<std::vector<Permutation::Point>>();
    if (image.size() != degree) throw std::invalid_argument("image array length differs from degree");
    return Permutation(std::move(image));
  };
  if (kind == "element") {
    auto m = j.at("m").get<std::uint64_t>();
    std::vector<std::pair<BsElement, Permutation>> entries;
    for (const auto& e : j.at("entries")) entries.emplace_back(bs_element_from_json(e.at("key"), m), read_image(e));
    return SoficApprox::tabulated(m, degree, std::move(entries));
  }
  if (kind == "word") {
    std::vector<std::pair<Word, Permutation>> entries;
    for (const auto& e : j.at("entries")) entries.emplace_back(word_from_json(e.at("key")), read_image(e));
    return SoficApprox::tabulated_words(degree, std::move(entries));
  }
  throw std::invalid_argument("unknown key_kind '" + kind + "'");
}

}  // namespace sofic
