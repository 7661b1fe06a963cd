#include "sofic/bsgroup.hpp"

#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace sofic {

namespace {

BigInt big_pow(std::uint64_t m, std::int64_t k) {
  BigInt r = 1;
  BigInt b = m;
  for (; k > 0; --k) r *= b;
  return r;
}

void require_same_base(const BsElement& a, const BsElement& b) {
  if (a.base() != b.base()) {
    throw std::invalid_argument("BS base mismatch: " + std::to_string(a.base()) + " vs " +
                                std::to_string(b.base()));
  }
}

}  // namespace

BsElement::BsElement(std::uint64_t m, std::int64_t e, BigInt num, std::int64_t d)
    : m_(m), e_(e), num_(std::move(num)), d_(d) {
  if (m < 2) throw std::invalid_argument("BS(1,m) requires m >= 2");
  if (d_ < 0) {
    num_ *= big_pow(m_, -d_);
    d_ = 0;
  }
  if (num_ == 0) {
    d_ = 0;
    return;
  }
  while (d_ > 0 && num_ % m_ == 0) {
    num_ /= m_;
    --d_;
  }
}

BsElement BsElement::inverse() const {
  // x -> m^{-e} x - m^{-e} num / m^d
  BigInt num = -num_;
  std::int64_t d = d_;
  if (e_ < 0) {
    num *= big_pow(m_, -e_);
  } else {
    d += e_;
  }
  return BsElement(m_, -e_, std::move(num), d);
}

bool operator<(const BsElement& a, const BsElement& b) {
  if (a.m_ != b.m_) return a.m_ < b.m_;
  if (a.e_ != b.e_) return a.e_ < b.e_;
  if (a.d_ != b.d_) return a.d_ < b.d_;
  return a.num_ < b.num_;
}

std::string BsElement::to_string() const {
  std::ostringstream os;
  os << "(e=" << e_ << ", num=" << num_ << ", d=" << d_ << ")";
  return os.str();
}

BsElement bs_op(const BsElement& a, const BsElement& b) {
  require_same_base(a, b);
  const std::uint64_t m = a.base();
  // a(b(x)) = m^{ea+eb} x + m^{ea} nb / m^{db} + na / m^{da}
  BigInt tail_num = b.numerator();
  std::int64_t tail_d = b.denominator_exponent();
  if (a.dilation() >= 0) {
    tail_num *= big_pow(m, a.dilation());
  } else {
    tail_d -= a.dilation();
  }
  std::int64_t d = std::max(tail_d, a.denominator_exponent());
  BigInt num = tail_num * big_pow(m, d - tail_d) + a.numerator() * big_pow(m, d - a.denominator_exponent());
  return BsElement(m, a.dilation() + b.dilation(), std::move(num), d);
}

BsElement bs_pow(const BsElement& g, std::int64_t k) {
  BsElement base = k < 0 ? g.inverse() : g;
  auto e = static_cast<std::uint64_t>(k < 0 ? -k : k);
  BsElement result = BsElement::identity(g.base());
  while (e > 0) {
    if (e & 1) result = bs_op(result, base);
    base = bs_op(base, base);
    e >>= 1;
  }
  return result;
}

std::size_t BsElementHash::operator()(const BsElement& g) const {
  std::size_t h = std::hash<std::int64_t>{}(g.dilation());
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  mix(std::hash<std::int64_t>{}(g.denominator_exponent()));
  mix(std::hash<std::uint64_t>{}(g.base()));
  const BigInt& num = g.numerator();
  if (num >= std::numeric_limits<std::int64_t>::min() && num <= std::numeric_limits<std::int64_t>::max()) {
    mix(std::hash<std::int64_t>{}(num.convert_to<std::int64_t>()));
  } else {
    mix(std::hash<std::string>{}(num.str()));
  }
  return h;
}

Word::Word(const std::vector<Letter>& letters) {
  for (const Letter& l : letters) {
    if (l.exponent == 0) continue;
    if (!letters_.empty() && letters_.back().generator == l.generator) {
      letters_.back().exponent += l.exponent;
      if (letters_.back().exponent == 0) letters_.pop_back();
    } else {
      letters_.push_back(l);
    }
  }
}

std::int64_t Word::length() const {
  std::int64_t len = 0;
  for (const Letter& l : letters_) len += l.exponent < 0 ? -l.exponent : l.exponent;
  return len;
}

Word Word::inverse() const {
  std::vector<Letter> inv;
  inv.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) inv.push_back({it->generator, -it->exponent});
  return Word(inv);
}

Word operator*(const Word& a, const Word& b) {
  std::vector<Letter> all = a.letters_;
  all.insert(all.end(), b.letters_.begin(), b.letters_.end());
  return Word(all);
}

std::string Word::to_string(const std::vector<std::string>& names) const {
  if (letters_.empty()) return "e";
  std::ostringstream os;
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) os << ' ';
    const Letter& l = letters_[i];
    if (l.generator >= 0 && static_cast<std::size_t>(l.generator) < names.size()) {
      os << names[l.generator];
    } else {
      os << 'g' << l.generator;
    }
    if (l.exponent != 1) os << '^' << l.exponent;
  }
  return os.str();
}

Word canonical_word(const BsElement& g) {
  const BigInt& num = g.numerator();
  if (num > std::numeric_limits<std::int64_t>::max() || num < std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error("numerator too large for a word exponent");
  }
  std::int64_t d = g.denominator_exponent();
  return Word({{kA1, d}, {kA2, num.convert_to<std::int64_t>()}, {kA1, -g.dilation() - d}});
}

BsElement evaluate_bs(const Word& w, std::uint64_t m) {
  BsElement result = BsElement::identity(m);
  for (const Letter& l : w.letters()) {
    BsElement gen = l.generator == kA1   ? BsElement::a1(m)
                    : l.generator == kA2 ? BsElement::a2(m)
                                         : throw std::invalid_argument("word uses a generator outside BS(1,m)");
    result = bs_op(result, bs_pow(gen, l.exponent));
  }
  return result;
}

Presentation Presentation::baumslag_solitar(std::uint64_t m) {
  auto mm = static_cast<std::int64_t>(m);
  return {{"a1", "a2"}, {Word({{kA1, -1}, {kA2, 1}, {kA1, 1}, {kA2, -mm}})}};
}

Presentation Presentation::higman(unsigned n, std::uint64_t m) {
  if (n < 2) throw std::invalid_argument("H_{n,m} needs n >= 2");
  auto mm = static_cast<std::int64_t>(m);
  Presentation p;
  for (unsigned i = 0; i < n; ++i) p.generators.push_back("a" + std::to_string(i + 1));
  for (unsigned i = 0; i < n; ++i) {
    int a = static_cast<int>(i);
    int b = static_cast<int>((i + 1) % n);
    p.relators.push_back(Word({{a, -1}, {b, 1}, {a, 1}, {b, -mm}}));
  }
  return p;
}

Presentation Presentation::higman_semidirect(std::uint64_t m) {
  Presentation p = higman(4, m);
  const int t = 4;
  p.generators.push_back("t");
  p.relators.push_back(Word({{t, 4}}));
  for (int i = 0; i < 4; ++i) {
    p.relators.push_back(Word({{t, 1}, {i, 1}, {t, -1}, {(i + 1) % 4, -1}}));
  }
  return p;
}

void Presentation::validate() const {
  for (const Word& r : relators) {
    if (r.empty()) throw std::invalid_argument("empty relator");
    if (Word(r.letters()) != r) throw std::invalid_argument("relator not freely reduced");
    for (const Letter& l : r.letters()) {
      if (l.generator < 0 || static_cast<std::size_t>(l.generator) >= generators.size()) {
        throw std::invalid_argument("relator uses unknown generator " + std::to_string(l.generator));
      }
    }
  }
}

nlohmann::json to_json(const Word& w) {
  auto j = nlohmann::json::array();
  for (const Letter& l : w.letters()) j.push_back({l.generator, l.exponent});
  return j;
}

Word word_from_json(const nlohmann::json& j) {
  std::vector<Letter> letters;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2) throw std::invalid_argument("word letters must be [generator, exponent]");
    letters.push_back({pair[0].get<int>(), pair[1].get<std::int64_t>()});
    if (letters.back().exponent == 0) throw std::invalid_argument("word letter with zero exponent");
  }
  Word w(letters);
  if (w.letters() != letters) throw std::invalid_argument("word is not freely reduced");
  return w;
}

nlohmann::json to_json(const Presentation& p) {
  nlohmann::json rel = nlohmann::json::array();
  for (const Word& r : p.relators) rel.push_back(to_json(r));
  return {{"generators", p.generators}, {"relators", rel}};
}

Presentation presentation_from_json(const nlohmann::json& j) {
  Presentation p;
  p.generators = j.at("generators").get<std::vector<std::string>>();
  for (const auto& r : j.at("relators")) p.relators.push_back(word_from_json(r));
  p.validate();
  return p;
}

nlohmann::json to_json(const BsElement& g) {
  return {{"e", g.dilation()}, {"num", g.numerator().str()}, {"d", g.denominator_exponent()}};
}

BsElement bs_element_from_json(const nlohmann::json& j, std::uint64_t m) {
  const auto& num = j.at("num");
  BigInt value = num.is_string() ? BigInt(num.get<std::string>()) : BigInt(num.get<std::int64_t>());
  BsElement g(m, j.at("e").get<std::int64_t>(), value, j.at("d").get<std::int64_t>());
  if (g.denominator_exponent() != j.at("d").get<std::int64_t>() || g.numerator() != value) {
    throw std::invalid_argument("element key is not normalized: " + j.dump());
  }
  return g;
}

std::vector<BsElement> box_set(std::uint64_t rows, std::uint64_t cols, std::uint64_t m, std::uint64_t budget) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("box set needs positive extents");
  if (cols > budget / rows) throw std::length_error("Folner set exceeds the element budget");
  std::vector<BsElement> out;
  out.reserve(rows * cols);
  for (std::uint64_t i = 0; i < rows; ++i) {
    for (std::uint64_t l = 0; l < cols; ++l) {
      // a_1^i a_2^l = x -> m^{-i} (x + l)
      out.emplace_back(m, -static_cast<std::int64_t>(i), BigInt(l), static_cast<std::int64_t>(i));
    }
  }
  return out;
}

std::vector<BsElement> folner_set(unsigned j, std::uint64_t M, std::uint64_t m, std::uint64_t budget) {
  if (j == 0 || M == 0) throw std::invalid_argument("Folner index and M must be positive");
  BigInt cols = BigInt(2) * M;
  for (unsigned k = 0; k < 2 * j; ++k) cols *= m;
  if (cols * (2 * j) > budget) throw std::length_error("Folner set exceeds the element budget");
  return box_set(2 * j, cols.convert_to<std::uint64_t>(), m, budget);
}

std::size_t symmetric_difference_size(const std::vector<BsElement>& set, const BsElement& s) {
  std::unordered_set<BsElement, BsElementHash> base(set.begin(), set.end());
  std::unordered_set<BsElement, BsElementHash> shifted;
  for (const BsElement& g : set) shifted.insert(bs_op(s, g));
  std::size_t common = 0;
  for (const BsElement& g : shifted) common += base.count(g);
  return (base.size() - common) + (shifted.size() - common);
}

FolnerReport folner_diagnostics(const std::vector<BsElement>& previous, const std::vector<BsElement>& current,
                                const BsElement& s, unsigned j, const Rational& eta) {
  if (current.empty()) throw std::invalid_argument("Folner diagnostics on an empty set");
  if (j == 0) throw std::invalid_argument("Folner index must be positive");
  std::unordered_set<BsElement, BsElementHash> cur(current.begin(), current.end());
  const auto size = static_cast<std::int64_t>(cur.size());

  FolnerReport r;
  r.boundary_ratio = Rational(static_cast<std::int64_t>(symmetric_difference_size(current, s)), size);
  r.boundary_threshold = Rational(1, j);
  r.boundary_ok = r.boundary_ratio <= r.boundary_threshold;

  std::unordered_set<BsElement, BsElementHash> outside;
  for (const BsElement& g : previous) {
    BsElement ginv = g.inverse();
    for (const BsElement& h : current) {
      BsElement p = bs_op(ginv, h);
      if (!cur.count(p)) outside.insert(std::move(p));
    }
  }
  r.nesting_ratio = Rational(static_cast<std::int64_t>(outside.size()), size);
  r.nesting_threshold = eta;
  r.nesting_ok = r.nesting_ratio <= eta;
  return r;
}

}  // namespace sofic
