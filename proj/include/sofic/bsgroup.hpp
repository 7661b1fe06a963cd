#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sofic/numeric.hpp"

namespace sofic {

/// Element of BS(1,m) = <a_1, a_2 | a_1^{-1} a_2 a_1 = a_2^m>, stored as the
/// affine map x -> m^e x + num / m^d over Z[1/m]. a_1 is x -> x/m and a_2 is
/// x -> x + 1; products compose as (g*h)(x) = g(h(x)).
class BsElement {
 public:
  /// Normalizes so that d = 0 or m does not divide num.
  BsElement(std::uint64_t m, std::int64_t e, BigInt num, std::int64_t d);

  static BsElement identity(std::uint64_t m) { return {m, 0, 0, 0}; }
  static BsElement a1(std::uint64_t m) { return {m, -1, 0, 0}; }
  static BsElement a2(std::uint64_t m) { return {m, 0, 1, 0}; }

  std::uint64_t base() const { return m_; }
  std::int64_t dilation() const { return e_; }
  const BigInt& numerator() const { return num_; }
  std::int64_t denominator_exponent() const { return d_; }

  bool is_identity() const { return e_ == 0 && num_ == 0; }

  BsElement inverse() const;

  friend bool operator==(const BsElement&, const BsElement&) = default;
  /// Total order (e, d, num) used for deterministic iteration.
  friend bool operator<(const BsElement& a, const BsElement& b);

  std::string to_string() const;

 private:
  std::uint64_t m_;
  std::int64_t e_;
  BigInt num_;
  std::int64_t d_;
};

BsElement bs_op(const BsElement& a, const BsElement& b);
inline BsElement operator*(const BsElement& a, const BsElement& b) { return bs_op(a, b); }
BsElement bs_pow(const BsElement& g, std::int64_t k);

struct BsElementHash {
  std::size_t operator()(const BsElement& g) const;
};

/// One letter gen^exp of a freely reduced word.
struct Letter {
  int generator;
  std::int64_t exponent;
  friend bool operator==(const Letter&, const Letter&) = default;
  friend auto operator<=>(const Letter&, const Letter&) = default;
};

/// Freely reduced word: adjacent letters carry distinct generators and
/// exponents are non-zero.
class Word {
 public:
  Word() = default;
  /// Freely reduces the given letters.
  explicit Word(const std::vector<Letter>& letters);

  static Word letter(int generator, std::int64_t exponent = 1) { return Word({{generator, exponent}}); }

  const std::vector<Letter>& letters() const { return letters_; }
  bool empty() const { return letters_.empty(); }
  std::int64_t length() const;

  Word inverse() const;

  friend Word operator*(const Word& a, const Word& b);
  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;

  std::string to_string(const std::vector<std::string>& names = {}) const;

 private:
  std::vector<Letter> letters_;
};

/// Generator ids used by the built-in BS(1,m) words.
inline constexpr int kA1 = 0;
inline constexpr int kA2 = 1;

/// a_1^{d} a_2^{num} a_1^{-e-d}; throws std::overflow_error if num does not
/// fit a 64-bit exponent.
Word canonical_word(const BsElement& g);

/// Evaluates a word over generators {a_1 = 0, a_2 = 1} in the affine representation.
BsElement evaluate_bs(const Word& w, std::uint64_t m);

struct Presentation {
  std::vector<std::string> generators;
  std::vector<Word> relators;

  static Presentation baumslag_solitar(std::uint64_t m);
  /// H_{n,m}: a_i^{-1} a_{i+1} a_i = a_{i+1}^m cyclically.
  static Presentation higman(unsigned n, std::uint64_t m);
  /// (Z/4Z) x| H_{4,m}: t a_i t^{-1} = a_{i+1}, t^4 = e, plus the H_{4,m} relators.
  static Presentation higman_semidirect(std::uint64_t m);

  /// Checks every relator is non-empty and freely reduced over known generators.
  void validate() const;
};

nlohmann::json to_json(const Word& w);
Word word_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Presentation& p);
Presentation presentation_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BsElement& g);
BsElement bs_element_from_json(const nlohmann::json& j, std::uint64_t m);

/// Default element budget for Folner-set construction.
inline constexpr std::uint64_t kDefaultFolnerBudget = 10'000'000;

/// {a_1^i a_2^l : 0 <= i < 2j, 0 <= l < 2 M m^{2j}} in normal form.
std::vector<BsElement> folner_set(unsigned j, std::uint64_t M, std::uint64_t m,
                                  std::uint64_t budget = kDefaultFolnerBudget);

/// {a_1^i a_2^l : 0 <= i < rows, 0 <= l < cols}; the building block of folner_set
/// with free row and column counts.
std::vector<BsElement> box_set(std::uint64_t rows, std::uint64_t cols, std::uint64_t m,
                               std::uint64_t budget = kDefaultFolnerBudget);

struct FolnerReport {
  Rational boundary_ratio;      // |sF Δ F| / |F|
  Rational nesting_ratio;       // |(F_prev^{-1} F) \ F| / |F|
  Rational boundary_threshold;  // 1/j
  Rational nesting_threshold;   // eta
  bool boundary_ok;
  bool nesting_ok;
};

FolnerReport folner_diagnostics(const std::vector<BsElement>& previous, const std::vector<BsElement>& current,
                                const BsElement& s, unsigned j, const Rational& eta);

/// |sF Δ F| for a single translating element.
std::size_t symmetric_difference_size(const std::vector<BsElement>& set, const BsElement& s);

}  // namespace sofic
