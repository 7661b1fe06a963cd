#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sofic/bsgroup.hpp"
#include "sofic/perm.hpp"

namespace sofic {

enum class KeyKind { Element, Word };

/// A finite partial map from group elements (or words) to permutations of a
/// common degree. Either tabulated, or synthesized lazily on demand for
/// homomorphism-by-construction models; lazily built images are memoized
/// behind an internal lock, so a shared instance stays read-only to callers.
class SoficApprox {
 public:
  using Synthesizer = std::function<Permutation(const BsElement&)>;

  static SoficApprox tabulated(std::uint64_t m, std::size_t degree,
                               std::vector<std::pair<BsElement, Permutation>> entries);
  static SoficApprox tabulated_words(std::size_t degree, std::vector<std::pair<Word, Permutation>> entries);
  /// synth must be pure; it may throw std::domain_error for elements it cannot represent.
  static SoficApprox lazy(std::uint64_t m, std::size_t degree, Synthesizer synth, std::string description);

  std::size_t degree() const { return degree_; }
  KeyKind key_kind() const { return kind_; }
  std::uint64_t base() const { return m_; }
  bool is_lazy() const { return static_cast<bool>(synth_); }
  const std::string& description() const { return description_; }

  bool defined_at(const BsElement& g) const;
  bool defined_at(const Word& w) const;
  /// Throws std::out_of_range when the key has no image.
  Permutation at(const BsElement& g) const;
  Permutation at(const Word& w) const;

  /// The declared key set S.
  const std::vector<BsElement>& element_domain() const { return element_domain_; }
  const std::vector<Word>& word_domain() const { return word_domain_; }

  /// Same map with S replaced; lazy models accept any S they can synthesize.
  SoficApprox with_domain(std::vector<BsElement> domain) const;

  /// Applies f to every image; the result keeps the key set and laziness.
  SoficApprox transformed(const std::function<Permutation(const Permutation&)>& f, std::size_t new_degree,
                          std::string description) const;

 private:
  struct Cache;

  std::size_t degree_ = 0;
  KeyKind kind_ = KeyKind::Element;
  std::uint64_t m_ = 2;
  std::string description_;
  std::unordered_map<BsElement, Permutation, BsElementHash> elements_;
  std::map<Word, Permutation> words_;
  std::vector<BsElement> element_domain_;
  std::vector<Word> word_domain_;
  Synthesizer synth_;
  std::shared_ptr<Cache> cache_;
};

struct SoficReport {
  bool vacuous = false;  // no triple (g, h, gh) inside S
  std::optional<HammingValue> max_defect;
  std::optional<std::pair<std::string, std::string>> defect_witness;
  std::optional<HammingValue> min_displacement;
  std::optional<std::string> displacement_witness;
  std::size_t triples_checked = 0;
  bool multiplicative_ok = true;
  bool displacement_ok = true;
  bool pass() const { return multiplicative_ok && displacement_ok; }
};

/// Checks the two soficity conditions on the declared domain: defect < delta
/// on all triples and displacement > 1 - delta on non-identity keys.
SoficReport check_sofic(const SoficApprox& phi, const Rational& delta);

/// x -> m^{e} x - num m^{-d} (mod n): the arithmetic model of BS(1,m) on Z/nZ,
/// with psi(a_2) = x - 1 and psi(a_1) = m^{-1} x.
SoficApprox arithmetic_bs_approx(std::size_t n, std::uint64_t m);

/// The Z model: translations a_2^l -> (x -> x - l mod n); undefined off <a_2>.
SoficApprox cyclic_model(std::size_t n, std::uint64_t m = 2);

/// The image of psi for a single element, without building an approximation.
Permutation psi_image(const BsElement& g, std::size_t n);

/// Left-to-right composition of generator images under (g*h)(x) = g(h(x)).
Permutation eval_word(const SoficApprox& phi, const Word& w);

/// r = floor(target_n / n) disjoint copies of each image, identity on the tail.
SoficApprox amplify(const SoficApprox& phi, std::size_t target_n);
Permutation amplify_permutation(const Permutation& p, std::size_t target_n);

struct AffineFixedPoints {
  std::int64_t dilation;      // a in P(x) = m^a x + b
  std::uint64_t translation;  // b mod n
  std::uint64_t predicted;    // solutions of (m^a - 1) x = -b mod n
};

AffineFixedPoints affine_fixed_points(const Word& w, std::uint64_t m, std::size_t n);

/// All normalized elements with |e| <= max_e, 0 <= d <= max_d, |num| <= max_num.
std::vector<BsElement> bs_ball(std::uint64_t m, std::int64_t max_e, std::int64_t max_d, std::int64_t max_num);

/// Recipe for the built-in models, so certificates can be replayed without
/// shipping permutation tables.
struct ModelSpec {
  std::string kind = "psi";  // "psi" or "cyclic"
  std::size_t base_degree = 0;
  std::uint64_t m = 2;
  std::size_t degree = 0;  // after amplification; equals base_degree when none
};

SoficApprox build_model(const ModelSpec& spec);
nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SoficApprox& phi);
SoficApprox sofic_approx_from_json(const nlohmann::json& j);

}  // namespace sofic
