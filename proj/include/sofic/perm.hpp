#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "sofic/numeric.hpp"

namespace sofic {

/// Normalized Hamming distance kept as an exact fraction numerator / degree.
class HammingValue {
 public:
  HammingValue(std::size_t numerator, std::size_t degree);

  std::size_t numerator() const { return numerator_; }
  std::size_t degree() const { return degree_; }
  Rational value() const { return Rational(numerator_, degree_); }
  double to_double() const { return static_cast<double>(numerator_) / static_cast<double>(degree_); }

  friend bool operator==(const HammingValue& a, const HammingValue& b) { return a.value() == b.value(); }
  friend std::strong_ordering operator<=>(const HammingValue& a, const HammingValue& b);

 private:
  std::size_t numerator_;
  std::size_t degree_;
};

/// A bijection of {0, ..., n-1}, stored as its image array.
class Permutation {
 public:
  using Point = std::uint32_t;

  Permutation() = default;
  /// Validates that image is a bijection; throws std::invalid_argument otherwise.
  explicit Permutation(std::vector<Point> image);

  static Permutation identity(std::size_t n);
  /// Builds the permutation from a list of disjoint cycles on {0..n-1}.
  static Permutation from_cycles(std::size_t n, const std::vector<std::vector<Point>>& cycles);

  std::size_t degree() const { return image_.size(); }
  Point operator()(Point x) const { return image_[x]; }
  std::span<const Point> image() const { return image_; }

  Permutation inverse() const;
  bool is_identity() const;
  std::size_t fixed_points() const;

  /// Cycle lengths in order of smallest cycle representative.
  std::vector<std::size_t> cycle_lengths() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<Point> image_;
};

/// (p * q)(i) = p(q(i)).
Permutation compose(const Permutation& p, const Permutation& q);
Permutation inverse(const Permutation& p);
Permutation power(const Permutation& p, std::int64_t k);

HammingValue hamming(const Permutation& p, const Permutation& q);
HammingValue hamming_to_identity(const Permutation& p);

/// |{i : p^k(i) = i}| via the cycle decomposition.
std::size_t periodic_points(const Permutation& p, std::uint64_t k);

}  // namespace sofic
