#include "sofic/perm.hpp"

#include <stdexcept>
#include <string>

namespace sofic {

namespace {

void require_same_degree(const Permutation& p, const Permutation& q) {
  if (p.degree() != q.degree()) {
    throw std::invalid_argument("degree mismatch: " + std::to_string(p.degree()) + " vs " +
                                std::to_string(q.degree()));
  }
}

}  // namespace

HammingValue::HammingValue(std::size_t numerator, std::size_t degree)
    : numerator_(numerator), degree_(degree) {
  if (degree == 0) throw std::invalid_argument("Hamming value over empty degree");
  if (numerator > degree) throw std::invalid_argument("Hamming numerator exceeds degree");
}

std::strong_ordering operator<=>(const HammingValue& a, const HammingValue& b) {
  // Cross-multiplication stays exact: both factors are at most 2^32-ish degrees.
  auto lhs = static_cast<unsigned __int128>(a.numerator_) * b.degree_;
  auto rhs = static_cast<unsigned __int128>(b.numerator_) * a.degree_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Permutation::Permutation(std::vector<Point> image) : image_(std::move(image)) {
  std::vector<bool> seen(image_.size(), false);
  for (Point v : image_) {
    if (v >= image_.size() || seen[v]) throw std::invalid_argument("image array is not a bijection");
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  Permutation p;
  p.image_.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.image_[i] = static_cast<Point>(i);
  return p;
}

Permutation Permutation::from_cycles(std::size_t n, const std::vector<std::vector<Point>>& cycles) {
  std::vector<Point> image(n);
  for (std::size_t i = 0; i < n; ++i) image[i] = static_cast<Point>(i);
  std::vector<bool> used(n, false);
  for (const auto& cycle : cycles) {
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      Point from = cycle[i];
      if (from >= n || used[from]) throw std::invalid_argument("cycles are not disjoint or out of range");
      used[from] = true;
      image[from] = cycle[(i + 1) % cycle.size()];
    }
  }
  return Permutation(std::move(image));
}

Permutation Permutation::inverse() const {
  Permutation inv;
  inv.image_.resize(image_.size());
  for (std::size_t i = 0; i < image_.size(); ++i) inv.image_[image_[i]] = static_cast<Point>(i);
  return inv;
}

bool Permutation::is_identity() const { return fixed_points() == image_.size(); }

std::size_t Permutation::fixed_points() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < image_.size(); ++i) count += image_[i] == i;
  return count;
}

std::vector<std::size_t> Permutation::cycle_lengths() const {
  std::vector<std::size_t> lengths;
  std::vector<bool> seen(image_.size(), false);
  for (std::size_t start = 0; start < image_.size(); ++start) {
    if (seen[start]) continue;
    std::size_t len = 0;
    for (Point x = static_cast<Point>(start); !seen[x]; x = image_[x]) {
      seen[x] = true;
      ++len;
    }
    lengths.push_back(len);
  }
  return lengths;
}

Permutation compose(const Permutation& p, const Permutation& q) {
  require_same_degree(p, q);
  std::vector<Permutation::Point> image(p.degree());
  for (std::size_t i = 0; i < image.size(); ++i) image[i] = p(q(static_cast<Permutation::Point>(i)));
  return Permutation(std::move(image));
}

Permutation inverse(const Permutation& p) { return p.inverse(); }

Permutation power(const Permutation& p, std::int64_t k) {
  Permutation base = k < 0 ? p.inverse() : p;
  auto e = static_cast<std::uint64_t>(k < 0 ? -k : k);
  Permutation result = Permutation::identity(p.degree());
  while (e > 0) {
    if (e & 1) result = compose(base, result);
    base = compose(base, base);
    e >>= 1;
  }
  return result;
}

HammingValue hamming(const Permutation& p, const Permutation& q) {
  require_same_degree(p, q);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < p.degree(); ++i) {
    auto x = static_cast<Permutation::Point>(i);
    differ += p(x) != q(x);
  }
  return HammingValue(differ, p.degree());
}

HammingValue hamming_to_identity(const Permutation& p) {
  return HammingValue(p.degree() - p.fixed_points(), p.degree());
}

std::size_t periodic_points(const Permutation& p, std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("period must be positive");
  std::size_t count = 0;
  for (std::size_t len : p.cycle_lengths()) {
    if (k % len == 0) count += len;
  }
  return count;
}

}  // namespace sofic
