#include "sofic/numeric.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace sofic {

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational");
  auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      BigInt num(text.substr(0, slash));
      BigInt den(text.substr(slash + 1));
      if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
      return Rational(num, den);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(BigInt(text));
    std::string whole = text.substr(0, dot);
    std::string frac = text.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (negative || (!whole.empty() && whole[0] == '+')) whole = whole.substr(1);
    if (whole.empty()) whole = "0";
    BigInt den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    BigInt num = BigInt(whole) * den + (frac.empty() ? BigInt(0) : BigInt(frac));
    Rational q(num, den);
    return negative ? Rational(-q) : q;
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("not a rational number: '" + text + "'");
  }
}

std::string to_string(const Rational& q) {
  auto num = boost::multiprecision::numerator(q);
  auto den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double log_of(const BigInt& z) {
  if (z <= 0) throw std::domain_error("log of non-positive integer");
  unsigned bits = boost::multiprecision::msb(z) + 1;
  if (bits <= 60) return std::log(static_cast<double>(z.convert_to<std::uint64_t>()));
  unsigned shift = bits - 60;
  BigInt top = z >> shift;
  return std::log(static_cast<double>(top.convert_to<std::uint64_t>())) + shift * std::log(2.0);
}

double log_of(const Rational& q) {
  return log_of(BigInt(boost::multiprecision::numerator(q))) -
         log_of(BigInt(boost::multiprecision::denominator(q)));
}

double to_double(const Rational& q) {
  if (q == 0) return 0.0;
  double mag = std::exp(log_of(q < 0 ? Rational(-q) : q));
  return q < 0 ? -mag : mag;
}

std::string format_fixed10(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10f", value);
  return buf;
}

namespace modarith {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t n) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % n);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t n) {
  if (n == 1) return 0;
  std::uint64_t result = 1;
  base %= n;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, n);
    base = mul_mod(base, base, n);
    exp >>= 1;
  }
  return result;
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    a %= b;
    std::swap(a, b);
  }
  return a;
}

std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t n) {
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = static_cast<std::int64_t>(n), new_r = static_cast<std::int64_t>(a % n);
  while (new_r != 0) {
    std::int64_t q = r / new_r;
    std::tie(t, new_t) = std::make_pair(new_t, t - q * new_t);
    std::tie(r, new_r) = std::make_pair(new_r, r - q * new_r);
  }
  if (r != 1) throw std::domain_error("value is not invertible modulo " + std::to_string(n));
  return reduce(t, n);
}

std::uint64_t reduce(std::int64_t a, std::uint64_t n) {
  auto sn = static_cast<std::int64_t>(n);
  std::int64_t r = a % sn;
  return static_cast<std::uint64_t>(r < 0 ? r + sn : r);
}

std::uint64_t reduce(const BigInt& a, std::uint64_t n) {
  BigInt r = a % n;
  if (r < 0) r += n;
  return r.convert_to<std::uint64_t>();
}

std::uint64_t pow_mod_signed(std::uint64_t m, std::int64_t e, std::uint64_t n) {
  if (e >= 0) return pow_mod(m, static_cast<std::uint64_t>(e), n);
  return pow_mod(inverse_mod(m, n), static_cast<std::uint64_t>(-e), n);
}

std::uint64_t multiplicative_order(std::uint64_t m, std::uint64_t n) {
  if (n < 2 || gcd(m % n, n) != 1) throw std::domain_error("order undefined: gcd(m, n) != 1");
  std::uint64_t x = m % n;
  std::uint64_t k = 1;
  while (x != 1) {
    x = mul_mod(x, m, n);
    ++k;
  }
  return k;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic Miller-Rabin bases for 64-bit inputs.
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < s; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::pair<std::uint64_t, unsigned> prime_power(std::uint64_t n) {
  if (n < 2) return {0, 0};
  std::uint64_t p = 0;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      p = d;
      break;
    }
  }
  if (p == 0) return {n, 1};
  unsigned r = 0;
  while (n % p == 0) {
    n /= p;
    ++r;
  }
  if (n != 1) return {0, 0};
  return {p, r};
}

}  // namespace modarith
}  // namespace sofic
