#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace sofic {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q", "p", or a finite decimal such as "0.25" into an exact rational.
Rational parse_rational(const std::string& text);

std::string to_string(const Rational& q);

double to_double(const Rational& q);

/// Natural log of a positive rational, accurate for numerators and
/// denominators far beyond double range.
double log_of(const Rational& q);
double log_of(const BigInt& z);

/// Fixed 10-digit decimal rendering used in every CSV artifact.
std::string format_fixed10(double value);

namespace modarith {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t n);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t n);
std::uint64_t gcd(std::uint64_t a, std::uint64_t b);

/// Inverse of a modulo n; throws std::domain_error when gcd(a, n) != 1.
std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t n);

/// Reduces a signed value into [0, n).
std::uint64_t reduce(std::int64_t a, std::uint64_t n);
std::uint64_t reduce(const BigInt& a, std::uint64_t n);

/// m^e mod n for signed e (negative exponents use the inverse of m).
std::uint64_t pow_mod_signed(std::uint64_t m, std::int64_t e, std::uint64_t n);

/// Multiplicative order of m modulo n (gcd(m, n) = 1, n >= 2).
std::uint64_t multiplicative_order(std::uint64_t m, std::uint64_t n);

bool is_prime(std::uint64_t n);

/// Returns (p, r) with n = p^r, or (0, 0) when n is not a prime power.
std::pair<std::uint64_t, unsigned> prime_power(std::uint64_t n);

}  // namespace modarith
}  // namespace sofic
