#pragma once

// Exact integer number theory: quadratic symbols, sieves, multiplicative
// functions, fundamental discriminants and the twist family.
//
// Everything here works on 64-bit integers with 128-bit intermediates.

#include <cstdint>
#include <utility>
#include <vector>

namespace twist::arith {

using i64 = std::int64_t;
using u64 = std::uint64_t;

i64 gcd(i64 a, i64 b);
u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 base, u64 exp, u64 m);

/// Kronecker symbol (a/n) for arbitrary integers, with (a/0) = 1 iff a = ±1.
int kronecker(i64 a, i64 n);

/// Jacobi symbol (a/n) for odd n > 0.
int jacobi(i64 a, i64 n);

bool is_prime(i64 n);
bool is_perfect_square(i64 n);
bool is_squarefree(i64 n);

/// Trial-division factorization of |n| as (prime, exponent) pairs, ascending.
std::vector<std::pair<i64, int>> factorize(i64 n);

/// p-adic valuation of n != 0.
int valuation(i64 n, i64 p);

/// Smallest-prime-factor sieve with Möbius, divisor-count and von Mangoldt
/// tables. Immutable after construction.
class SieveTables {
public:
    explicit SieveTables(std::uint32_t limit);

    std::uint32_t limit() const noexcept { return limit_; }
    std::uint32_t spf(std::uint32_t n) const { return spf_[n]; }
    int mobius(std::uint32_t n) const { return mu_[n]; }
    std::uint32_t tau(std::uint32_t n) const { return tau_[n]; }
    double von_mangoldt(std::uint32_t n) const;
    bool is_squarefree(std::uint32_t n) const { return mu_[n] != 0; }
    bool is_prime(std::uint32_t n) const { return n >= 2 && spf_[n] == n; }
    const std::vector<std::uint32_t>& primes() const noexcept { return primes_; }

    /// If n = p^e for a prime p, returns p; otherwise 0.
    std::uint32_t prime_power_base(std::uint32_t n) const;

private:
    std::uint32_t limit_;
    std::vector<std::uint32_t> spf_;
    std::vector<std::int8_t> mu_;
    std::vector<std::uint32_t> tau_;
    std::vector<std::uint32_t> primes_;
};

/// Discriminant of a quadratic field (1 is accepted as the trivial one).
bool is_fundamental_discriminant(i64 d);

/// The fundamental discriminant attached to a nonzero squarefree integer:
/// l if l ≡ 1 (mod 4), else 4l.
i64 m_of(i64 l1);

struct TwistEntry {
    i64 d;       // odd squarefree, positive
    i64 disc;    // 8d
    int chi_q1;  // χ_{8d}(q1)
    int chi_q2;  // χ_{8d}(q2)
};

struct TwistFamily {
    double X = 0;
    i64 q1 = 1;
    i64 q2 = 1;
    std::vector<i64> excluded_primes;  // primes dividing 2 q1 q2
    std::vector<TwistEntry> entries;   // ascending in d
};

/// Odd squarefree d, coprime to q1 q2, with X/2 <= 8d <= 2X.
TwistFamily enumerate_twists(double X, i64 q1, i64 q2);

}  // namespace twist::arith
