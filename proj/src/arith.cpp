#include "twist/arith.hpp"

#include <cmath>
#include <cstdlib>
#include <new>

#include "twist/errors.hpp"

namespace twist::arith {

i64 gcd(i64 a, i64 b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b != 0) {
        i64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

u64 mulmod(u64 a, u64 b, u64 m) {
    return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % m);
}

u64 powmod(u64 base, u64 exp, u64 m) {
    u64 result = 1 % m;
    base %= m;
    while (exp != 0) {
        if (exp & 1U) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1U;
    }
    return result;
}

namespace {
constexpr int kTab2[8] = {0, 1, 0, -1, 0, -1, 0, 1};
}

int kronecker(i64 a, i64 b) {
    if (b == 0) return (a == 1 || a == -1) ? 1 : 0;
    if ((a & 1) == 0 && (b & 1) == 0) return 0;

    int v = 0;
    while ((b & 1) == 0) {
        b /= 2;
        ++v;
    }
    int k = (v % 2 == 0) ? 1 : kTab2[a & 7];
    if (b < 0) {
        b = -b;
        if (a < 0) k = -k;
    }
    // b is odd and positive from here on.
    for (;;) {
        if (a == 0) return b > 1 ? 0 : k;
        v = 0;
        while ((a & 1) == 0) {
            a /= 2;
            ++v;
        }
        if (v % 2 == 1) k *= kTab2[b & 7];
        if (a & b & 2) k = -k;
        const i64 r = a < 0 ? -a : a;
        a = b % r;
        b = r;
    }
}

int jacobi(i64 a, i64 n) {
    if (n <= 0 || (n & 1) == 0) throw InvalidArgument("jacobi: modulus must be odd and positive");
    return kronecker(a, n);
}

bool is_prime(i64 n) {
    if (n < 2) return false;
    for (i64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    const u64 m = static_cast<u64>(n);
    u64 d = m - 1;
    int s = 0;
    while ((d & 1U) == 0) {
        d >>= 1U;
        ++s;
    }
    // Deterministic witness set for 64-bit inputs.
    for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
        a %= m;
        if (a == 0) continue;
        u64 x = powmod(a, d, m);
        if (x == 1 || x == m - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, m);
            if (x == m - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

bool is_perfect_square(i64 n) {
    if (n < 0) return false;
    auto r = static_cast<i64>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r * r == n;
}

std::vector<std::pair<i64, int>> factorize(i64 n) {
    std::vector<std::pair<i64, int>> out;
    u64 m = static_cast<u64>(n < 0 ? -n : n);
    if (m <= 1) return out;
    for (u64 p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
        if (m % p != 0) continue;
        int e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        out.emplace_back(static_cast<i64>(p), e);
    }
    if (m > 1) out.emplace_back(static_cast<i64>(m), 1);
    return out;
}

bool is_squarefree(i64 n) {
    if (n == 0) return false;
    for (const auto& [p, e] : factorize(n)) {
        if (e > 1) return false;
    }
    return true;
}

int valuation(i64 n, i64 p) {
    if (n == 0) throw InvalidArgument("valuation of zero");
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

SieveTables::SieveTables(std::uint32_t limit) : limit_(limit) {
    if (limit < 2) throw InvalidArgument("SieveTables: limit must be at least 2");
    try {
        spf_.assign(limit + 1, 0);
        mu_.assign(limit + 1, 0);
        tau_.assign(limit + 1, 0);
    } catch (const std::bad_alloc&) {
        throw ResourceError("SieveTables: cannot allocate tables up to " + std::to_string(limit));
    }
    std::vector<std::uint8_t> exponent(limit + 1, 0);
    std::vector<std::uint32_t> cofactor(limit + 1, 0);

    mu_[1] = 1;
    tau_[1] = 1;
    for (std::uint32_t n = 2; n <= limit; ++n) {
        if (spf_[n] == 0) {
            spf_[n] = n;
            primes_.push_back(n);
        }
        const std::uint32_t p = spf_[n];
        for (std::uint32_t q : primes_) {
            if (q > p || static_cast<std::uint64_t>(q) * n > limit) break;
            spf_[q * n] = q;
        }
        const std::uint32_t m = n / p;
        if (m % p == 0) {
            exponent[n] = static_cast<std::uint8_t>(exponent[m] + 1);
            cofactor[n] = cofactor[m];
            mu_[n] = 0;
        } else {
            exponent[n] = 1;
            cofactor[n] = m;
            mu_[n] = static_cast<std::int8_t>(-mu_[m]);
        }
        tau_[n] = tau_[cofactor[n]] * (exponent[n] + 1U);
    }
}

std::uint32_t SieveTables::prime_power_base(std::uint32_t n) const {
    if (n < 2) return 0;
    const std::uint32_t p = spf_[n];
    while (n % p == 0) n /= p;
    return n == 1 ? p : 0;
}

double SieveTables::von_mangoldt(std::uint32_t n) const {
    const std::uint32_t p = prime_power_base(n);
    return p == 0 ? 0.0 : std::log(static_cast<double>(p));
}

bool is_fundamental_discriminant(i64 d) {
    if (d == 1) return true;
    if (d == 0) return false;
    const i64 r = ((d % 4) + 4) % 4;
    if (r == 1) return is_squarefree(d);
    if (r != 0) return false;
    const i64 m = d / 4;
    const i64 rm = ((m % 4) + 4) % 4;
    return (rm == 2 || rm == 3) && is_squarefree(m);
}

i64 m_of(i64 l1) {
    if (l1 == 0 || !is_squarefree(l1)) throw InvalidArgument("m_of: argument must be nonzero and squarefree");
    const i64 r = ((l1 % 4) + 4) % 4;
    return r == 1 ? l1 : 4 * l1;
}

TwistFamily enumerate_twists(double X, i64 q1, i64 q2) {
    if (!(X >= 8)) throw InvalidArgument("enumerate_twists: X must be at least 8");
    if (q1 % 2 == 0 || q2 % 2 == 0) throw InvalidArgument("enumerate_twists: levels must be odd");

    TwistFamily fam;
    fam.X = X;
    fam.q1 = q1;
    fam.q2 = q2;
    fam.excluded_primes.push_back(2);
    for (i64 q : {q1, q2}) {
        for (const auto& [p, e] : factorize(q)) {
            bool seen = false;
            for (i64 x : fam.excluded_primes) seen = seen || x == p;
            if (!seen) fam.excluded_primes.push_back(p);
        }
    }

    // X/2 <= 8d <= 2X  <=>  X <= 16d and 4d <= X.
    auto lo = static_cast<i64>(std::ceil(X / 16.0));
    while (lo > 1 && 16.0 * static_cast<double>(lo - 1) >= X) --lo;
    while (16.0 * static_cast<double>(lo) < X) ++lo;
    auto hi = static_cast<i64>(std::floor(X / 4.0));
    while (4.0 * static_cast<double>(hi + 1) <= X) ++hi;
    while (hi >= lo && 4.0 * static_cast<double>(hi) > X) --hi;
    if (hi < lo) return fam;

    const SieveTables sieve(static_cast<std::uint32_t>(std::max<i64>(hi, 2)));
    const i64 q12 = q1 * q2;
    for (i64 d = lo; d <= hi; ++d) {
        if ((d & 1) == 0 || !sieve.is_squarefree(static_cast<std::uint32_t>(d))) continue;
        if (gcd(d, q12) != 1) continue;
        fam.entries.push_back({d, 8 * d, kronecker(8 * d, q1), kronecker(8 * d, q2)});
    }
    return fam;
}

}  // namespace twist::arith
