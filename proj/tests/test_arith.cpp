#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "twist/arith.hpp"
#include "twist/errors.hpp"

using namespace twist::arith;

TEST_CASE("kronecker spot values") {
    CHECK(kronecker(1, 15) == 1);
    CHECK(kronecker(5, 10) == 0);
    CHECK(kronecker(8, 3) == oracle::legendre(8, 3));
    CHECK(kronecker(8, 3) == -1);
    CHECK(kronecker(1, 0) == 1);
    CHECK(kronecker(-1, 0) == 1);
    CHECK(kronecker(3, 0) == 0);
}

TEST_CASE("kronecker agrees with the factorisation oracle") {
    for (i64 d = -200; d <= 200; ++d) {
        for (i64 n = -200; n <= 200; ++n) {
            if (n == 0) continue;
            REQUIRE_MESSAGE(kronecker(d, n) == oracle::kronecker(d, n), "d=" << d << " n=" << n);
        }
    }
}

TEST_CASE("kronecker is multiplicative in n at odd primes") {
    const i64 primes[] = {3, 5, 7, 11, 13, 101, 499};
    for (i64 d = -500; d <= 500; d += 7) {
        for (i64 p : primes) {
            for (i64 m = 1; m <= 500; m += 13) {
                CHECK(kronecker(d, m * p) == kronecker(d, m) * oracle::legendre(d, p));
            }
        }
    }
}

TEST_CASE("kronecker(8d, -1) = 1 for d > 0") {
    for (i64 d = 1; d < 5000; ++d) CHECK(kronecker(8 * d, -1) == 1);
}

TEST_CASE("jacobi matches kronecker on odd moduli") {
    for (i64 a = -60; a <= 60; ++a) {
        for (i64 n = 1; n < 200; n += 2) CHECK(jacobi(a, n) == kronecker(a, n));
    }
}

TEST_CASE("primality") {
    for (i64 n = -5; n < 20000; ++n) REQUIRE(is_prime(n) == oracle::is_prime_trial(n));
    CHECK(is_prime(2305843009213693951LL));        // 2^61 − 1
    CHECK_FALSE(is_prime(2305843009213693953LL));  // divisible by 3
    CHECK_FALSE(is_prime(3215031751LL));           // strong pseudoprime to bases 2, 3, 5, 7
}

TEST_CASE("sieve tables") {
    const SieveTables s(5000);
    CHECK(s.mobius(1) == 1);
    CHECK(s.mobius(6) == 1);
    CHECK(s.tau(6) == 4);
    CHECK(s.von_mangoldt(6) == 0.0);
    CHECK(s.von_mangoldt(8) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(s.mobius(12) == 0);
    for (std::uint32_t n = 2; n <= 5000; ++n) {
        REQUIRE(s.mobius(n) == oracle::mobius_trial(n));
        REQUIRE(s.is_squarefree(n) == oracle::squarefree_trial(n));
        REQUIRE(s.is_prime(n) == oracle::is_prime_trial(n));
        REQUIRE(n % s.spf(n) == 0);
        if (!s.is_prime(n)) REQUIRE(static_cast<std::uint64_t>(s.spf(n)) * s.spf(n) <= n);
    }
    for (std::uint32_t n = 1; n <= 800; ++n) REQUIRE(s.tau(n) == oracle::tau_trial(n));
}

TEST_CASE("m_of") {
    CHECK(m_of(1) == 1);
    CHECK(m_of(3) == 12);
    CHECK(m_of(-1) == -4);
    CHECK_THROWS_AS(m_of(0), twist::InvalidArgument);
    CHECK_THROWS_AS(m_of(12), twist::InvalidArgument);
    for (i64 l = -300; l <= 300; ++l) {
        if (l == 0 || !oracle::squarefree_trial(l)) continue;
        const i64 m = m_of(l);
        CHECK(((m % 4) + 4) % 4 <= 1);
        CHECK(is_fundamental_discriminant(m));
    }
}

namespace {

std::vector<i64> brute_family(double X, i64 q1, i64 q2) {
    std::vector<i64> out;
    for (i64 d = 1; 8.0 * d <= 2.0 * X; d += 2) {
        if (8.0 * d < X / 2.0) continue;
        if (!oracle::squarefree_trial(d)) continue;
        if (std::gcd(d, q1 * q2) != 1) continue;
        out.push_back(d);
    }
    return out;
}

std::vector<i64> family_ds(double X, i64 q1, i64 q2) {
    std::vector<i64> v;
    for (const auto& e : enumerate_twists(X, q1, q2).entries) v.push_back(e.d);
    return v;
}

}  // namespace

TEST_CASE("twist family window") {
    CHECK(family_ds(8, 1, 1) == std::vector<i64>{1});
    const auto fam = enumerate_twists(80, 3, 5);
    for (const auto& e : fam.entries) {
        CHECK(e.d % 3 != 0);
        CHECK(e.d % 5 != 0);
        CHECK(oracle::squarefree_trial(e.d));
        CHECK(e.disc == 8 * e.d);
        CHECK(is_fundamental_discriminant(e.disc));
        CHECK(e.chi_q1 == kronecker(8 * e.d, 3));
    }
    for (double X : {8.0, 17.0, 80.0, 999.0, 4096.0, 10000.0}) {
        CHECK(family_ds(X, 11, 15) == brute_family(X, 11, 15));
        CHECK(family_ds(X, 1, 1) == brute_family(X, 1, 1));
    }
    CHECK(family_ds(1e5, 11, 15).size() == brute_family(1e5, 11, 15).size());
}
