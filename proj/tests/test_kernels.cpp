#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "twist/errors.hpp"
#include "twist/kernels.hpp"
#include "twist/special.hpp"

using namespace twist;
using namespace twist::kernels;

namespace {

double direct_fourier(const std::function<double(double)>& f, double t, double lo, double hi,
                      const std::vector<double>& breaks = {}) {
    std::vector<double> pts{lo};
    pts.insert(pts.end(), breaks.begin(), breaks.end());
    pts.push_back(hi);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        // split each piece so tanh-sinh sees at most a few oscillations
        const int m = 1 + static_cast<int>(std::abs(t) * (pts[i + 1] - pts[i]));
        for (int j = 0; j < m; ++j) {
            const double a = pts[i] + (pts[i + 1] - pts[i]) * j / m;
            const double b = pts[i] + (pts[i + 1] - pts[i]) * (j + 1) / m;
            acc += oracle::integrate(
                [&](double x) { return (std::cos(2 * M_PI * x * t) + std::sin(2 * M_PI * x * t)) * f(x); }, a, b);
        }
    }
    return acc;
}

}  // namespace

TEST_CASE("bump G") {
    CHECK(bump_g(1.25) == 1.0);
    CHECK(bump_g(7.0 / 8.0) == doctest::Approx(std::exp(-48.0)).epsilon(1e-12));
    CHECK(bump_g(0.7) == 0.0);
    CHECK(bump_g(2.1) == 0.0);
    CHECK(bump_v(2.9) == 1.0);
    for (int i = 0; i < 200; ++i) {
        const double x = 1.0 + 2.0 * (i + 0.5) / 200.0;
        CHECK(bump_g(x) + bump_g(x / 2.0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(bump_g(x) >= 0.0);
        CHECK(bump_g(x) <= 1.0);
    }
    for (double x = 0.5; x <= 3.0; x += 0.01) CHECK(bump_v(x) == doctest::Approx(1.0).epsilon(1e-15));
    for (double x = 0.25; x <= 6.0; x += 0.01) CHECK(bump_v1(x) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("dyadic partition of unity") {
    double worst = 0.0;
    for (long long n = 1; n <= 100000; ++n) worst = std::max(worst, std::abs(partition_sum(n) - 1.0));
    CHECK(worst < 1e-12);
}

TEST_CASE("default test function") {
    const auto J = j_default();
    CHECK(J(1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(J(0.5) == 0.0);
    CHECK(J(2.0) == 0.0);
    CHECK_NOTHROW(validate_test_function(J));
}

TEST_CASE("test function gates") {
    TestFunction wide{"wide", [](double x) { return std::exp(-1.0 / ((x - 0.4) * (2.0 - x))); }, 0.4, 2.0, {}};
    CHECK_THROWS_AS(validate_test_function(wide), InvalidArgument);
    TestFunction negative{"neg", [](double x) { return -j_bump(x); }, 0.5, 2.0, {}};
    CHECK_THROWS_AS(validate_test_function(negative), InvalidArgument);
    TestFunction step{"step", [](double x) { return x < 1.0 ? 0.0 : j_bump(x); }, 0.5, 2.0, {1.0}};
    CHECK_THROWS_AS(validate_test_function(step), InvalidArgument);
    // G has corners at 1 and 2
    CHECK_THROWS_AS(validate_test_function(g_function()), InvalidArgument);
}

TEST_CASE("Mellin transforms") {
    const auto J = j_default();
    const auto G = g_function();
    const double g1 = mellin_checked(G, 1.0).real();
    CHECK(g1 >= 0.5);
    CHECK(g1 <= 1.25);
    const double j1 = mellin_checked(J, 1.0).real();
    CHECK(j1 > 0.0);
    CHECK(std::abs(j1 - oracle::integrate(J.f, 0.5, 2.0)) < 1e-12);
    for (cplx s : {cplx(0.5, 3.0), cplx(2.0, -7.0), cplx(-1.5, 12.0)}) {
        const auto want = oracle::mellin(J.f, s, 0.5, 2.0);
        CHECK(std::abs(mellin_checked(J, s) - want) < 1e-12);
    }
    const auto est = mellin(J, cplx(1.0, 5.0));
    CHECK(est.error < 1e-12);
}

TEST_CASE("Mellin transform of G decays slowly") {
    // The corners of G at 1 and 2 make |G̃(it)| fall off only like 1/t.
    const auto G = g_function();
    auto piecewise = [&](cplx s) {
        return oracle::mellin(G.f, s, 0.75, 1.0) + oracle::mellin(G.f, s, 1.0, 1.5) + oracle::mellin(G.f, s, 1.5, 2.0);
    };
    const double a10 = std::abs(mellin_checked(G, cplx(0.0, 10.0)));
    const double a40 = std::abs(mellin_checked(G, cplx(0.0, 40.0)));
    CHECK(std::abs(a10 - std::abs(piecewise(cplx(0.0, 10.0)))) < 1e-12);
    CHECK(std::abs(a40 - std::abs(piecewise(cplx(0.0, 40.0)))) < 1e-12);
    CHECK(a40 / a10 > 1e-4);
    CHECK(a40 < a10);
}

TEST_CASE("Fourier-type transform") {
    const auto J = j_default();
    const auto G = g_function();
    const TestFunction narrow{"narrow", [](double x) { return std::exp(-1.0 / ((x - 0.6) * (1.8 - x))); }, 0.6, 1.8, {}};
    for (const TestFunction* tf : {&J, &G, &narrow}) {
        CHECK(std::abs(fourier_type(*tf, 0.0) - mellin_checked(*tf, 1.0).real()) < 1e-12);
    }
    CHECK(std::abs(fourier_type(J, 50.0)) < 1e-8);
    for (double t : {0.3, 2.5, -4.0}) {
        CHECK(std::abs(fourier_type(J, t) - direct_fourier(J.f, t, 0.5, 2.0)) < 1e-12);
    }
    // Even extension about 0: sine parts of ±x cancel.
    auto even = [&](double t) {
        return fourier_type(J, t) + direct_fourier([&](double x) { return J(-x); }, t, -2.0, -0.5);
    };
    const double cos_only = 2.0 * oracle::integrate([&](double x) { return std::cos(2 * M_PI * x * 1.7) * J(x); }, 0.5, 2.0);
    CHECK(std::abs(even(1.7) - cos_only) < 1e-12);
}

TEST_CASE("H kernel") {
    CHECK(std::abs(H_eval(2, 11, 0.0) - 1.0) < 1e-15);
    CHECK(std::abs(H_eval(4, 1, 1.0) - 1.0 / M_PI) < 1e-15);
    CHECK_THROWS_AS(H_eval(2, 11, -1.0), InvalidArgument);
    CHECK_THROWS_AS(H_eval(2, 11, -3.0), InvalidArgument);
    const double h30 = std::abs(H_eval(2, 11, cplx(1.0, 30.0))) * std::pow(31.0, 20);
    const double h60 = std::abs(H_eval(2, 11, cplx(1.0, 60.0))) * std::pow(61.0, 20);
    CHECK(h60 < h30);
    // Γ(3/2 + it) via the reflection-free product against boost's real Γ at t = 0
    CHECK(std::abs(H_eval(2, 11, 0.5) - std::tgamma(1.5) * std::pow(2 * M_PI / std::sqrt(11.0), -0.5)) < 1e-14);
}

TEST_CASE("W kernel contour consistency") {
    for (double y : {0.1, 1.0, 5.0}) {
        const cplx right = W_line(2, 11, y, 3.0);
        const cplx left = W_line(2, 11, y, -0.5);
        CHECK(std::abs(right.imag()) < 1e-12);
        CHECK(std::abs(right.real() - (W_residue_at_zero(2, 11, y) + left.real())) < 1e-9);
    }
    const double y0 = 1e-5;
    const double asym = std::log(std::sqrt(11.0) / (2 * M_PI * y0)) + special::digamma(1.0);
    CHECK(std::abs(W_eval(2, 11, y0) - asym) < 1e-3);
    const double y60 = 60.0 * std::sqrt(11.0) / (2 * M_PI);
    CHECK(std::abs(W_eval(2, 11, y60)) < 1e-15);
    CHECK(std::abs(W_eval(2, 15, 1.3 * y60)) < 1e-15);
    CHECK_THROWS_AS(W_eval(2, 11, 0.0), InvalidArgument);
}

TEST_CASE("tabulated W matches the contour") {
    const auto K = shared_w_kernel(2, 15);
    CHECK(K.get() == shared_w_kernel(2, 15).get());
    std::vector<double> zs;
    for (double z = 1e-9; z < 70.0; z *= 1.37) zs.push_back(z);
    std::vector<double> batch(zs.size());
    K->at_z_many(zs.data(), batch.data(), zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const double y = zs[i] / K->z_per_y();
        const double ref = W_eval(2, 15, y);
        CHECK(std::abs(K->at_z(zs[i]) - ref) < 1e-13 * std::max(1.0, std::abs(ref)));
        CHECK(batch[i] == K->at_z(zs[i]));
    }
}

TEST_CASE("parametered Fourier-type transform") {
    const auto J = j_default();
    const FourierTypeContour at0(J, 0.0);
    for (double t : {0.5, 3.0, 20.0}) {
        CHECK(std::abs(at0(t, +1) - fourier_type(J, t)) < 1e-9);
        CHECK(std::abs(at0(t, -1) - fourier_type_weighted(J, 0.0, t, -1)) < 1e-9);
    }
    CHECK(std::abs(at0(100.0, 1)) < 1e-4 * std::abs(at0(1.0, 1)));
    CHECK_THROWS_AS(at0(0.0, 1), InvalidArgument);

    const cplx w(0.3, 0.4);
    const FourierTypeContour atw(J, w);
    CHECK(std::abs(atw(2.0, -1) - fourier_type_weighted(J, w, 2.0, -1)) < 1e-9);

    // holomorphy: central difference in w against the log-weighted integrand
    const double h = 1e-4;
    const double w0 = 0.5;
    const FourierTypeContour up(J, w0 + h), down(J, w0 - h);
    const cplx fd = (up(1.5, 1) - down(1.5, 1)) / (2 * h);
    CHECK(std::abs(fd - fourier_type_weighted(J, w0, 1.5, 1, 1)) < 1e-8);
    const FourierTypeContour deriv(J, w0, {}, 1);
    CHECK(std::abs(fd - deriv(1.5, 1)) < 1e-8);
}
