#include "twist/special.hpp"

#include <cmath>

namespace twist::special {

namespace {

// B_{2j} / (2j (2j-1)), j = 1..8
constexpr double kStirling[8] = {
    1.0 / 12.0,          -1.0 / 360.0,   1.0 / 1260.0,     -1.0 / 1680.0,
    1.0 / 1188.0,        -691.0 / 360360.0, 1.0 / 156.0,   -3617.0 / 122400.0,
};

cplx lgamma_stirling(cplx z) {
    // z has Re z > 0 and |z| >= 15 here.
    const cplx inv = 1.0 / z;
    const cplx inv2 = inv * inv;
    cplx series = 0.0;
    cplx pw = inv;
    for (double c : kStirling) {
        series += c * pw;
        pw *= inv2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + series;
}

cplx log_sin(cplx w) {
    const cplx i(0.0, 1.0);
    if (w.imag() > 0.0) return -i * w + std::log((std::exp(2.0 * i * w) - 1.0) / (2.0 * i));
    return i * w + std::log((1.0 - std::exp(-2.0 * i * w)) / (2.0 * i));
}

}  // namespace

cplx lgamma(cplx z) {
    if (z.real() < 0.5) {
        // Reflection: Γ(z)Γ(1-z) = π / sin(πz).
        return std::log(kPi) - log_sin(kPi * z) - lgamma(1.0 - z);
    }
    cplx shift = 0.0;
    cplx w = z;
    cplx prod = 1.0;
    int count = 0;
    while (std::abs(w) < 15.0) {
        prod *= w;
        w += 1.0;
        if (++count == 8) {
            shift += std::log(prod);
            prod = 1.0;
            count = 0;
        }
    }
    shift += std::log(prod);
    return lgamma_stirling(w) - shift;
}

double digamma(double x) {
    double acc = 0.0;
    while (x < 15.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv2 = 1.0 / (x * x);
    const double tail = inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    return acc + std::log(x) - 0.5 / x - tail;
}

cplx log_cos_sin(cplx z, int sigma) {
    const cplx i(0.0, 1.0);
    const double s = sigma >= 0 ? 1.0 : -1.0;
    // cos z + σ sin z = ((1 - σi)/2) e^{iz} + ((1 + σi)/2) e^{-iz}
    if (z.imag() > 0.0) {
        return -i * z + std::log(cplx(0.5, 0.5 * s) + cplx(0.5, -0.5 * s) * std::exp(2.0 * i * z));
    }
    return i * z + std::log(cplx(0.5, -0.5 * s) + cplx(0.5, 0.5 * s) * std::exp(-2.0 * i * z));
}

cplx gamma_cos_sin(cplx s, int sigma) {
    return std::exp(lgamma(s) + log_cos_sin(0.5 * kPi * s, sigma));
}

}  // namespace twist::special
