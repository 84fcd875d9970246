#pragma once

#include <complex>

namespace twist::special {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566406649015329;

/// A branch of log Γ(z); only exp() of the result is used downstream.
cplx lgamma(cplx z);

/// ψ(x) for real x > 0.
double digamma(double x);

/// log((cos + σ sin)(z)) for σ = ±1, stable for large |Im z|.
cplx log_cos_sin(cplx z, int sigma);

/// Γ(s)(cos + σ sin)(πs/2).
cplx gamma_cos_sin(cplx s, int sigma);

}  // namespace twist::special
