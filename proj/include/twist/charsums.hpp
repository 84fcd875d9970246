#pragma once

// Gauss-like sums G_ℓ(n) and numerical checks of the Poisson-type
// summation identities over odd d.

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>

#include "twist/kernels.hpp"

namespace twist::charsums {

using cplx = std::complex<double>;
using i64 = std::int64_t;

/// ((1−i)/2 + (−1/n)(1+i)/2) Σ_{a mod n} (a/n) e(aℓ/n), brute force.
/// With flip_prefactor the two prefactor halves are swapped (fault injection).
cplx gauss_like(i64 ell, i64 n, bool flip_prefactor = false);

/// |G_{2^r ℓ}(n) − G_{2^{r mod 2} ℓ}(n)| < 1e-10.
bool gauss_reduction_check(i64 ell, i64 n, int r);

struct PoissonOptions {
    double tail_tol = 1e-10;
    i64 ell_start = 16;
    i64 ell_limit = 1 << 16;
    bool flip_gauss_prefactor = false;
};

struct PoissonResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double rhs_imag = 0.0;
    i64 ell_max = 0;
    double last_octave = 0.0;
};

/// Both sides of Σ_{d odd} χ_d(n) F(d/X) = (X/2n)(2/n) Σ_ℓ (−1)^ℓ G_ℓ(n) F̌(ℓX/2n).
/// The d-sum runs over both signs; the ℓ-sum doubles until the last octave
/// contributes less than tail_tol.
PoissonResult poisson_identity_1d(i64 n, const kernels::TestFunction& F, double X,
                                  const PoissonOptions& opts = {});

/// A factor of a separable H with a closed-form Mellin transform.
struct SeparableFactor {
    std::function<double(double)> f;
    std::function<cplx(cplx)> mellin;
};

/// exp(−(y/c)^4), whose Mellin transform is c^u Γ(u/4)/4.
SeparableFactor quartic_gaussian(double c);

/// (1/2πi)∫_{(ε)} B̃(u) n^{-u} du on |Im u| ≤ T.
double mellin_inverse(const SeparableFactor& B, double n, double eps = 0.25, double T = 400.0,
                      double panel_width = 0.25);

struct SeparableSettings {
    double eps = 0.25;
    double mellin_T = 400.0;
    kernels::ContourSettings contour{};
};

/// I(ℓ, n₁, n₂) for H(x, y, z) = A(x)B(y)C(z): the B and C factors by Mellin
/// inversion and the s-integral by the precomputed contour for A.
class SeparableI {
public:
    SeparableI(const kernels::TestFunction& A, SeparableFactor B, SeparableFactor C,
               const SeparableSettings& ss = {});

    cplx operator()(i64 ell, i64 n1, i64 n2, double X) const;
    const kernels::TestFunction& a() const noexcept { return a_; }
    const SeparableFactor& b() const noexcept { return b_; }
    const SeparableFactor& c() const noexcept { return c_; }

private:
    double inverse_cached(int which, i64 n) const;

    kernels::TestFunction a_;
    SeparableFactor b_;
    SeparableFactor c_;
    SeparableSettings ss_;
    kernels::FourierTypeContour contour_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<int, i64>, double> inverse_;
};

cplx eval_I_separable(i64 ell, i64 n1, i64 n2, const kernels::TestFunction& A,
                      const SeparableFactor& B, const SeparableFactor& C, double X,
                      const SeparableSettings& ss = {});

struct SummationResult {
    double lhs = 0.0;
    double main = 0.0;
    cplx dual = 0.0;
    double rhs = 0.0;
    i64 ell_max = 0;
};

/// Both sides of the separable-H summation identity over positive odd d.
SummationResult summation_identity_check(const SeparableI& I, i64 n1, i64 n2, double X, double tail_tol = 1e-12);

}  // namespace twist::charsums
