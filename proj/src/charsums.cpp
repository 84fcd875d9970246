#include "twist/charsums.hpp"

#include <cmath>

#include "twist/arith.hpp"
#include "twist/errors.hpp"
#include "twist/special.hpp"

namespace twist::charsums {

using special::kPi;

cplx gauss_like(i64 ell, i64 n, bool flip_prefactor) {
    if (n < 1 || n % 2 == 0) throw InvalidArgument("gauss_like: n must be odd and positive");
    const int chi_m1 = arith::kronecker(-1, n);
    cplx pre = cplx(0.5, -0.5) + static_cast<double>(chi_m1) * cplx(0.5, 0.5);
    if (flip_prefactor) pre = cplx(0.5, 0.5) + static_cast<double>(chi_m1) * cplx(0.5, -0.5);
    const i64 l = ((ell % n) + n) % n;
    cplx acc = 0.0;
    for (i64 a = 0; a < n; ++a) {
        const int c = arith::kronecker(a, n);
        if (c == 0) continue;
        const i64 r = static_cast<i64>((static_cast<__int128>(a) * l) % n);
        acc += static_cast<double>(c) * std::polar(1.0, 2.0 * kPi * static_cast<double>(r) / n);
    }
    return pre * acc;
}

bool gauss_reduction_check(i64 ell, i64 n, int r) {
    if (r < 0) throw InvalidArgument("gauss_reduction_check: r must be nonnegative");
    // Reduce 2^r ℓ modulo n exactly before forming the phase.
    i64 big = ((ell % n) + n) % n;
    for (int j = 0; j < r; ++j) big = (2 * big) % n;
    const i64 small = (r % 2 == 1) ? 2 * ell : ell;
    return std::abs(gauss_like(big, n) - gauss_like(small, n)) < 1e-10;
}

PoissonResult poisson_identity_1d(i64 n, const kernels::TestFunction& F, double X,
                                  const PoissonOptions& opts) {
    if (n < 1 || n % 2 == 0) throw InvalidArgument("poisson_identity_1d: n must be odd and positive");
    if (!(F.lo > -1e300 && F.hi < 1e300)) throw InvalidArgument("poisson_identity_1d: F must have compact support");

    PoissonResult res;
    // Σ over odd d, both signs, with F(d/X) ≠ 0.
    const auto d_lo = static_cast<i64>(std::floor(F.lo * X));
    const auto d_hi = static_cast<i64>(std::ceil(F.hi * X));
    double lhs = 0.0;
    for (i64 d = d_lo; d <= d_hi; ++d) {
        if (d % 2 == 0) continue;
        const int c = arith::kronecker(d, n);
        if (c != 0) lhs += c * F(static_cast<double>(d) / X);
    }
    res.lhs = lhs;

    const double scale = X / (2.0 * n);
    auto term = [&](i64 ell) {
        const cplx g = gauss_like(ell, n, opts.flip_gauss_prefactor);
        const double sign = (ell % 2 == 0) ? 1.0 : -1.0;
        return sign * g * kernels::fourier_type(F, static_cast<double>(ell) * scale);
    };

    cplx acc = term(0);
    i64 done = 0;
    i64 upto = opts.ell_start;
    for (;;) {
        cplx octave = 0.0;
        for (i64 ell = done + 1; ell <= upto; ++ell) octave += term(ell) + term(-ell);
        acc += octave;
        res.last_octave = std::abs(octave) * scale;
        done = upto;
        if (res.last_octave < opts.tail_tol || upto >= opts.ell_limit) break;
        upto *= 2;
    }
    const cplx rhs = scale * static_cast<double>(arith::kronecker(2, n)) * acc;
    res.rhs = rhs.real();
    res.rhs_imag = rhs.imag();
    res.ell_max = done;
    return res;
}

SeparableFactor quartic_gaussian(double c) {
    return {[c](double y) {
                const double u = y / c;
                const double u2 = u * u;
                return std::exp(-u2 * u2);
            },
            [c](cplx u) { return std::exp(u * std::log(c) + special::lgamma(0.25 * u)) / 4.0; }};
}

double mellin_inverse(const SeparableFactor& B, double n, double eps, double T, double panel_width) {
    const int panels = std::max(1, static_cast<int>(std::ceil(T / panel_width)));
    const auto rule = quad::gauss_panels(0.0, T, panels);
    const double ln = std::log(n);
    double acc = 0.0;
    for (std::size_t j = 0; j < rule.size(); ++j) {
        const cplx u(eps, rule.x[j]);
        acc += rule.w[j] * (B.mellin(u) * std::exp(-u * ln)).real();
    }
    return acc / kPi;
}

SeparableI::SeparableI(const kernels::TestFunction& A, SeparableFactor B, SeparableFactor C,
                       const SeparableSettings& ss)
    : a_(A), b_(std::move(B)), c_(std::move(C)), ss_(ss), contour_(A, 0.0, ss.contour) {}

double SeparableI::inverse_cached(int which, i64 n) const {
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = inverse_.find({which, n});
        if (it != inverse_.end()) return it->second;
    }
    const double v = mellin_inverse(which == 0 ? b_ : c_, static_cast<double>(n), ss_.eps, ss_.mellin_T);
    std::lock_guard<std::mutex> lock(mu_);
    inverse_[{which, n}] = v;
    return v;
}

cplx SeparableI::operator()(i64 ell, i64 n1, i64 n2, double X) const {
    if (ell == 0) throw InvalidArgument("eval_I_separable: ℓ = 0 is excluded");
    const double bn = inverse_cached(0, n1);
    const double cn = inverse_cached(1, n2);
    // (n₁n₂/(πX|ℓ|))^s = (2π|t|)^{-s} with |t| = |ℓ|X/(2n₁n₂).
    const double t = static_cast<double>(std::llabs(ell)) * X / (2.0 * static_cast<double>(n1 * n2));
    return bn * cn * contour_(t, ell > 0 ? 1 : -1);
}

cplx eval_I_separable(i64 ell, i64 n1, i64 n2, const kernels::TestFunction& A,
                      const SeparableFactor& B, const SeparableFactor& C, double X,
                      const SeparableSettings& ss) {
    return SeparableI(A, B, C, ss)(ell, n1, n2, X);
}

SummationResult summation_identity_check(const SeparableI& I, i64 n1, i64 n2, double X, double tail_tol) {
    if (n1 < 1 || n2 < 1 || n1 % 2 == 0 || n2 % 2 == 0) {
        throw InvalidArgument("summation_identity_check: n1 and n2 must be odd and positive");
    }
    const i64 n = n1 * n2;
    const auto& A = I.a();
    const double bn = I.b().f(static_cast<double>(n1));
    const double cn = I.c().f(static_cast<double>(n2));

    SummationResult res;
    const auto d_lo = std::max<i64>(1, static_cast<i64>(std::floor(A.lo * X)));
    const auto d_hi = static_cast<i64>(std::ceil(A.hi * X));
    for (i64 d = d_lo; d <= d_hi; ++d) {
        if (d % 2 == 0) continue;
        const int c = arith::kronecker(8 * d, n);
        if (c != 0) res.lhs += c * A(static_cast<double>(d) / X) * bn * cn;
    }

    if (arith::is_perfect_square(n)) {
        double euler = 1.0;
        for (const auto& [p, e] : arith::factorize(n)) euler *= 1.0 - 1.0 / static_cast<double>(p);
        const double h1 = kernels::mellin(A, 1.0).value.real() * bn * cn;
        res.main = 0.5 * X * h1 * euler;
    }

    cplx acc = 0.0;
    i64 done = 0;
    i64 upto = 8;
    for (;;) {
        cplx octave = 0.0;
        for (i64 ell = done + 1; ell <= upto; ++ell) {
            const double sign = (ell % 2 == 0) ? 1.0 : -1.0;
            octave += sign * (gauss_like(ell, n) * I(ell, n1, n2, X) + gauss_like(-ell, n) * I(-ell, n1, n2, X));
        }
        acc += octave;
        done = upto;
        if (0.5 * X * std::abs(octave) / n < tail_tol || upto >= (1 << 14)) break;
        upto *= 2;
    }
    res.dual = 0.5 * X * acc / static_cast<double>(n);
    res.rhs = res.main + res.dual.real();
    res.ell_max = done;
    return res;
}

}  // namespace twist::charsums
