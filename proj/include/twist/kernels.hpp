#pragma once

// Bumps, the test function J, archimedean kernels H and W, and the Mellin
// and Fourier-type transforms built on them.

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "twist/quadrature.hpp"

namespace twist::kernels {

using cplx = std::complex<double>;

double bump_g(double x);
double bump_v(double x);
double bump_v1(double x);

/// Σ over N = 2^h of V(n/N) G(n/N).
double partition_sum(long long n);

/// exp(-1/((x - 1/2)(2 - x))) on (1/2, 2), zero elsewhere.
double j_bump(double x);

struct TestFunction {
    std::string name;
    std::function<double(double)> f;
    double lo = 0.5;
    double hi = 2.0;
    std::vector<double> breaks;  // points where f is not smooth

    double operator()(double x) const { return (x <= lo || x >= hi) ? 0.0 : f(x); }
    TestFunction scaled(double c) const;
};

TestFunction j_default();
TestFunction g_function();

/// Support, sign and finite-difference smoothness gates for a J candidate.
/// Throws InvalidArgument naming the failed gate.
void validate_test_function(const TestFunction& tf);

struct QuadSettings {
    double T = 40.0;
    int nodes = 2000;
};

/// ∫ F(x) x^{s-1} dx with the achieved error estimate.
quad::ComplexEstimate mellin(const TestFunction& tf, cplx s, double tol = 1e-12);

/// As mellin, but throws QuadratureError when the estimate exceeds tol.
cplx mellin_checked(const TestFunction& tf, cplx s, double tol = 1e-12);

/// ∫ (cos(2πxt) + sin(2πxt)) F(x) dx.
double fourier_type(const TestFunction& tf, double t, double tol = 1e-13);

/// ∫ (cos + σ sin)(2π|t|x) F(x) x^w (log x)^m dx, the direct-space form of J̌_w.
cplx fourier_type_weighted(const TestFunction& tf, cplx w, double t, int sigma, int log_power = 0,
                           double tol = 1e-13);

/// Γ(w + k/2)/Γ(k/2) (2π/√q)^{-w}.
cplx H_eval(int k, long long q, cplx w);

/// (1/2πi)∫_{(c)} H(u) y^{-u} du/u² over |Im u| ≤ T, full line.
cplx W_line(int k, long long q, double y, double c, const QuadSettings& qs = {});

/// Residue at u = 0 of the W integrand: ψ(k/2) − log(2πy/√q).
double W_residue_at_zero(int k, long long q, double y);

/// W(y) as a real number, choosing the line by the size of 2πy/√q.
double W_eval(int k, long long q, double y, const QuadSettings& qs = {});

/// Piecewise Chebyshev interpolant of W in z = 2πy/√q on dyadic pieces.
class WKernel {
public:
    WKernel(int k, long long q, const QuadSettings& qs = {});

    /// W as a function of z; falls back to direct quadrature off-table.
    double at_z(double z) const;
    /// Batched at_z; interleaves the recurrences of up to kBatch points.
    void at_z_many(const double* z, double* out, std::size_t n) const;
    double operator()(double y) const { return at_z(y * z_per_y_); }
    double z_per_y() const noexcept { return z_per_y_; }
    int weight() const noexcept { return k_; }
    long long level() const noexcept { return q_; }

    static constexpr int kDegree = 24;
    static constexpr int kMinExp = -44;
    static constexpr int kMaxExp = 7;  // table covers z < 2^7
    static constexpr std::size_t kBatch = 32;

private:
    int k_;
    long long q_;
    double z_per_y_;
    QuadSettings qs_;
    std::vector<std::array<double, kDegree + 1>> coef_;
};

/// Shared, lazily built kernel for (k, q).
std::shared_ptr<const WKernel> shared_w_kernel(int k, long long q);

struct ContourSettings {
    double eps = 0.25;
    double T = 1200.0;
    double panel_width = 1.0;
};

/// J̌_w(t) = (1/2πi)∫_{(ε)} J̃(1 + w − s)(2π|t|)^{-s} Γ(s)(cos + σ sin)(πs/2) ds
/// with the Mellin values precomputed along the line. log_power = 1 gives
/// the w-derivative.
class FourierTypeContour {
public:
    FourierTypeContour(const TestFunction& tf, cplx w, const ContourSettings& cs = {},
                       int log_power = 0);

    cplx operator()(double t, int sigma) const;

private:
    bool symmetric_;
    std::vector<double> tau_;
    std::vector<double> weight_;
    std::vector<cplx> s_;
    std::vector<cplx> plus_;   // J̃ · Γ(s)(cos + sin)
    std::vector<cplx> minus_;  // J̃ · Γ(s)(cos − sin)
};

/// One-shot J̌_w(t); builds a contour each call.
cplx J_check_w(const TestFunction& tf, cplx w, double t, int sigma, const ContourSettings& cs = {});

}  // namespace twist::kernels
