#pragma once

// Twisted L-series: the convergent-region Dirichlet series, root numbers,
// the derivative AFE over χ_{8d}, edge Euler products, the Z_Q factors and
// the leading constant C_{f,g}.

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "twist/arith.hpp"
#include "twist/eigen.hpp"
#include "twist/kernels.hpp"

namespace twist::lseries {

using cplx = std::complex<double>;
using i64 = std::int64_t;
using eigen::EigenTable;
using eigen::NewformSpec;

struct Satake {
    cplx alpha;
    cplx beta;
};

/// Roots of X² − λX + 1 at good p; (λ, 0) at p | q.
Satake satake(double lambda, bool bad);

struct DirichletValue {
    cplx value;
    double tail_bound = 0.0;
    i64 n_max = 0;
};

/// Σ_{n>N} τ(n)/n^σ ≤ σN^{1−σ}[log N/(σ−1) + 1/(σ−1)² + 1/(σ−1)].
double divisor_tail_bound(double sigma, i64 N);

/// Σ_{n≤N} λ(n)χ_D(n)n^{-s} for Re s ≥ 1.25, with the tail bound above.
DirichletValue dirichlet_L(const EigenTable& table, i64 D, cplx s, i64 n_max);

/// i^k η χ_D(−q) for a fundamental discriminant D coprime to q.
int root_number(const NewformSpec& spec, i64 D);

/// Root number of the twist by χ_{8d}, d odd and squarefree.
int twist_root_number(const NewformSpec& spec, i64 d);

/// χ_{8d}(n) tabulated over one period.
class ChiTable {
public:
    ChiTable(i64 d, const arith::SieveTables& sieve);
    i64 period() const noexcept { return static_cast<i64>(chi_.size()); }
    int operator()(i64 n) const { return chi_[static_cast<std::size_t>(n % period())]; }
    const std::vector<std::int8_t>& values() const noexcept { return chi_; }

private:
    std::vector<std::int8_t> chi_;
};

struct AfeOptions {
    double cutoff = 60.0;  // stop once 2πn/(scale·√q) reaches this
};

/// Σ_n λ(n)χ_{8d}(n)n^{-1/2} W(n/scale) and the derivative AFE built on it.
class TwistAFE {
public:
    TwistAFE(std::shared_ptr<const EigenTable> table, AfeOptions opts = {});

    const EigenTable& table() const noexcept { return *table_; }
    const NewformSpec& spec() const noexcept { return table_->spec(); }

    /// Largest n with 2πn/(scale√q) < cutoff·factor.
    i64 required_n(double scale, double factor = 1.0) const;

    /// 1 − i^kη χ_{8d}(−q), which is 0 or 2.
    int prefactor(i64 d) const;

    double smoothed_sum(const ChiTable& chi, double scale, double factor = 1.0) const;

    /// L'(1/2, f⊗χ_{8d}) when the twist has root number −1, else 0.
    double derivative(i64 d, const ChiTable& chi, double factor = 1.0) const;

    /// The truncated piece at scale M with the same prefactor.
    double a_value(i64 d, const ChiTable& chi, double M) const;

private:
    std::shared_ptr<const EigenTable> table_;
    AfeOptions opts_;
    std::shared_ptr<const kernels::WKernel> kernel_;
    std::vector<double> coef_;  // λ(n)/√n
};

/// One-shot derivative AFE for a single d.
double afe_derivative(const EigenTable& table, i64 d, double cutoff_factor = 1.0);

struct EulerValue {
    double value = 0.0;
    double quarter = 0.0;  // partial product to p_max/4
    double half = 0.0;     // partial product to p_max/2
    i64 p_max = 0;
    double stabilization() const { return std::abs(value - half); }
};

EulerValue sym2_L1(const EigenTable& table, i64 p_max);
EulerValue rankin_L1(const EigenTable& tf, const EigenTable& tg, i64 p_max);

/// Local factors at x = 1/p (inverse of the Euler factor).
double sym2_local_inverse(double lambda, bool bad, double p);
double rankin_local_inverse(double lf, bool bad_f, double lg, bool bad_g, double p);

struct QTerm {
    std::string name;
    int pow_q1 = 0;
    int pow_q2 = 0;
    double eps = 1.0;
};

/// The four (Q, ε_Q) pairs.
std::array<QTerm, 4> q_terms(const NewformSpec& f, const NewformSpec& g);

int v_p_of_q(const QTerm& Q, const NewformSpec& f, const NewformSpec& g, i64 p);

/// Local factor of Z_Q(u, v) at an odd prime p, summed in closed form.
double zq_local(double lf, bool bad_f, double lg, bool bad_g, double p, int vq, double u = 0.0,
                double v = 0.0);

/// The same local factor as a truncated double sum over e₁, e₂ ≤ e_max.
double zq_local_truncated(double lf, bool bad_f, double lg, bool bad_g, double p, int vq, int e_max,
                          double u = 0.0, double v = 0.0);

EulerValue zq(const EigenTable& tf, const EigenTable& tg, const QTerm& Q, i64 p_max, double u = 0.0,
              double v = 0.0);

inline EulerValue zq_00(const EigenTable& tf, const EigenTable& tg, const QTerm& Q, i64 p_max) {
    return zq(tf, tg, Q, p_max);
}

/// Z_Q/(L(1,Sym²f)L(1,Sym²g)L(1,f×g)) as a product of local ratios.
EulerValue zq_star(const EigenTable& tf, const EigenTable& tg, const QTerm& Q, i64 p_max);

struct DirectSum {
    double value = 0.0;
    double half = 0.0;  // same sum truncated at N/2
    double spread = 0.0;  // max − min of the truncations at N, N/2, N/4, N/8
    i64 N = 0;
    i64 terms = 0;
};

/// Σ over odd n₁, n₂ ≤ N with n₁n₂Q a square, straight from the definition.
DirectSum zq_direct(const EigenTable& tf, const EigenTable& tg, const QTerm& Q, i64 N, double u = 0.0,
                    double v = 0.0);

struct CfgReport {
    double c_with_eps = 0.0;
    double c_without_eps = 0.0;
    double c_factored = 0.0;
    double c_half = 0.0;  // default path at p_max/2
    double jtilde1 = 0.0;
    std::array<QTerm, 4> terms{};
    std::array<EulerValue, 4> z{};
    std::array<EulerValue, 4> z_star{};
    EulerValue sym2_f, sym2_g, rankin;
    bool with_eps = true;
    double value() const { return with_eps ? c_with_eps : c_without_eps; }
};

CfgReport c_fg(const EigenTable& tf, const EigenTable& tg, const kernels::TestFunction& J, i64 p_max,
               bool with_eps = true);

/// C_{f,g} from Z_Q values only (no edge L-values needed).
CfgReport c_fg_default(const EigenTable& tf, const EigenTable& tg, const kernels::TestFunction& J,
                       i64 p_max, bool with_eps = true);

struct AppendixAReport {
    i64 n_checked = 0;
    i64 violations = 0;
    double max_ratio = 0.0;  // max |Λ_{f×g}(n)| / Λ(n)
    double sigma = 0.0;
    double logderiv_lhs = 0.0;  // |Σ Λ_{f×g}(n) n^{-σ}|
    double logderiv_rhs = 0.0;  // Σ 4Λ(n) n^{-σ}
    double log_lhs = 0.0;       // |Σ Λ_{f×g}(n) / (n^σ log n)|
    double log_rhs = 0.0;       // 4 Σ Λ(n) / (n^σ log n)
};

/// α^e + β^e from λ(p) by the Chebyshev recursion (λ^e at bad p).
double power_sum(double lambda, bool bad, int e);

AppendixAReport appendix_a_bounds(const EigenTable& tf, const EigenTable& tg, double sigma, i64 n_max);

}  // namespace twist::lseries
