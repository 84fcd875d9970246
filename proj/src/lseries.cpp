#include "twist/lseries.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "twist/errors.hpp"
#include "twist/special.hpp"

namespace twist::lseries {

using special::kPi;

Satake satake(double lambda, bool bad) {
    if (bad) return {lambda, 0.0};
    const double disc = 4.0 - lambda * lambda;
    const cplx root = disc >= 0.0 ? cplx(0.0, std::sqrt(disc)) : cplx(std::sqrt(-disc), 0.0);
    return {0.5 * (lambda + root), 0.5 * (lambda - root)};
}

double divisor_tail_bound(double sigma, i64 N) {
    const double s1 = sigma - 1.0;
    const double n = static_cast<double>(N);
    return sigma * std::pow(n, -s1) * (std::log(n) / s1 + 1.0 / (s1 * s1) + 1.0 / s1);
}

DirichletValue dirichlet_L(const EigenTable& table, i64 D, cplx s, i64 n_max) {
    if (s.real() < 1.25) throw InvalidArgument("dirichlet_L: Re(s) must be at least 1.25");
    if (!arith::is_fundamental_discriminant(D)) throw InvalidArgument("dirichlet_L: D must be a fundamental discriminant");
    if (arith::gcd(D, table.spec().level) != 1) throw InvalidArgument("dirichlet_L: D must be coprime to the level");
    if (n_max > table.n_max()) {
        throw TableTooShort("dirichlet_L: table covers n ≤ " + std::to_string(table.n_max()), n_max);
    }
    DirichletValue out;
    out.n_max = n_max;
    for (i64 n = n_max; n >= 1; --n) {
        const int c = arith::kronecker(D, n);
        if (c == 0) continue;
        out.value += static_cast<double>(c) * table[n] * std::exp(-s * std::log(static_cast<double>(n)));
    }
    out.tail_bound = divisor_tail_bound(s.real(), n_max);
    return out;
}

int root_number(const NewformSpec& spec, i64 D) {
    if (arith::gcd(D, spec.level) != 1) throw InvalidArgument("root_number: D must be coprime to the level");
    if (spec.weight % 2 != 0) throw InvalidArgument("root_number: weight must be even");
    return spec.root_number() * arith::kronecker(D, -spec.level);
}

int twist_root_number(const NewformSpec& spec, i64 d) {
    if (d <= 0 || d % 2 == 0 || !arith::is_squarefree(d)) {
        throw InvalidArgument("twist_root_number: d must be odd, positive and squarefree");
    }
    return root_number(spec, 8 * d);
}

ChiTable::ChiTable(i64 d, const arith::SieveTables& sieve) {
    const i64 period = 8 * d;
    if (period - 1 > static_cast<i64>(sieve.limit())) {
        throw InvalidArgument("ChiTable: sieve too small for modulus " + std::to_string(period));
    }
    chi_.assign(static_cast<std::size_t>(period), 0);
    if (period > 1) chi_[1] = 1;
    for (i64 n = 2; n < period; ++n) {
        const i64 p = sieve.spf(static_cast<std::uint32_t>(n));
        if (p == n) {
            chi_[n] = static_cast<std::int8_t>(arith::kronecker(period, p));
        } else {
            chi_[n] = static_cast<std::int8_t>(chi_[p] * chi_[n / p]);
        }
    }
}

TwistAFE::TwistAFE(std::shared_ptr<const EigenTable> table, AfeOptions opts)
    : table_(std::move(table)), opts_(opts) {
    kernel_ = kernels::shared_w_kernel(spec().weight, spec().level);
    const i64 n = table_->n_max();
    coef_.resize(static_cast<std::size_t>(n) + 1);
    coef_[0] = 0.0;
    for (i64 k = 1; k <= n; ++k) coef_[k] = (*table_)[k] / std::sqrt(static_cast<double>(k));
}

i64 TwistAFE::required_n(double scale, double factor) const {
    const double limit = opts_.cutoff * factor * scale / kernel_->z_per_y();
    auto n = static_cast<i64>(std::floor(limit));
    if (static_cast<double>(n) >= limit) --n;
    return std::max<i64>(n, 0);
}

int TwistAFE::prefactor(i64 d) const { return 1 - spec().root_number() * arith::kronecker(8 * d, -spec().level); }

double TwistAFE::smoothed_sum(const ChiTable& chi, double scale, double factor) const {
    const i64 N = required_n(scale, factor);
    if (N > table_->n_max()) {
        throw TableTooShort("AFE for " + spec().label + " at scale " + std::to_string(scale) + " needs n_max = " +
                                std::to_string(N) + ", table has " + std::to_string(table_->n_max()),
                            N);
    }
    const double zc = kernel_->z_per_y() / scale;
    const auto& c = chi.values();
    const i64 P = chi.period();
    constexpr std::size_t B = kernels::WKernel::kBatch;
    std::array<double, B> z{}, a{}, w{};
    std::size_t fill = 0;
    double acc = 0.0;
    auto flush = [&] {
        kernel_->at_z_many(z.data(), w.data(), fill);
        for (std::size_t i = 0; i < fill; ++i) acc += a[i] * w[i];
        fill = 0;
    };
    i64 r = 1 % P;
    for (i64 n = 1; n <= N; n += 2) {
        const int x = c[static_cast<std::size_t>(r)];
        if (x != 0) {
            z[fill] = static_cast<double>(n) * zc;
            a[fill] = x * coef_[n];
            if (++fill == B) flush();
        }
        r += 2;
        if (r >= P) r -= P;
    }
    flush();
    return acc;
}

double TwistAFE::derivative(i64 d, const ChiTable& chi, double factor) const {
    const int pre = prefactor(d);
    if (pre == 0) return 0.0;
    return pre * smoothed_sum(chi, static_cast<double>(8 * d), factor);
}

double TwistAFE::a_value(i64 d, const ChiTable& chi, double M) const {
    if (!(M > 0.0)) throw InvalidArgument("a_value: M must be positive");
    const int pre = prefactor(d);
    if (pre == 0) return 0.0;
    return pre * smoothed_sum(chi, M);
}

double afe_derivative(const EigenTable& table, i64 d, double cutoff_factor) {
    if (arith::gcd(2 * d, table.spec().level) != 1 || d <= 0) {
        throw InvalidArgument("afe_derivative: d must be positive with gcd(d, 2q) = 1");
    }
    const arith::SieveTables sieve(static_cast<std::uint32_t>(std::max<i64>(8 * d, 2)));
    const ChiTable chi(d, sieve);
    const TwistAFE afe(std::make_shared<const EigenTable>(table));
    return afe.derivative(d, chi, cutoff_factor);
}

namespace {

void require_primes(const EigenTable& t, i64 p_max) {
    if (t.n_max() < p_max) {
        throw TableTooShort("Euler product for " + t.spec().label + " needs λ(p) for p ≤ " + std::to_string(p_max), p_max);
    }
}

void require_squarefree_level(const NewformSpec& s) {
    if (!arith::is_squarefree(s.level)) {
        throw InvalidArgument("level " + std::to_string(s.level) + " has a square factor; its local factors are not implemented");
    }
}

template <class Local>
EulerValue euler_product(i64 p_max, const Local& local) {
    EulerValue out;
    out.p_max = p_max;
    const arith::SieveTables sieve(static_cast<std::uint32_t>(std::max<i64>(p_max, 2)));
    double prod = 1.0;
    const i64 q4 = p_max / 4;
    const i64 q2 = p_max / 2;
    out.quarter = out.half = 1.0;
    for (std::uint32_t up : sieve.primes()) {
        const i64 p = up;
        prod *= local(p);
        if (p <= q4) out.quarter = prod;
        if (p <= q2) out.half = prod;
    }
    out.value = prod;
    return out;
}

bool same_form(const EigenTable& a, const EigenTable& b) {
    if (a.spec().level != b.spec().level || a.spec().weight != b.spec().weight) return false;
    const i64 upto = std::min<i64>({a.n_max(), b.n_max(), 1000});
    for (i64 n = 1; n <= upto; ++n) {
        if (std::abs(a[n] - b[n]) > 1e-12) return false;
    }
    return true;
}

}  // namespace

double sym2_local_inverse(double lambda, bool bad, double p) {
    const double x = 1.0 / p;
    if (bad) return 1.0 - lambda * lambda * x;
    return (1.0 - (lambda * lambda - 2.0) * x + x * x) * (1.0 - x);
}

double rankin_local_inverse(double lf, bool bad_f, double lg, bool bad_g, double p) {
    const double x = 1.0 / p;
    const double ab = lf * lg;
    if (bad_f && bad_g) return 1.0 - ab * x;
    if (bad_f) return 1.0 - ab * x + lf * lf * x * x;
    if (bad_g) return 1.0 - ab * x + lg * lg * x * x;
    const double x2 = x * x;
    return 1.0 - ab * x + (lf * lf + lg * lg - 2.0) * x2 - ab * x2 * x + x2 * x2;
}

EulerValue sym2_L1(const EigenTable& table, i64 p_max) {
    if (p_max < 1000) throw InvalidArgument("sym2_L1: p_max must be at least 1000");
    require_primes(table, p_max);
    require_squarefree_level(table.spec());
    const auto& s = table.spec();
    return euler_product(p_max, [&](i64 p) { return 1.0 / sym2_local_inverse(table[p], s.is_bad(p), static_cast<double>(p)); });
}

EulerValue rankin_L1(const EigenTable& tf, const EigenTable& tg, i64 p_max) {
    if (p_max < 1000) throw InvalidArgument("rankin_L1: p_max must be at least 1000");
    if (same_form(tf, tg)) throw InvalidArgument("rankin_L1: f = g has a pole at s = 1");
    require_primes(tf, p_max);
    require_primes(tg, p_max);
    require_squarefree_level(tf.spec());
    require_squarefree_level(tg.spec());
    const auto& f = tf.spec();
    const auto& g = tg.spec();
    return euler_product(p_max, [&](i64 p) {
        return 1.0 / rankin_local_inverse(tf[p], f.is_bad(p), tg[p], g.is_bad(p), static_cast<double>(p));
    });
}

std::array<QTerm, 4> q_terms(const NewformSpec& f, const NewformSpec& g) {
    const double wf = f.root_number();
    const double wg = g.root_number();
    return {{{"(q1q2)^2", 2, 2, 1.0}, {"q1q2^2", 1, 2, -wf}, {"q1^2q2", 2, 1, -wg}, {"q1q2", 1, 1, wf * wg}}};
}

int v_p_of_q(const QTerm& Q, const NewformSpec& f, const NewformSpec& g, i64 p) {
    const int vf = f.level % p == 0 ? arith::valuation(f.level, p) : 0;
    const int vg = g.level % p == 0 ? arith::valuation(g.level, p) : 0;
    return Q.pow_q1 * vf + Q.pow_q2 * vg;
}

namespace {

double hecke_series(double lambda, bool bad, double x) {
    return bad ? 1.0 / (1.0 - lambda * x) : 1.0 / (1.0 - lambda * x + x * x);
}

double hecke_power(double lambda, bool bad, int e) {
    // λ(p^e) from λ(p).
    if (bad) return std::pow(lambda, e);
    double prev = 1.0, cur = lambda;
    if (e == 0) return 1.0;
    for (int j = 1; j < e; ++j) {
        const double next = lambda * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

}  // namespace

double zq_local(double lf, bool bad_f, double lg, bool bad_g, double p, int vq, double u, double v) {
    const double x1 = std::pow(p, -0.5 - u);
    const double x2 = std::pow(p, -0.5 - v);
    const double plus = hecke_series(lf, bad_f, x1) * hecke_series(lg, bad_g, x2);
    const double minus = hecke_series(lf, bad_f, -x1) * hecke_series(lg, bad_g, -x2);
    const double even = 0.5 * (plus + minus);
    const double odd = 0.5 * (plus - minus);
    const double w = p / (p + 1.0);
    if (vq == 0) return 1.0 + w * (even - 1.0);
    return w * (vq % 2 == 0 ? even : odd);
}

double zq_local_truncated(double lf, bool bad_f, double lg, bool bad_g, double p, int vq, int e_max,
                          double u, double v) {
    const double x1 = std::pow(p, -0.5 - u);
    const double x2 = std::pow(p, -0.5 - v);
    const double w = p / (p + 1.0);
    double acc = 0.0;
    for (int e1 = 0; e1 <= e_max; ++e1) {
        for (int e2 = 0; e2 <= e_max; ++e2) {
            if ((e1 + e2 + vq) % 2 != 0) continue;
            const double term = hecke_power(lf, bad_f, e1) * hecke_power(lg, bad_g, e2) * std::pow(x1, e1) * std::pow(x2, e2);
            acc += (e1 + e2 + vq > 0) ? w * term : term;
        }
    }
    return acc;
}

EulerValue zq(const EigenTable& tf, const EigenTable& tg, const QTerm& Q, i64 p_max, double u, double v) {
    const auto& f = tf.spec();
    const auto& g = tg.spec();
    const i64 reach = std::max<i64>({p_max, f.level, g.level});
    require_primes(tf, reach);
    require_primes(tg, reach);
    auto local = [&](i64 p) {
        if (p == 2) return 1.0;
        return zq_local(tf[p], f.is_bad(p), tg[p], g.is_bad(p), static_cast<double>(p), v_p_of_q(Q, f, g, p), u, v);
    };
    EulerValue out = euler_product(p_max, local);
    // Primes of Q beyond p_max still carry the p/(p+1) weight.
    for (i64 lvl : {f.level, g.level}) {
        for (const auto& [p, e] : arith::factorize(lvl)) {
            (void)e;
            if (p <= p_max) continue;
            const double extra = local(p);
            out.value *= extra;
            out.half *= extra;
            out.quarter *= extra;
        }
    }
    return out;
}

EulerValue zq_star(const EigenTable& tf, const EigenTable& tg, const QTerm& Q, i64 p_max) {
    const auto& f = tf.spec();
    const auto& g = tg.spec();
    require_primes(tf, p_max);
    require_primes(tg, p_max);
    require_squarefree_level(f);
    require_squarefree_level(g);
    return euler_product(p_max, [&](i64 p) {
        const double dp = static_cast<double>(p);
        const bool bf = f.is_bad(p);
        const bool bg = g.is_bad(p);
        const double z = p == 2 ? 1.0 : zq_local(tf[p], bf, tg[p], bg, dp, v_p_of_q(Q, f, g, p));
        return z * sym2_local_inverse(tf[p], bf, dp) * sym2_local_inverse(tg[p], bg, dp) *
               rankin_local_inverse(tf[p], bf, tg[p], bg, dp);
    });
}

DirectSum zq_direct(const EigenTable& tf, const EigenTable& tg, const QTerm& Q, i64 N, double u, double v) {
    if (N > tf.n_max() || N > tg.n_max()) throw TableTooShort("zq_direct: tables shorter than N", N);
    const auto& f = tf.spec();
    const auto& g = tg.spec();
    const arith::SieveTables sieve(static_cast<std::uint32_t>(std::max<i64>(N, 2)));

    // Squarefree part, radical weight ∏ p/(p+1) per n.
    std::vector<i64> core(static_cast<std::size_t>(N) + 1, 1);
    std::vector<double> wt(static_cast<std::size_t>(N) + 1, 1.0);
    for (i64 n = 2; n <= N; ++n) {
        const i64 p = sieve.spf(static_cast<std::uint32_t>(n));
        i64 m = n / p;
        int e = 1;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        core[n] = core[m] * (e % 2 == 1 ? p : 1);
        wt[n] = wt[m] * static_cast<double>(p) / (p + 1.0);
    }
    i64 core_q = 1;
    std::vector<i64> q_primes;
    for (i64 lvl : {f.level, g.level}) {
        for (const auto& [p, e] : arith::factorize(lvl)) {
            (void)e;
            if (std::find(q_primes.begin(), q_primes.end(), p) == q_primes.end()) q_primes.push_back(p);
        }
    }
    for (i64 p : q_primes) {
        if (v_p_of_q(Q, f, g, p) % 2 == 1) core_q *= p;
    }

    std::unordered_map<i64, std::vector<i64>> bucket;
    for (i64 n = 1; n <= N; n += 2) bucket[core[n]].push_back(n);

    DirectSum out;
    out.N = N;
    std::array<double, 4> partial{};  // max(n₁, n₂) ≤ N/2^j
    for (i64 n2 = 1; n2 <= N; n2 += 2) {
        const i64 c2 = core[n2];
        const i64 gg = std::gcd(c2, core_q);
        const i64 target = (c2 / gg) * (core_q / gg);
        auto it = bucket.find(target);
        if (it == bucket.end()) continue;
        const double b2 = tg[n2] * std::pow(static_cast<double>(n2), -0.5 - v);
        for (i64 n1 : it->second) {
            const i64 r = std::gcd(n1, n2);
            // weight of rad(n1 n2) = wt(n1) wt(n2) / wt(gcd)
            double w = wt[n1] * wt[n2] / wt[r];
            for (i64 p : q_primes) {
                if (n1 % p != 0 && n2 % p != 0) w *= static_cast<double>(p) / (p + 1.0);
            }
            const double term = tf[n1] * std::pow(static_cast<double>(n1), -0.5 - u) * b2 * w;
            const i64 top = std::max(n1, n2);
            for (int j = 0; j < 4 && top <= (N >> j); ++j) partial[j] += term;
            ++out.terms;
        }
    }
    out.value = partial[0];
    out.half = partial[1];
    const auto [lo, hi] = std::minmax_element(partial.begin(), partial.end());
    out.spread = *hi - *lo;
    return out;
}

CfgReport c_fg_default(const EigenTable& tf, const EigenTable& tg, const kernels::TestFunction& J,
                       i64 p_max, bool with_eps) {
    CfgReport rep;
    rep.with_eps = with_eps;
    rep.terms = q_terms(tf.spec(), tg.spec());
    rep.jtilde1 = kernels::mellin_checked(J, 1.0).real();
    const double pre = rep.jtilde1 / (2.0 * kPi * kPi);
    double with = 0.0, without = 0.0, with_half = 0.0, without_half = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        rep.z[i] = zq(tf, tg, rep.terms[i], p_max);
        with += rep.terms[i].eps * rep.z[i].value;
        without += rep.z[i].value;
        with_half += rep.terms[i].eps * rep.z[i].half;
        without_half += rep.z[i].half;
    }
    rep.c_with_eps = pre * with;
    rep.c_without_eps = pre * without;
    rep.c_half = pre * (with_eps ? with_half : without_half);
    return rep;
}

CfgReport c_fg(const EigenTable& tf, const EigenTable& tg, const kernels::TestFunction& J, i64 p_max,
               bool with_eps) {
    CfgReport rep = c_fg_default(tf, tg, J, p_max, with_eps);
    rep.sym2_f = sym2_L1(tf, p_max);
    rep.sym2_g = sym2_L1(tg, p_max);
    rep.rankin = rankin_L1(tf, tg, p_max);
    double star = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        rep.z_star[i] = zq_star(tf, tg, rep.terms[i], p_max);
        star += (with_eps ? rep.terms[i].eps : 1.0) * rep.z_star[i].value;
    }
    rep.c_factored = rep.jtilde1 / (2.0 * kPi * kPi) * rep.sym2_f.value * rep.sym2_g.value * rep.rankin.value * star;
    return rep;
}

double power_sum(double lambda, bool bad, int e) {
    if (e == 0) return bad ? 1.0 : 2.0;
    if (bad) return std::pow(lambda, e);
    double prev = 2.0, cur = lambda;
    for (int j = 1; j < e; ++j) {
        const double next = lambda * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

AppendixAReport appendix_a_bounds(const EigenTable& tf, const EigenTable& tg, double sigma, i64 n_max) {
    if (!(sigma > 1.0)) throw InvalidArgument("appendix_a_bounds: σ must exceed 1");
    require_primes(tf, n_max);
    require_primes(tg, n_max);
    const auto& f = tf.spec();
    const auto& g = tg.spec();
    const arith::SieveTables sieve(static_cast<std::uint32_t>(std::max<i64>(n_max, 2)));
    AppendixAReport rep;
    rep.sigma = sigma;
    double ld = 0.0, lg = 0.0, rd = 0.0, rl = 0.0;
    for (i64 n = n_max; n >= 2; --n) {
        const i64 p = sieve.prime_power_base(static_cast<std::uint32_t>(n));
        ++rep.n_checked;
        if (p == 0) continue;
        int e = 0;
        for (i64 m = n; m > 1; m /= p) ++e;
        const double logp = std::log(static_cast<double>(p));
        const double c = power_sum(tf[p], f.is_bad(p), e) * power_sum(tg[p], g.is_bad(p), e) * logp;
        const double ratio = std::abs(c) / logp;
        rep.max_ratio = std::max(rep.max_ratio, ratio);
        if (ratio > 4.0 * (1.0 + 1e-12)) ++rep.violations;
        const double ns = std::pow(static_cast<double>(n), -sigma);
        const double logn = std::log(static_cast<double>(n));
        ld += c * ns;
        lg += c * ns / logn;
        rd += 4.0 * logp * ns;
        rl += 4.0 * logp * ns / logn;
    }
    rep.logderiv_lhs = std::abs(ld);
    rep.logderiv_rhs = rd;
    rep.log_lhs = std::abs(lg);
    rep.log_rhs = rl;
    return rep;
}

}  // namespace twist::lseries
