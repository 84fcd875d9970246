#include "twist/moments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "twist/errors.hpp"
#include "twist/special.hpp"

namespace twist::moments {

double default_cutoff(double X) {
    const double L = std::log(X);
    return X / (L * L * L);
}

void MomentConfig::validate() const {
    if (!(X >= 8.0) || !std::isfinite(X)) throw InvalidArgument("moment: X must be at least 8");
    if (!(cutoff() > 0.0)) throw InvalidArgument("moment: cutoff M must be positive");
    if (!f || !g) throw InvalidArgument("moment: both eigenvalue tables are required");
    for (const auto* t : {f.get(), g.get()}) {
        if (t->spec().level % 2 == 0) throw InvalidArgument("moment: levels must be odd");
    }
    if (workers < 1) throw InvalidArgument("moment: workers must be at least 1");
}

i64 required_table_n(double X, const eigen::NewformSpec& spec, const lseries::AfeOptions& afe, double M) {
    const double scale = std::max(2.0 * X, M);
    const double z_per_y = 2.0 * special::kPi / std::sqrt(static_cast<double>(spec.level));
    return static_cast<i64>(std::floor(afe.cutoff * scale / z_per_y)) + 1;
}

std::vector<i64> filtered_family(const MomentConfig& cfg) {
    const auto& sf = cfg.f->spec();
    const auto& sg = cfg.g->spec();
    const auto fam = arith::enumerate_twists(cfg.X, sf.level, sg.level);
    std::vector<i64> out;
    for (const auto& e : fam.entries) {
        if (lseries::root_number(sf, e.disc) == -1 && lseries::root_number(sg, e.disc) == -1) out.push_back(e.d);
    }
    return out;
}

double b_value(const lseries::TwistAFE& afe, i64 d, const lseries::ChiTable& chi, double M) {
    return afe.derivative(d, chi) - afe.a_value(d, chi, M);
}

double pairwise_sum(const std::vector<double>& v) {
    auto rec = [&](auto&& self, std::size_t lo, std::size_t hi) -> double {
        if (hi - lo <= 8) {
            double s = 0.0;
            for (std::size_t i = lo; i < hi; ++i) s += v[i];
            return s;
        }
        const std::size_t mid = lo + (hi - lo) / 2;
        return self(self, lo, mid) + self(self, mid, hi);
    };
    return rec(rec, 0, v.size());
}

namespace {

struct Evaluation {
    std::vector<TwistTerm> terms;
    std::vector<std::size_t> finish_order;
    i64 max_n = 0;
};

Evaluation evaluate(const MomentConfig& cfg) {
    cfg.validate();
    Evaluation ev;
    const auto ds = filtered_family(cfg);
    ev.terms.resize(ds.size());
    if (ds.empty()) return ev;

    const double M = cfg.cutoff();
    const lseries::TwistAFE af(cfg.f, cfg.afe);
    const lseries::TwistAFE ag(cfg.g, cfg.afe);
    const arith::SieveTables sieve(static_cast<std::uint32_t>(8 * ds.back()));
    ev.max_n = std::max({af.required_n(8.0 * ds.back()), ag.required_n(8.0 * ds.back()), af.required_n(M),
                         ag.required_n(M)});

    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::exception_ptr failure;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= ds.size()) return;
            const i64 d = ds[i];
            TwistTerm t;
            t.d = d;
            try {
                const lseries::ChiTable chi(d, sieve);
                t.weight = cfg.J(8.0 * static_cast<double>(d) / cfg.X);
                t.lf = af.derivative(d, chi);
                t.lg = ag.derivative(d, chi);
                t.af = af.a_value(d, chi, M);
                t.ag = ag.a_value(d, chi, M);
            } catch (const TableTooShort& e) {
                std::lock_guard<std::mutex> lock(mu);
                if (!failure) {
                    failure = std::make_exception_ptr(
                        TableTooShort(std::string(e.what()) + " (at d = " + std::to_string(d) + ")", e.required()));
                }
                next.store(ds.size());
                return;
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!failure) failure = std::current_exception();
                next.store(ds.size());
                return;
            }
            ev.terms[i] = t;
            std::lock_guard<std::mutex> lock(mu);
            ev.finish_order.push_back(i);
        }
    };
    if (cfg.workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < cfg.workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return ev;
}

}  // namespace

std::vector<TwistTerm> evaluate_terms(const MomentConfig& cfg) { return evaluate(cfg).terms; }

double lhs_moment(const MomentConfig& cfg) {
    const auto terms = evaluate_terms(cfg);
    std::vector<double> v;
    v.reserve(terms.size());
    for (const auto& t : terms) v.push_back(t.weight * t.lf * t.lg);
    return pairwise_sum(v);
}

double predicted_main(double C, double X) {
    const double L = std::log(X);
    return C * X * L * L;
}

MomentReport decomposition(const MomentConfig& cfg, const lseries::CfgReport* constant) {
    const auto start = std::chrono::steady_clock::now();
    const Evaluation ev = evaluate(cfg);
    const std::size_t n = ev.terms.size();
    std::array<std::vector<double>, 5> parts;
    for (auto& p : parts) p.resize(n);
    auto fill = [&](std::size_t slot, std::size_t i) {
        const auto& t = ev.terms[i];
        const double bf = t.lf - t.af;
        const double bg = t.lg - t.ag;
        parts[0][slot] = t.weight * t.lf * t.lg;
        parts[1][slot] = t.weight * t.lf * t.ag;
        parts[2][slot] = t.weight * t.af * t.lg;
        parts[3][slot] = t.weight * t.af * t.ag;
        parts[4][slot] = t.weight * bf * bg;
    };
    std::array<double, 5> sums{};
    if (cfg.deterministic) {
        for (std::size_t i = 0; i < n; ++i) fill(i, i);
        for (std::size_t k = 0; k < 5; ++k) sums[k] = pairwise_sum(parts[k]);
    } else {
        for (std::size_t j = 0; j < n; ++j) fill(j, ev.finish_order[j]);
        for (std::size_t k = 0; k < 5; ++k) {
            for (double x : parts[k]) sums[k] += x;
        }
    }
    MomentReport r;
    r.X = cfg.X;
    r.M = cfg.cutoff();
    r.family_size = static_cast<i64>(n);
    r.lhs = sums[0];
    r.I_fg = sums[1];
    r.I_gf = sums[2];
    r.II = sums[3];
    r.III = sums[4];
    const double recombined = r.I_fg + r.I_gf - r.II + r.III;
    const double scale = std::max({std::abs(r.lhs), std::abs(r.I_fg), std::abs(r.I_gf), std::abs(r.II)});
    r.residual_rel = scale > 0.0 ? std::abs(r.lhs - recombined) / scale : 0.0;
    r.max_n = ev.max_n;
    if (constant) {
        r.C_fg = constant->value();
        r.C_without_eps = constant->c_without_eps;
        r.C_half = constant->c_half;
        r.predicted = predicted_main(r.C_fg, cfg.X);
        r.ratio = r.predicted != 0.0 ? r.lhs / r.predicted : std::nan("");
    } else {
        r.C_fg = r.C_without_eps = r.C_half = r.predicted = r.ratio = std::nan("");
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::vector<MomentReport> scan(const MomentConfig& cfg, std::vector<double> X_list) {
    if (X_list.empty()) throw InvalidArgument("scan: empty X list");
    std::sort(X_list.begin(), X_list.end());
    const auto C = lseries::c_fg_default(*cfg.f, *cfg.g, cfg.J, cfg.p_max, cfg.with_eps);
    std::vector<MomentReport> out;
    for (double X : X_list) {
        MomentConfig c = cfg;
        c.X = X;
        if (cfg.M && X != cfg.X) c.M.reset();  // an explicit M belongs to the configured X only
        out.push_back(decomposition(c, &C));
    }
    return out;
}

CauchySchwarz cauchy_schwarz(const MomentConfig& cfg) {
    CauchySchwarz cs;
    cs.III_fg = decomposition(cfg).III;
    MomentConfig ff = cfg;
    ff.g = cfg.f;
    cs.III_ff = decomposition(ff).III;
    MomentConfig gg = cfg;
    gg.f = cfg.g;
    cs.III_gg = decomposition(gg).III;
    return cs;
}

std::vector<MeanValueRow> mean_value_diagnostic(const EigenTable& table, const std::vector<i64>& M_list,
                                                const std::vector<i64>& N_list, double t, i64 a) {
    const auto G = kernels::g_function();
    std::vector<MeanValueRow> rows;
    const double tt = 1.0 + std::abs(t);
    if (a < 1) throw InvalidArgument("mean_value_diagnostic: a must be positive");
    double tau_a = 1.0;
    for (const auto& [p, e] : arith::factorize(a)) {
        (void)p;
        tau_a *= e + 1;
    }
    for (i64 N : N_list) {
        const i64 lo = static_cast<i64>(std::floor(0.75 * static_cast<double>(N))) + 1;
        const i64 hi = 2 * N - 1;
        if (hi > table.n_max()) throw TableTooShort("mean_value_diagnostic: table too short", hi);
        std::vector<cplx> coef;
        for (i64 n = lo; n <= hi; ++n) {
            const double dn = static_cast<double>(n);
            coef.push_back(table[n] * G(dn / static_cast<double>(N)) * std::exp(cplx(-0.5, -t) * std::log(dn)));
        }
        for (i64 M : M_list) {
            MeanValueRow rm{'m', M, N, 1, t, 0.0, 0.0, 0.0};
            for (i64 m = M; m <= 2 * M; ++m) {
                for (i64 sm : {m, -m}) {
                    cplx s = 0.0;
                    for (i64 n = lo; n <= hi; ++n) s += static_cast<double>(arith::kronecker(sm, n)) * coef[n - lo];
                    rm.lhs += std::norm(s);
                }
            }
            const double dm = static_cast<double>(M);
            const double dN = static_cast<double>(N);
            rm.shape = tt * tt * (dm + dN * std::log(2.0 + dN / dm));
            rm.ratio = rm.lhs / rm.shape;
            rows.push_back(rm);

            MeanValueRow rd{'d', M, N, a, t, 0.0, 0.0, 0.0};
            for (i64 d = 1; d <= M; d += 2) {
                cplx s = 0.0;
                for (i64 n = lo; n <= hi; ++n) {
                    if (arith::gcd(n, a) != 1) continue;
                    s += static_cast<double>(arith::kronecker(8 * d, n)) * coef[n - lo];
                }
                rd.lhs += std::norm(s);
            }
            rd.shape = std::pow(tau_a, 5) * dm * tt * tt * tt * std::log(2.0 + std::abs(t));
            rd.ratio = rd.lhs / rd.shape;
            rows.push_back(rd);
        }
    }
    return rows;
}

}  // namespace twist::moments
