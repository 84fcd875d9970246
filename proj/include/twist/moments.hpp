#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "twist/kernels.hpp"
#include "twist/lseries.hpp"

namespace twist::moments {

using cplx = std::complex<double>;
using i64 = std::int64_t;
using eigen::EigenTable;

/// X/(log X)^3, the default practical cutoff.
double default_cutoff(double X);

struct MomentConfig {
    double X = 2000.0;
    std::optional<double> M;  // cutoff; default_cutoff(X) when unset
    std::shared_ptr<const EigenTable> f;
    std::shared_ptr<const EigenTable> g;
    kernels::TestFunction J = kernels::j_default();
    lseries::AfeOptions afe;
    i64 p_max = 100000;
    bool with_eps = true;
    int workers = 1;
    bool deterministic = true;

    double cutoff() const { return M ? *M : default_cutoff(X); }
    void validate() const;  // throws InvalidArgument
};

/// Largest n any AFE in the family at X needs from a table for `spec`,
/// including the truncated sums at cutoff M.
i64 required_table_n(double X, const eigen::NewformSpec& spec, const lseries::AfeOptions& afe = {},
                     double M = 0.0);

/// Per-d ingredients of the decomposition.
struct TwistTerm {
    i64 d = 0;
    double weight = 0.0;  // J(8d/X)
    double lf = 0.0, lg = 0.0;  // L' at 1/2
    double af = 0.0, ag = 0.0;  // truncated parts at the cutoff
};

/// d of the family at X where both twists have root number −1.
std::vector<i64> filtered_family(const MomentConfig& cfg);

/// Evaluates every TwistTerm, split across cfg.workers threads.
std::vector<TwistTerm> evaluate_terms(const MomentConfig& cfg);

/// L'(f) − A(f) at cutoff M.
double b_value(const lseries::TwistAFE& afe, i64 d, const lseries::ChiTable& chi, double M);

/// Fixed-shape pairwise sum.
double pairwise_sum(const std::vector<double>& v);

struct MomentReport {
    double X = 0.0;
    double M = 0.0;
    i64 family_size = 0;
    double lhs = 0.0;
    double I_fg = 0.0;
    double I_gf = 0.0;
    double II = 0.0;
    double III = 0.0;
    double residual_rel = 0.0;
    double C_fg = 0.0;
    double predicted = 0.0;
    double ratio = 0.0;
    // diagnostics
    double C_without_eps = 0.0;
    double C_half = 0.0;  // C from Euler products at p_max/2
    i64 max_n = 0;        // longest AFE sum used
    double seconds = 0.0;
};

/// Σ* L'_f L'_g J(8d/X).
double lhs_moment(const MomentConfig& cfg);

/// All four terms over one pass; C is filled in when `constant` is given.
MomentReport decomposition(const MomentConfig& cfg, const lseries::CfgReport* constant = nullptr);

double predicted_main(double C, double X);

/// One report per X, ascending. C is computed once.
std::vector<MomentReport> scan(const MomentConfig& cfg, std::vector<double> X_list);

struct CauchySchwarz {
    double III_fg = 0.0;
    double III_ff = 0.0;
    double III_gg = 0.0;
    bool holds(double slack = 1e-12) const { return III_fg * III_fg <= III_ff * III_gg + slack; }
};

CauchySchwarz cauchy_schwarz(const MomentConfig& cfg);

struct MeanValueRow {
    char over = 'm';  // m: sum over M <= |m| <= 2M with (m/n); d: sum over odd d <= M with (8d/n)
    i64 M = 0;
    i64 N = 0;
    i64 a = 1;
    double t = 0.0;
    double lhs = 0.0;
    double shape = 0.0;
    double ratio = 0.0;
};

/// Brute-force second moments of the character sums over a grid, against
/// the shapes of the two large-sieve bounds. Never asserts.
std::vector<MeanValueRow> mean_value_diagnostic(const EigenTable& table, const std::vector<i64>& M_list,
                                                const std::vector<i64>& N_list, double t, i64 a = 1);

}  // namespace twist::moments
