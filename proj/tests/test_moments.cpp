#include <doctest.h>

#include <cmath>
#include <numeric>
#include <cstring>
#include <memory>

#include "twist/arith.hpp"
#include "twist/eigen.hpp"
#include "twist/errors.hpp"
#include "twist/lseries.hpp"
#include "twist/moments.hpp"

using namespace twist;
using namespace twist::moments;

namespace {

std::shared_ptr<const EigenTable> table_for(const char* curve, double X) {
    const auto spec = eigen::curve_form(eigen::parse_curve(curve), -1);
    const i64 n = required_table_n(X, spec);
    return std::make_shared<const EigenTable>(eigen::build_table(spec, n));
}

MomentConfig base_config(double X) {
    MomentConfig cfg;
    cfg.X = X;
    cfg.f = table_for("0,-1,1,-10,-20", X);
    cfg.g = table_for("1,1,1,-10,-10", X);
    return cfg;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("cutoff and configuration") {
    CHECK(std::abs(default_cutoff(2000.0) - 2000.0 / std::pow(std::log(2000.0), 3)) < 1e-12);
    MomentConfig cfg;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);  // no tables
    auto ok = base_config(200.0);
    CHECK_NOTHROW(ok.validate());
    ok.workers = 0;
    CHECK_THROWS_AS(ok.validate(), InvalidArgument);
    CHECK(std::abs(predicted_main(2.0, 100.0) - 2.0 * 100.0 * std::pow(std::log(100.0), 2)) < 1e-9);
}

TEST_CASE("decomposition at X = 2000") {
    const auto cfg = base_config(2000.0);
    const auto fam = filtered_family(cfg);
    const auto all = arith::enumerate_twists(2000.0, 11, 15);
    CHECK(fam.size() < all.entries.size());
    for (i64 d : fam) {
        CHECK(lseries::twist_root_number(cfg.f->spec(), d) == -1);
        CHECK(lseries::twist_root_number(cfg.g->spec(), d) == -1);
    }
    const auto r = decomposition(cfg);
    CHECK(r.family_size == static_cast<i64>(fam.size()));
    CHECK(r.residual_rel < 1e-9);
    CHECK(std::isnan(r.C_fg));
    CHECK(std::abs(r.lhs - lhs_moment(cfg)) < 1e-10 * std::abs(r.lhs));
    // Frozen regression value for this configuration.
    CHECK(std::abs(r.lhs - 258.795587889104) < 1e-9);
}

TEST_CASE("cutoff at the natural scale leaves nothing to split") {
    const auto cfg = base_config(400.0);
    const lseries::TwistAFE afe(cfg.f);
    const arith::SieveTables sieve(8 * 100);
    int seen = 0;
    for (i64 d : filtered_family(cfg)) {
        const lseries::ChiTable chi(d, sieve);
        CHECK(std::abs(b_value(afe, d, chi, 8.0 * d)) < 1e-12);
        CHECK(std::abs(b_value(afe, d, chi, 1.0) - afe.derivative(d, chi)) > 0.0);
        ++seen;
    }
    CHECK(seen > 0);
}

TEST_CASE("empty family") {
    auto cfg = base_config(8.0);
    const auto r = decomposition(cfg);
    CHECK(r.family_size == 0);
    CHECK(r.lhs == 0.0);
    CHECK(r.residual_rel == 0.0);
}

TEST_CASE("worker count does not change deterministic results") {
    auto cfg = base_config(2000.0);
    cfg.workers = 1;
    const auto one = decomposition(cfg);
    cfg.workers = 3;
    const auto three = decomposition(cfg);
    CHECK(same_bits(one.lhs, three.lhs));
    CHECK(same_bits(one.I_fg, three.I_fg));
    CHECK(same_bits(one.I_gf, three.I_gf));
    CHECK(same_bits(one.II, three.II));
    CHECK(same_bits(one.III, three.III));
    cfg.deterministic = false;
    const auto loose = decomposition(cfg);
    CHECK(std::abs(loose.lhs - one.lhs) < 1e-10 * std::abs(one.lhs));
}

TEST_CASE("pairwise summation") {
    CHECK(pairwise_sum({}) == 0.0);
    std::vector<double> v(1000, 0.1);
    CHECK(std::abs(pairwise_sum(v) - 100.0) < 1e-12);
}

TEST_CASE("Cauchy-Schwarz on the truncated products") {
    const auto cs = cauchy_schwarz(base_config(2000.0));
    CHECK(cs.III_ff > 0.0);
    CHECK(cs.III_gg > 0.0);
    CHECK(cs.holds());
}

TEST_CASE("scan with the constant") {
    auto cfg = base_config(1000.0);
    cfg.p_max = 10000;
    const auto rows = scan(cfg, {1000.0, 500.0});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].X == 500.0);
    CHECK(rows[1].X == 1000.0);
    CHECK(rows[0].C_fg == rows[1].C_fg);
    for (const auto& r : rows) {
        CHECK(std::abs(r.predicted - predicted_main(r.C_fg, r.X)) < 1e-12 * r.predicted);
        CHECK(std::abs(r.ratio - r.lhs / r.predicted) < 1e-14);
    }
}

TEST_CASE("mean-value diagnostic") {
    auto t = table_for("0,-1,1,-10,-20", 200.0);
    const auto rows = mean_value_diagnostic(*t, {1, 3}, {1, 20}, 0.0);
    REQUIRE(rows.size() == 8);
    CHECK(rows[0].over == 'm');
    CHECK(rows[1].over == 'd');
    const double g1 = kernels::bump_g(1.0);
    // N = 1 leaves the single term n = 1, where every character is 1.
    CHECK(std::abs(rows[0].lhs - 2.0 * 2.0 * g1 * g1) < 1e-14);
    CHECK(std::abs(rows[2].lhs - 2.0 * 4.0 * g1 * g1) < 1e-14);
    CHECK(std::abs(rows[3].lhs - 2.0 * g1 * g1) < 1e-14);
    for (const auto& r : rows) {
        CHECK(std::isfinite(r.ratio));
        CHECK(r.lhs >= 0.0);
    }
    CHECK_THROWS_AS(mean_value_diagnostic(*t, {1}, {1 << 30}, 0.0), TableTooShort);
}
