#include "twist/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <memory>
#include <new>
#include <ostream>
#include <sstream>

#include "twist/arith.hpp"
#include "twist/charsums.hpp"
#include "twist/eigen.hpp"
#include "twist/errors.hpp"
#include "twist/kernels.hpp"
#include "twist/lseries.hpp"
#include "twist/moments.hpp"

#ifndef TWIST_VERSION
#define TWIST_VERSION "0.0.0"
#endif

namespace twist::cli {

namespace fs = std::filesystem;
using i64 = std::int64_t;
using eigen::EigenTable;
using eigen::NewformSpec;
using TablePtr = std::shared_ptr<const EigenTable>;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        if constexpr (std::is_same_v<T, double>) {
            s += fmt(v[i]);
        } else if constexpr (std::is_same_v<T, std::string>) {
            s += v[i];
        } else {
            s += std::to_string(v[i]);
        }
    }
    return s;
}

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return fmt(*d);
    if (const auto* n = std::get_if<long long>(&c)) return std::to_string(*n);
    return std::get<std::string>(c);
}

struct AssertionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
    std::vector<std::pair<std::string, std::string>> kv{{"version", TWIST_VERSION}, {"command", command}};
    if (table_f.empty()) {
        kv.emplace_back("curve-f", curve_f);
        kv.emplace_back("eta-f", std::to_string(eta_f));
    } else {
        kv.emplace_back("table-f", table_f);
    }
    if (table_g.empty()) {
        kv.emplace_back("curve-g", curve_g);
        kv.emplace_back("eta-g", std::to_string(eta_g));
    } else {
        kv.emplace_back("table-g", table_g);
    }
    kv.emplace_back("X", fmt(X));
    kv.emplace_back("X-list", join(X_list));
    kv.emplace_back("M", M > 0.0 ? fmt(M) : std::string("X/(log X)^3"));
    kv.emplace_back("pmax", std::to_string(p_max));
    kv.emplace_back("emax", std::to_string(e_max));
    kv.emplace_back("quad-T", fmt(quad_T));
    kv.emplace_back("quad-nodes", std::to_string(quad_nodes));
    kv.emplace_back("nmax", std::to_string(n_max));
    kv.emplace_back("d", join(d_list));
    kv.emplace_back("n", join(n_list));
    kv.emplace_back("ell", join(ell_list));
    kv.emplace_back("t", fmt(t));
    kv.emplace_back("with-eps", with_eps ? "true" : "false");
    kv.emplace_back("workers", std::to_string(workers));
    kv.emplace_back("deterministic", deterministic ? "true" : "false");
    kv.emplace_back("format", format);
    kv.emplace_back("cache-dir", cache_dir);
    kv.emplace_back("suite", join(suites));
    kv.emplace_back("seed", std::to_string(seed));
    if (flip_gauss_prefactor) kv.emplace_back("flip-gauss-prefactor", "true");
    return kv;
}

std::string to_csv(const Table& t, const RunConfig& cfg) {
    std::string s = "# twistmom " TWIST_VERSION "\n";
    for (const auto& [k, v] : cfg.echo()) s += "# " + k + "=" + v + "\n";
    s += join(t.columns) + "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) s += ',';
            s += cell_text(row[i]);
        }
        s += '\n';
    }
    for (const auto& n : t.notes) s += "# " + n + "\n";
    return s;
}

std::string to_json(const Table& t, const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["artifact"] = "twistmom";
    j["version"] = TWIST_VERSION;
    auto& c = j["config"];
    c = nlohmann::ordered_json::object();
    for (const auto& [k, v] : cfg.echo()) c[k] = v;
    j["columns"] = t.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            const auto& cell = row[i];
            if (const auto* d = std::get_if<double>(&cell)) {
                r[t.columns[i]] = std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(nullptr);
            } else if (const auto* n = std::get_if<long long>(&cell)) {
                r[t.columns[i]] = *n;
            } else {
                r[t.columns[i]] = std::get<std::string>(cell);
            }
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    j["notes"] = t.notes;
    return j.dump(2) + "\n";
}

namespace {

class Runner {
public:
    Runner(const RunConfig& cfg, std::ostream& err) : cfg_(cfg), err_(err) {}

    Table dispatch() {
        const std::string& c = cfg_.command;
        if (c == "eigen") return eigen_cmd();
        if (c == "verify") return verify_cmd();
        if (c == "gauss") return gauss_cmd();
        if (c == "poisson-check") return poisson_cmd();
        if (c == "afe") return afe_cmd();
        if (c == "constant") return constant_cmd();
        if (c == "moment") return moment_cmd({cfg_.X});
        if (c == "scan") return moment_cmd(cfg_.X_list.empty() ? std::vector<double>{cfg_.X} : cfg_.X_list);
        if (c == "diagnose") return diagnose_cmd();
        throw InvalidArgument("unknown command " + c);
    }

    bool failed() const { return failed_; }

private:
    const RunConfig& cfg_;
    std::ostream& err_;
    bool failed_ = false;

    NewformSpec spec_for(char which) const {
        const std::string& table = which == 'f' ? cfg_.table_f : cfg_.table_g;
        const std::string& curve = which == 'f' ? cfg_.curve_f : cfg_.curve_g;
        if (!table.empty()) {
            auto spec = eigen::load_table(table).table.spec();
            spec.source = eigen::TableSource{table};
            spec.label = table;
            return spec;
        }
        const auto e = eigen::parse_curve(curve);
        const int eta = which == 'f' ? cfg_.eta_f : cfg_.eta_g;
        auto spec = eigen::curve_form(e, eta, e.str());
        eigen::validate_spec(spec);
        const int local = eigen::fricke_eigenvalue(e);
        if (local != eta) {
            err_ << "warning: declared eta=" << eta << " for " << e.str() << " but the product of -a_p over p | N is "
                 << local << "\n";
        }
        return spec;
    }

    std::string cache_path(const NewformSpec& s) const {
        char name[96];
        std::snprintf(name, sizeof name, "k%d_q%lld_%016llx.tbl", s.weight, static_cast<long long>(s.level),
                      static_cast<unsigned long long>(eigen::fnv1a64(s.source_string())));
        return (fs::path(cfg_.cache_dir) / name).string();
    }

    std::pair<TablePtr, std::string> obtain(const NewformSpec& spec, i64 n) {
        eigen::BuildOptions opts;
        opts.workers = cfg_.workers;
        const bool cacheable = !cfg_.cache_dir.empty() && std::holds_alternative<eigen::CurveSource>(spec.source);
        if (!cacheable) return {std::make_shared<const EigenTable>(eigen::build_table(spec, n, opts)), "built"};

        std::error_code ec;
        fs::create_directories(cfg_.cache_dir, ec);
        if (ec) throw ResourceError("cannot create cache directory " + cfg_.cache_dir + ": " + ec.message());
        const std::string path = cache_path(spec);
        if (fs::exists(path)) {
            try {
                auto loaded = eigen::load_table(path, spec);
                if (!loaded.had_checksum) throw DataError(path + ": no checksum trailer");
                if (loaded.table.n_max() >= n) return {std::make_shared<const EigenTable>(std::move(loaded.table)), "cache-hit"};
                auto ext = eigen::build_table(spec, n, opts, &loaded.table);
                eigen::save_table(ext, path);
                err_ << "extended " << path << " from n=" << loaded.table.n_max() << " to n=" << n << "\n";
                return {std::make_shared<const EigenTable>(std::move(ext)), "extended"};
            } catch (const DataError& e) {
                err_ << "warning: discarding cache file (" << e.what() << "); rebuilding\n";
            } catch (const TableTooShort& e) {
                err_ << "warning: discarding truncated cache file (" << e.what() << "); rebuilding\n";
            }
        }
        auto built = eigen::build_table(spec, n, opts);
        eigen::save_table(built, path);
        return {std::make_shared<const EigenTable>(std::move(built)), "built"};
    }

    std::pair<TablePtr, TablePtr> forms(i64 n) {
        return {obtain(spec_for('f'), n).first, obtain(spec_for('g'), n).first};
    }

    std::vector<double> x_values() const {
        std::vector<double> xs = cfg_.X_list;
        xs.push_back(cfg_.X);
        return xs;
    }

    i64 moment_n(const NewformSpec& s, const std::vector<double>& xs) const {
        i64 n = cfg_.p_max;
        for (double X : xs) n = std::max(n, moments::required_table_n(X, s, {}, cfg_.M));
        return n;
    }

    Table eigen_cmd() {
        Table t{{"form", "label", "level", "eta", "n_max", "fnv1a64", "status"}, {}, {}};
        for (char w : {'f', 'g'}) {
            const auto spec = spec_for(w);
            const i64 n = cfg_.n_max > 0 ? cfg_.n_max : moment_n(spec, x_values());
            auto [table, status] = obtain(spec, n);
            t.rows.push_back({std::string(1, w), spec.label, static_cast<long long>(spec.level),
                              static_cast<long long>(spec.eta), static_cast<long long>(table->n_max()),
                              eigen::table_checksum(*table), status});
        }
        return t;
    }

    struct Outcome {
        bool pass;
        double metric;
        double threshold;
        std::string detail;
    };

    Outcome suite_partition() {
        double worst = 0.0;
        for (long long n = 1; n <= 100000; ++n) worst = std::max(worst, std::abs(kernels::partition_sum(n) - 1.0));
        return {worst < 1e-12, worst, 1e-12, "n <= 1e5"};
    }

    Outcome suite_gauss() {
        long long bad = 0, checked = 0;
        for (i64 n = 1; n <= 225; n += 2) {
            for (i64 ell = -7; ell <= 7; ell += 2) {
                for (int r = 0; r <= 5; ++r) {
                    ++checked;
                    if (!charsums::gauss_reduction_check(ell, n, r)) ++bad;
                }
            }
        }
        return {bad == 0, static_cast<double>(bad), 0.0, std::to_string(checked) + " triples"};
    }

    Outcome suite_poisson() {
        charsums::PoissonOptions opts;
        opts.flip_gauss_prefactor = cfg_.flip_gauss_prefactor;
        const auto J = kernels::j_default();
        double worst = 0.0;
        for (i64 n : {1, 3, 5, 9, 15}) {
            for (double X : {20.0, 100.0}) {
                const auto r = charsums::poisson_identity_1d(n, J, X, opts);
                worst = std::max(worst, std::abs(r.lhs - r.rhs));
            }
        }
        return {worst < 1e-6, worst, 1e-6, "n in {1,3,5,9,15}, X in {20,100}"};
    }

    Outcome suite_contour() {
        const auto spec = spec_for('f');
        const kernels::QuadSettings qs{cfg_.quad_T, cfg_.quad_nodes};
        double worst = 0.0;
        for (double y : {0.1, 1.0, 5.0}) {
            const double right = kernels::W_line(spec.weight, spec.level, y, 3.0, qs).real();
            const double left = kernels::W_residue_at_zero(spec.weight, spec.level, y) +
                                kernels::W_line(spec.weight, spec.level, y, -0.5, qs).real();
            worst = std::max(worst, std::abs(right - left));
        }
        const double y0 = 1e-5;
        const double gap = std::abs(kernels::W_eval(spec.weight, spec.level, y0, qs) -
                                    kernels::W_residue_at_zero(spec.weight, spec.level, y0));
        return {worst < 1e-9 && gap < 1e-3, worst, 1e-9, "small-y gap " + fmt(gap) + " (< 1e-3)"};
    }

    Outcome suite_appendix_a() {
        const i64 n = 100000;
        auto [f, g] = forms(n);
        const auto r = lseries::appendix_a_bounds(*f, *g, 1.5, n);
        return {r.violations == 0, static_cast<double>(r.violations), 0.0,
                "max |coefficient|/log p = " + fmt(r.max_ratio)};
    }

    Outcome suite_hecke() {
        auto [f, g] = forms(10000);
        double worst = 0.0;
        long long deligne = 0;
        for (const auto& t : {f, g}) {
            const auto r = eigen::check_hecke(*t, 10000);
            worst = std::max({worst, r.multiplicativity, r.recursion});
            deligne += r.deligne_violations;
        }
        return {worst < 1e-12 && deligne == 0, worst, 1e-12, std::to_string(deligne) + " Deligne violations"};
    }

    Table verify_cmd() {
        static const std::vector<std::string> all{"partition", "gauss", "poisson", "contour", "appendix-a", "hecke"};
        std::vector<std::string> chosen = cfg_.suites.empty() ? all : cfg_.suites;
        for (const auto& s : chosen) {
            if (std::find(all.begin(), all.end(), s) == all.end()) throw InvalidArgument("unknown suite '" + s + "'");
        }
        Table t{{"suite", "status", "metric", "threshold", "detail"}, {}, {}};
        for (const auto& s : chosen) {
            Outcome o{};
            if (s == "partition") o = suite_partition();
            else if (s == "gauss") o = suite_gauss();
            else if (s == "poisson") o = suite_poisson();
            else if (s == "contour") o = suite_contour();
            else if (s == "appendix-a") o = suite_appendix_a();
            else o = suite_hecke();
            if (!o.pass) failed_ = true;
            t.rows.push_back({s, std::string(o.pass ? "PASS" : "FAIL"), o.metric, o.threshold, o.detail});
        }
        return t;
    }

    Table gauss_cmd() {
        Table t{{"ell", "n", "re", "im", "reduction_ok"}, {}, {}};
        for (i64 n : cfg_.n_list) {
            if (n <= 0 || n % 2 == 0) throw InvalidArgument("gauss: n must be odd and positive");
            for (i64 ell : cfg_.ell_list) {
                const auto g = charsums::gauss_like(ell, n, cfg_.flip_gauss_prefactor);
                bool ok = true;
                if (ell % 2 != 0) {
                    for (int r = 0; r <= 5; ++r) ok = ok && charsums::gauss_reduction_check(ell, n, r);
                }
                if (!ok) failed_ = true;
                t.rows.push_back({static_cast<long long>(ell), static_cast<long long>(n), g.real(), g.imag(),
                                  std::string(ok ? "true" : "false")});
            }
        }
        return t;
    }

    Table poisson_cmd() {
        charsums::PoissonOptions opts;
        opts.flip_gauss_prefactor = cfg_.flip_gauss_prefactor;
        const auto J = kernels::j_default();
        Table t{{"n", "X", "lhs", "rhs", "rhs_imag", "abs_diff", "ell_max"}, {}, {}};
        const auto xs = cfg_.X_list.empty() ? std::vector<double>{20.0, 100.0} : cfg_.X_list;
        for (i64 n : cfg_.n_list) {
            for (double X : xs) {
                const auto r = charsums::poisson_identity_1d(n, J, X, opts);
                const double diff = std::abs(r.lhs - r.rhs);
                if (!(diff < 1e-6)) failed_ = true;
                t.rows.push_back({static_cast<long long>(n), X, r.lhs, r.rhs, r.rhs_imag, diff,
                                  static_cast<long long>(r.ell_max)});
            }
        }
        return t;
    }

    Table afe_cmd() {
        std::vector<i64> ds(cfg_.d_list.begin(), cfg_.d_list.end());
        const auto sf = spec_for('f');
        const auto sg = spec_for('g');
        if (ds.empty()) {
            for (i64 d = 1; ds.size() < 10; d += 2) {
                if (arith::is_squarefree(d) && arith::gcd(d, sf.level * sg.level) == 1) ds.push_back(d);
            }
        }
        i64 dmax = 1;
        for (i64 d : ds) {
            if (d <= 0 || d % 2 == 0 || !arith::is_squarefree(d)) throw InvalidArgument("afe: d must be odd, positive and squarefree");
            dmax = std::max(dmax, d);
        }
        const double M = cfg_.M > 0.0 ? cfg_.M : moments::default_cutoff(cfg_.X);
        const double Xeff = 4.0 * static_cast<double>(dmax);
        auto f = obtain(sf, moments::required_table_n(Xeff, sf, {}, M)).first;
        auto g = obtain(sg, moments::required_table_n(Xeff, sg, {}, M)).first;
        const arith::SieveTables sieve(static_cast<std::uint32_t>(8 * dmax));
        Table t{{"form", "d", "root_number", "prefactor", "derivative", "a_value", "b_value", "M"}, {}, {}};
        for (const auto& [name, table] : {std::pair{std::string("f"), f}, std::pair{std::string("g"), g}}) {
            const lseries::TwistAFE afe(table);
            for (i64 d : ds) {
                if (arith::gcd(d, table->spec().level) != 1) continue;
                const lseries::ChiTable chi(d, sieve);
                const double L = afe.derivative(d, chi);
                const double A = afe.a_value(d, chi, M);
                t.rows.push_back({name, static_cast<long long>(d),
                                  static_cast<long long>(lseries::twist_root_number(table->spec(), d)),
                                  static_cast<long long>(afe.prefactor(d)), L, A, L - A, M});
            }
        }
        return t;
    }

    Table constant_cmd() {
        auto [f, g] = forms(cfg_.p_max);
        const auto J = kernels::j_default();
        const auto r = lseries::c_fg(*f, *g, J, cfg_.p_max, cfg_.with_eps);
        Table t{{"quantity", "value", "half", "stabilization"}, {}, {}};
        auto add = [&](const std::string& name, double v, double h) {
            t.rows.push_back({name, v, h, std::abs(v - h)});
        };
        add("C_fg", r.value(), r.c_half);
        add("C_with_eps", r.c_with_eps, std::nan(""));
        add("C_without_eps", r.c_without_eps, std::nan(""));
        add("C_factored", r.c_factored, std::nan(""));
        add("Jtilde(1)", r.jtilde1, std::nan(""));
        add("sym2_L1(f)", r.sym2_f.value, r.sym2_f.half);
        add("sym2_L1(g)", r.sym2_g.value, r.sym2_g.half);
        add("rankin_L1(f,g)", r.rankin.value, r.rankin.half);
        for (std::size_t i = 0; i < 4; ++i) {
            add("eps[" + r.terms[i].name + "]", r.terms[i].eps, r.terms[i].eps);
            add("Z[" + r.terms[i].name + "]", r.z[i].value, r.z[i].half);
            add("Zstar[" + r.terms[i].name + "]", r.z_star[i].value, r.z_star[i].half);
        }
        // Closed-form local factors against the e_max truncation, odd p < 100.
        double gap = 0.0;
        for (i64 p = 3; p < 100; p += 2) {
            if (!arith::is_prime(p)) continue;
            for (const auto& Q : r.terms) {
                const int vq = lseries::v_p_of_q(Q, f->spec(), g->spec(), p);
                const bool bf = f->spec().is_bad(p), bg = g->spec().is_bad(p);
                const double dp = static_cast<double>(p);
                gap = std::max(gap, std::abs(lseries::zq_local((*f)[p], bf, (*g)[p], bg, dp, vq) -
                                             lseries::zq_local_truncated((*f)[p], bf, (*g)[p], bg, dp, vq, cfg_.e_max)));
            }
        }
        t.rows.push_back({std::string("zq_local_truncation_gap(emax=" + std::to_string(cfg_.e_max) + ")"), gap,
                          std::nan(""), std::nan("")});
        return t;
    }

    Table moment_cmd(std::vector<double> xs) {
        const auto sf = spec_for('f');
        const auto sg = spec_for('g');
        auto f = obtain(sf, moment_n(sf, xs)).first;
        auto g = obtain(sg, moment_n(sg, xs)).first;
        moments::MomentConfig mc;
        mc.X = xs.front();
        if (cfg_.M > 0.0) mc.M = cfg_.M;
        mc.f = f;
        mc.g = g;
        mc.p_max = cfg_.p_max;
        mc.with_eps = cfg_.with_eps;
        mc.workers = cfg_.workers;
        mc.deterministic = cfg_.deterministic;
        std::sort(xs.begin(), xs.end());
        std::vector<moments::MomentReport> reps;
        const auto C = lseries::c_fg_default(*f, *g, mc.J, mc.p_max, mc.with_eps);
        for (double X : xs) {
            auto c = mc;
            c.X = X;
            reps.push_back(moments::decomposition(c, &C));
        }
        Table t{{"X", "family_size", "lhs", "I_fg", "I_gf", "II", "III", "residual_rel", "C_fg", "predicted", "ratio"},
                {}, {}};
        for (const auto& r : reps) {
            t.rows.push_back({r.X, static_cast<long long>(r.family_size), r.lhs, r.I_fg, r.I_gf, r.II, r.III,
                              r.residual_rel, r.C_fg, r.predicted, r.ratio});
            if (!(r.residual_rel < 1e-9)) failed_ = true;
            t.notes.push_back("X=" + fmt(r.X) + " M=" + fmt(r.M) + " C_without_eps=" + fmt(r.C_without_eps) +
                              " C_half=" + fmt(r.C_half) + " max_n=" + std::to_string(r.max_n));
            err_ << "X=" << fmt(r.X) << " done in " << r.seconds << " s\n";
        }
        return t;
    }

    Table diagnose_cmd() {
        const std::vector<i64> grid{10, 100, 1000};
        auto f = obtain(spec_for('f'), 2 * grid.back()).first;
        const auto rows = moments::mean_value_diagnostic(*f, grid, grid, cfg_.t);
        Table t{{"over", "M", "N", "a", "t", "lhs", "shape", "ratio"}, {}, {}};
        for (const auto& r : rows) {
            t.rows.push_back({std::string(1, r.over), static_cast<long long>(r.M), static_cast<long long>(r.N),
                              static_cast<long long>(r.a), r.t, r.lhs, r.shape, r.ratio});
        }
        return t;
    }
};

void emit(const std::string& text, const RunConfig& cfg, std::ostream& out) {
    if (cfg.out.empty()) {
        out << text;
        return;
    }
    std::ofstream os(cfg.out, std::ios::binary | std::ios::trunc);
    if (!os) throw ResourceError("cannot write " + cfg.out);
    os << text;
    if (!os) throw ResourceError("write failed for " + cfg.out);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Moments of derivatives of quadratic-twist L-functions"};
    app.set_config("--config", "", "key=value settings file; flags override it");
    app.require_subcommand(1, 1);
    const std::vector<std::pair<std::string, std::string>> commands{
        {"eigen", "build and cache eigenvalue tables"},
        {"verify", "run the property suites"},
        {"gauss", "Gauss-type sums and their 2-power reduction"},
        {"poisson-check", "both sides of the Poisson identity"},
        {"afe", "central derivatives of twists"},
        {"constant", "the leading constant and its Euler products"},
        {"moment", "the moment and its decomposition at one X"},
        {"scan", "moment reports over an X list"},
        {"diagnose", "mean-value diagnostics"}};
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

    bool no_eps = false;
    app.add_option("--curve-f", cfg.curve_f, "a1,a2,a3,a4,a6 of the first curve")->capture_default_str();
    app.add_option("--curve-g", cfg.curve_g, "a1,a2,a3,a4,a6 of the second curve")->capture_default_str();
    app.add_option("--eta-f", cfg.eta_f, "Fricke eigenvalue of the first curve")->capture_default_str()->check(CLI::IsMember({-1, 1}));
    app.add_option("--eta-g", cfg.eta_g, "Fricke eigenvalue of the second curve")->capture_default_str()->check(CLI::IsMember({-1, 1}));
    app.add_option("--table-f", cfg.table_f, "eigenvalue table file for f");
    app.add_option("--table-g", cfg.table_g, "eigenvalue table file for g");
    app.add_option("--X", cfg.X, "family size parameter")->capture_default_str();
    app.add_option("--X-list", cfg.X_list, "comma-separated X values")->delimiter(',');
    app.add_option("--M", cfg.M, "cutoff; default X/(log X)^3");
    app.add_option("--pmax", cfg.p_max, "Euler product truncation")->capture_default_str();
    app.add_option("--emax", cfg.e_max, "local series truncation")->capture_default_str();
    app.add_option("--quad-T", cfg.quad_T, "contour half-height")->capture_default_str();
    app.add_option("--quad-nodes", cfg.quad_nodes, "contour nodes")->capture_default_str();
    app.add_option("--nmax", cfg.n_max, "eigen: table length");
    app.add_option("--d", cfg.d_list, "afe: comma-separated d")->delimiter(',');
    app.add_option("--n", cfg.n_list, "gauss/poisson-check: comma-separated odd n")->delimiter(',');
    app.add_option("--ell", cfg.ell_list, "gauss: comma-separated ell")->delimiter(',');
    app.add_option("--t", cfg.t, "diagnose: imaginary shift");
    app.add_flag("--without-eps", no_eps, "drop the sign weights from the constant");
    app.add_option("--workers", cfg.workers, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_flag("--deterministic", cfg.deterministic, "fixed-order reductions");
    app.add_option("--format", cfg.format, "csv or json")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", cfg.out, "output file; stdout when empty");
    app.add_option("--cache-dir", cfg.cache_dir, "eigenvalue table cache");
    app.add_option("--suite", cfg.suites, "verify: comma-separated suites")->delimiter(',');
    app.add_option("--seed", cfg.seed, "seed for sampled sweeps")->capture_default_str();
    app.add_flag("--flip-gauss-prefactor", cfg.flip_gauss_prefactor, "test fixture: wrong sign in G")->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfig;
    }
    cfg.with_eps = !no_eps;
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        if (cfg.X < 8.0) throw InvalidArgument("--X must be at least 8");
        Runner runner(cfg, err);
        const Table t = runner.dispatch();
        emit(cfg.format == "json" ? to_json(t, cfg) : to_csv(t, cfg), cfg, out);
        if (runner.failed()) {
            err << cfg.command << ": assertion failed\n";
            return kAssertion;
        }
        return kOk;
    } catch (const InvalidArgument& e) {
        err << "configuration error: " << e.what() << "\n";
        return kConfig;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kConfig;
    } catch (const TableTooShort& e) {
        err << "resource error: " << e.what() << "\n";
        return kResource;
    } catch (const ResourceError& e) {
        err << "resource error: " << e.what() << "\n";
        return kResource;
    } catch (const std::bad_alloc&) {
        err << "resource error: out of memory\n";
        return kResource;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kAssertion;
    }
}

}  // namespace twist::cli
