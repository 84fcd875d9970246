#include "twist/eigen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "twist/arith.hpp"
#include "twist/errors.hpp"

namespace twist::eigen {

__int128 Curve::discriminant() const {
    const __int128 B2 = b2(), B4 = b4(), B6 = b6(), B8 = b8();
    return -B2 * B2 * B8 - 8 * B4 * B4 * B4 - 27 * B6 * B6 + 9 * B2 * B4 * B6;
}

std::string Curve::str() const {
    std::ostringstream os;
    os << '[' << a1 << ',' << a2 << ',' << a3 << ',' << a4 << ',' << a6 << ']';
    return os.str();
}

Curve parse_curve(std::string_view text) {
    std::string s;
    for (char c : text) {
        if (c != '[' && c != ']' && c != ' ') s.push_back(c);
    }
    std::vector<i64> v;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t comma = s.find(',', pos);
        const std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        i64 x = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
            throw InvalidArgument("curve: cannot parse coefficient '" + tok + "' in '" + std::string(text) + "'");
        }
        v.push_back(x);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (v.size() != 5) throw InvalidArgument("curve: expected five coefficients a1,a2,a3,a4,a6");
    return {v[0], v[1], v[2], v[3], v[4]};
}

i64 conductor(const Curve& e) {
    const __int128 disc = e.discriminant();
    if (disc == 0) throw InvalidArgument("curve " + e.str() + " is singular");
    const __int128 mag = disc < 0 ? -disc : disc;
    if (mag > static_cast<__int128>(INT64_MAX)) throw InvalidArgument("curve discriminant exceeds 64 bits");
    const i64 c4 = e.c4();
    i64 level = 1;
    for (const auto& [p, k] : arith::factorize(static_cast<i64>(mag))) {
        (void)k;
        if (c4 % p == 0) {
            throw InvalidArgument("curve " + e.str() + ": additive or non-minimal reduction at p=" +
                                  std::to_string(p) + " (only odd squarefree levels are supported)");
        }
        level *= p;
    }
    if (level % 2 == 0) throw InvalidArgument("curve " + e.str() + ": bad reduction at 2 (level must be odd)");
    return level;
}

namespace {

i64 mod(i64 a, i64 p) {
    a %= p;
    return a < 0 ? a + p : a;
}

int count_over_f2(const Curve& e) {
    int affine = 0;
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            const i64 lhs = y * y + e.a1 * x * y + e.a3 * y;
            const i64 rhs = x * x * x + e.a2 * x * x + e.a4 * x + e.a6;
            if (mod(lhs - rhs, 2) == 0) ++affine;
        }
    }
    return 3 - (affine + 1);
}

int character_sum_ap(const Curve& e, i64 p) {
    thread_local std::vector<std::int8_t> chi;
    chi.assign(static_cast<std::size_t>(p), -1);
    chi[0] = 0;
    i64 sq = 0;
    for (i64 y = 1; 2 * y <= p; ++y) {
        sq += 2 * y - 1;  // y² incrementally
        if (sq >= p) sq %= p;
        chi[static_cast<std::size_t>(sq)] = 1;
    }
    // (2y + a1x + a3)² = 4x³ + b2x² + 2b4x + b6, walked by forward differences.
    i64 v = mod(e.b6(), p);
    i64 d1 = mod(4 + e.b2() + 2 * e.b4(), p);
    i64 d2 = mod(24 + 2 * e.b2(), p);
    const i64 d3 = mod(24, p);
    i64 sum = 0;
    for (i64 x = 0; x < p; ++x) {
        sum += chi[static_cast<std::size_t>(v)];
        v += d1;
        if (v >= p) v -= p;
        d1 += d2;
        if (d1 >= p) d1 -= p;
        d2 += d3;
        if (d2 >= p) d2 -= p;
    }
    return static_cast<int>(-sum);
}

struct Pt {
    u64 x = 0;
    u64 y = 0;
    bool inf = true;
};

class ShortCurve {
public:
    ShortCurve(u64 p, u64 a, u64 b) : p_(p), a_(a), b_(b) {}

    u64 inv(u64 v) const {
        i64 t = 0, nt = 1, r = static_cast<i64>(p_), nr = static_cast<i64>(v);
        while (nr != 0) {
            const i64 q = r / nr;
            t = std::exchange(nt, t - q * nt);
            r = std::exchange(nr, r - q * nr);
        }
        return static_cast<u64>(t < 0 ? t + static_cast<i64>(p_) : t);
    }

    Pt add(const Pt& P, const Pt& Q) const {
        if (P.inf) return Q;
        if (Q.inf) return P;
        u64 lam;
        if (P.x == Q.x) {
            if ((P.y + Q.y) % p_ == 0) return {};
            lam = (3 * (P.x * P.x % p_) + a_) % p_ * inv(2 * P.y % p_) % p_;
        } else {
            lam = (Q.y + p_ - P.y) % p_ * inv((Q.x + p_ - P.x) % p_) % p_;
        }
        const u64 x3 = (lam * lam % p_ + 2 * p_ - P.x - Q.x) % p_;
        const u64 y3 = (lam * ((P.x + p_ - x3) % p_) % p_ + p_ - P.y) % p_;
        return {x3, y3, false};
    }

    Pt neg(const Pt& P) const { return P.inf ? P : Pt{P.x, (p_ - P.y) % p_, false}; }

    Pt mul(u64 k, Pt P) const {
        Pt R;
        while (k != 0) {
            if (k & 1U) R = add(R, P);
            P = add(P, P);
            k >>= 1U;
        }
        return R;
    }

    template <class Rng>
    Pt random_point(Rng& rng) const {
        for (;;) {
            const u64 x = rng() % p_;
            const u64 rhs = ((x * x % p_ + a_) % p_ * x + b_) % p_;
            if (rhs == 0) return {x, 0, false};
            if (arith::powmod(rhs, (p_ - 1) / 2, p_) != 1) continue;
            return {x, sqrt_mod(rhs), false};
        }
    }

    u64 p() const noexcept { return p_; }

private:
    u64 sqrt_mod(u64 n) const {
        const u64 p = p_;
        if (p % 4 == 3) return arith::powmod(n, (p + 1) / 4, p);
        u64 q = p - 1;
        int s = 0;
        while ((q & 1U) == 0) {
            q >>= 1U;
            ++s;
        }
        u64 z = 2;
        while (arith::powmod(z, (p - 1) / 2, p) != p - 1) ++z;
        u64 c = arith::powmod(z, q, p);
        u64 r = arith::powmod(n, (q + 1) / 2, p);
        u64 t = arith::powmod(n, q, p);
        int m = s;
        while (t != 1) {
            int i = 1;
            u64 t2 = t * t % p;
            while (t2 != 1) {
                t2 = t2 * t2 % p;
                ++i;
            }
            u64 b = c;
            for (int j = 0; j < m - i - 1; ++j) b = b * b % p;
            r = r * b % p;
            c = b * b % p;
            t = t * c % p;
            m = i;
        }
        return r;
    }

    u64 p_, a_, b_;
};

struct SplitMix {
    u64 state;
    u64 operator()() {
        u64 z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31U);
    }
};

u64 point_order(const ShortCurve& E, const Pt& P, u64 multiple) {
    u64 ord = multiple;
    for (const auto& [r, k] : arith::factorize(static_cast<i64>(multiple))) {
        (void)k;
        const u64 ur = static_cast<u64>(r);
        while (ord % ur == 0 && E.mul(ord / ur, P).inf) ord /= ur;
    }
    return ord;
}

// The unique N in the Hasse interval with N·P = O for enough random P.
std::optional<u64> group_order(const ShortCurve& E, u64 salt) {
    const u64 p = E.p();
    u64 w = static_cast<u64>(std::sqrt(4.0 * static_cast<double>(p)));
    while (w * w > 4 * p) --w;
    while ((w + 1) * (w + 1) <= 4 * p) ++w;
    const u64 lo = p + 1 - w;
    const u64 hi = p + 1 + w;
    const u64 width = hi - lo + 1;
    u64 m = static_cast<u64>(std::ceil(std::sqrt(static_cast<double>(width))));
    SplitMix rng{p * 0x2545F4914F6CDD1DULL + salt};
    u64 l = 1;
    std::unordered_map<u64, u64> baby;
    for (int attempt = 0; attempt < 12; ++attempt) {
        const Pt P = E.random_point(rng);
        baby.clear();
        baby.reserve(m);
        Pt jp = P;
        for (u64 j = 1; j < m; ++j) {
            if (!jp.inf) baby.emplace(jp.x * p + jp.y, j);
            jp = E.add(jp, P);
        }
        const Pt step = E.mul(m, P);
        Pt R = E.mul(lo, P);
        u64 found = 0;
        for (u64 i = 0; i * m <= width + m; ++i) {
            if (R.inf) {
                found = lo + i * m;
                break;
            }
            const Pt T = E.neg(R);
            auto it = baby.find(T.x * p + T.y);
            if (it != baby.end()) {
                found = lo + i * m + it->second;
                break;
            }
            R = E.add(R, step);
        }
        if (found == 0) continue;
        const u64 ord = point_order(E, P, found);
        l = std::lcm(l, ord);
        const u64 first = (lo + l - 1) / l * l;
        if (first <= hi && first + l > hi) return first;
    }
    return std::nullopt;
}

}  // namespace

int ap_count(const Curve& e, i64 p, i64 limit) {
    if (!arith::is_prime(p)) throw InvalidArgument("ap_count: p must be prime");
    if (p > limit) throw InvalidArgument("ap_count: p exceeds the point-counting limit");
    if (p == 2) {
        if (e.discriminant() % 2 == 0) throw InvalidArgument("ap_count: bad reduction at 2 is not supported");
        return count_over_f2(e);
    }
    return character_sum_ap(e, p);
}

int ap_bsgs(const Curve& e, i64 p) {
    if (p < 5 || !arith::is_prime(p)) throw InvalidArgument("ap_bsgs: p must be a prime ≥ 5");
    if (p > (i64{1} << 31)) throw InvalidArgument("ap_bsgs: p too large");
    const u64 up = static_cast<u64>(p);
    const u64 a = static_cast<u64>(mod(mod(-27, p) * mod(e.c4(), p), p));
    const u64 b = static_cast<u64>(mod(mod(-54, p) * mod(e.c6(), p), p));
    if ((4 * arith::powmod(a, 3, up) + 27 * (b * b % up)) % up == 0) {
        throw InvalidArgument("ap_bsgs: bad reduction at p=" + std::to_string(p));
    }
    if (auto n = group_order(ShortCurve(up, a, b), 1)) return static_cast<int>(static_cast<i64>(up + 1) - static_cast<i64>(*n));
    u64 g = 2;
    while (arith::powmod(g, (up - 1) / 2, up) != up - 1) ++g;
    const u64 g2 = g * g % up;
    const ShortCurve twist(up, a * g2 % up, b * (g2 * g % up) % up);
    if (auto nt = group_order(twist, 2)) {
        return static_cast<int>(static_cast<i64>(*nt) - static_cast<i64>(up + 1));
    }
    return character_sum_ap(e, p);
}

std::string NewformSpec::source_string() const {
    if (const auto* c = std::get_if<CurveSource>(&source)) return "curve=" + c->curve.str();
    return "table=" + std::get<TableSource>(source).path;
}

void validate_spec(const NewformSpec& spec) {
    if (spec.weight < 2 || spec.weight % 2 != 0) throw InvalidArgument("newform: weight must be even and ≥ 2");
    if (spec.level < 1 || spec.level % 2 == 0) throw InvalidArgument("newform: level must be odd and positive");
    if (spec.eta != 1 && spec.eta != -1) throw InvalidArgument("newform: Fricke eigenvalue must be ±1");
    if (const auto* c = std::get_if<CurveSource>(&spec.source)) {
        if (spec.weight != 2) throw InvalidArgument("newform: curve sources have weight 2");
        const i64 n = conductor(c->curve);
        if (n != spec.level) {
            throw DataError("newform: curve " + c->curve.str() + " has conductor " + std::to_string(n) +
                            ", declared level " + std::to_string(spec.level));
        }
    }
}

NewformSpec curve_form(const Curve& e, int eta, std::string label) {
    NewformSpec s;
    s.weight = 2;
    s.level = conductor(e);
    s.eta = eta;
    s.source = CurveSource{e};
    s.label = label.empty() ? e.str() : std::move(label);
    return s;
}

int fricke_eigenvalue(const Curve& e) {
    int eta = 1;
    for (const auto& [p, k] : arith::factorize(conductor(e))) {
        (void)k;
        eta *= -ap_count(e, p);
    }
    return eta;
}

EigenTable::EigenTable(NewformSpec spec, std::vector<double> lambda)
    : spec_(std::move(spec)), lambda_(std::move(lambda)) {}

double EigenTable::at(i64 n) const {
    if (n < 1 || n > n_max()) {
        throw TableTooShort("eigen table for " + spec_.label + " covers n ≤ " + std::to_string(n_max()) +
                                ", needed n = " + std::to_string(n),
                            n);
    }
    return lambda_[static_cast<std::size_t>(n)];
}

namespace {

std::vector<double> extend_multiplicatively(const NewformSpec& spec, i64 n_max,
                                            const std::vector<double>& lambda_prime) {
    // lambda_prime is indexed by n and filled at primes only.
    std::vector<double> lam(static_cast<std::size_t>(n_max) + 1, 0.0);
    lam[1] = 1.0;
    if (n_max < 2) return lam;
    const arith::SieveTables sieve(static_cast<std::uint32_t>(std::max<i64>(n_max, 2)));
    for (i64 n = 2; n <= n_max; ++n) {
        const i64 p = sieve.spf(static_cast<std::uint32_t>(n));
        i64 m = n;
        while (m % p == 0) m /= p;
        if (m == 1) {
            if (n == p) {
                lam[n] = lambda_prime[n];
            } else if (spec.is_bad(p)) {
                lam[n] = lam[p] * lam[n / p];
            } else {
                lam[n] = lam[p] * lam[n / p] - lam[n / p / p];
            }
        } else {
            lam[n] = lam[n / m] * lam[m];
        }
    }
    return lam;
}

}  // namespace

EigenTable table_from_primes(const NewformSpec& spec, i64 n_max,
                             const std::function<double(i64)>& lambda_p) {
    if (n_max < 1) throw InvalidArgument("table: n_max must be positive");
    std::vector<double> lp(static_cast<std::size_t>(n_max) + 1, 0.0);
    if (n_max >= 2) {
        const arith::SieveTables sieve(static_cast<std::uint32_t>(n_max));
        for (std::uint32_t p : sieve.primes()) lp[p] = lambda_p(p);
    }
    return EigenTable(spec, extend_multiplicatively(spec, n_max, lp));
}

EigenTable build_table(const NewformSpec& spec, i64 n_max, const BuildOptions& opts,
                       const EigenTable* seed) {
    validate_spec(spec);
    if (n_max < 1) throw InvalidArgument("build_table: n_max must be positive");

    if (const auto* ts = std::get_if<TableSource>(&spec.source)) {
        auto loaded = load_table(ts->path, spec, n_max);
        const auto& file = loaded.table;
        auto rebuilt = table_from_primes(spec, n_max, [&](i64 p) { return file[p]; });
        for (i64 n = 1; n <= n_max; ++n) {
            if (std::abs(rebuilt[n] - file[n]) > 1e-9 * std::max(1.0, std::abs(file[n]))) {
                throw DataError("table " + ts->path + " violates the Hecke relations at n=" + std::to_string(n));
            }
        }
        return rebuilt;
    }

    const Curve& e = std::get<CurveSource>(spec.source).curve;
    std::vector<double> lp(static_cast<std::size_t>(n_max) + 1, 0.0);
    if (n_max >= 2) {
        const arith::SieveTables sieve(static_cast<std::uint32_t>(n_max));
        const auto& primes = sieve.primes();
        const double half_wt = 0.5 * (spec.weight - 1);
        auto work = [&](std::size_t start, std::size_t stride) {
            for (std::size_t i = start; i < primes.size(); i += stride) {
                const i64 p = primes[i];
                int ap = 0;
                if (seed != nullptr && p <= seed->n_max()) {
                    ap = static_cast<int>(std::lround((*seed)[p] * std::pow(static_cast<double>(p), half_wt)));
                } else if (p <= opts.naive_limit || p < 5 || spec.is_bad(p)) {
                    ap = ap_count(e, p, std::max<i64>(p, opts.naive_limit));
                } else {
                    ap = ap_bsgs(e, p);
                }
                lp[static_cast<std::size_t>(p)] = ap / std::pow(static_cast<double>(p), half_wt);
            }
        };
        const int workers = std::max(1, opts.workers);
        if (workers == 1) {
            work(0, 1);
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(work, static_cast<std::size_t>(w), static_cast<std::size_t>(workers));
            for (auto& t : pool) t.join();
        }
    }
    return EigenTable(spec, extend_multiplicatively(spec, n_max, lp));
}

u64 fnv1a64(std::string_view data, u64 h) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

std::string header_line(const NewformSpec& s, i64 n_max) {
    return "# newform k=" + std::to_string(s.weight) + " q=" + std::to_string(s.level) +
           " eta=" + (s.eta > 0 ? std::string("+1") : std::string("-1")) + " nmax=" + std::to_string(n_max);
}

std::string data_line(i64 n, double v) {
    char buf[64];
    const int len = std::snprintf(buf, sizeof buf, "%lld,%.17g\n", static_cast<long long>(n), v);
    return std::string(buf, static_cast<std::size_t>(len));
}

std::string hex64(u64 h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

std::string serialize_table(const EigenTable& table) {
    std::string out = header_line(table.spec(), table.n_max()) + "\n";
    out += "# source " + table.spec().source_string() + "\n";
    u64 h = fnv1a64("");
    for (i64 n = 1; n <= table.n_max(); ++n) {
        const std::string line = data_line(n, table[n]);
        h = fnv1a64(line, h);
        out += line;
    }
    out += "# fnv1a64=" + hex64(h) + "\n";
    return out;
}

std::string table_checksum(const EigenTable& table) {
    u64 h = fnv1a64("");
    for (i64 n = 1; n <= table.n_max(); ++n) h = fnv1a64(data_line(n, table[n]), h);
    return hex64(h);
}

void save_table(const EigenTable& table, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw ResourceError("cannot write table file " + tmp);
        os << serialize_table(table);
        if (!os) throw ResourceError("write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw ResourceError("cannot move table into " + path);
}

LoadedTable load_table(const std::string& path, const std::optional<NewformSpec>& expect, i64 n_required) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open table file " + path);
    std::string line;
    if (!std::getline(is, line)) throw DataError(path + ": empty file");
    NewformSpec spec;
    long long k = 0, q = 0, nmax = 0;
    int eta = 0;
    if (std::sscanf(line.c_str(), "# newform k=%lld q=%lld eta=%d nmax=%lld", &k, &q, &eta, &nmax) != 4) {
        throw DataError(path + ": malformed header '" + line + "'");
    }
    spec.weight = static_cast<int>(k);
    spec.level = q;
    spec.eta = eta;
    spec.source = TableSource{path};
    spec.label = path;
    if (expect) {
        if (expect->weight != spec.weight || expect->level != spec.level || expect->eta != spec.eta) {
            throw DataError(path + ": header " + header_line(spec, nmax) + " disagrees with the requested newform");
        }
        spec.label = expect->label.empty() ? path : expect->label;
        spec.source = expect->source;
    }

    LoadedTable out;
    std::vector<double> lam{0.0};
    lam.reserve(static_cast<std::size_t>(std::max<long long>(nmax, 0)) + 1);
    u64 h = fnv1a64("");
    std::string checksum;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# fnv1a64=", 0) == 0) checksum = line.substr(10);
            if (line.rfind("# source ", 0) == 0) out.source = line.substr(9);
            continue;
        }
        const auto comma = line.find(',');
        long long n = 0;
        double v = 0.0;
        const char* end = line.data() + line.size();
        auto r1 = std::from_chars(line.data(), line.data() + (comma == std::string::npos ? 0 : comma), n);
        auto r2 = comma == std::string::npos ? std::from_chars_result{end, std::errc::invalid_argument}
                                             : std::from_chars(line.data() + comma + 1, end, v);
        if (comma == std::string::npos || r1.ec != std::errc() || r2.ec != std::errc() || r2.ptr != end ||
            n != static_cast<long long>(lam.size())) {
            throw DataError(path + ": malformed or out-of-order row '" + line + "' (last good n = " +
                            std::to_string(lam.size() - 1) + ")");
        }
        h = fnv1a64(line + "\n", h);
        lam.push_back(v);
    }
    const i64 rows = static_cast<i64>(lam.size()) - 1;
    if (!checksum.empty()) {
        out.had_checksum = true;
        if (checksum != hex64(h)) throw DataError(path + ": checksum mismatch");
    }
    if (rows < 1 || std::abs(lam[1] - 1.0) > 1e-15) throw DataError(path + ": λ(1) must equal 1");
    const i64 need = std::max<i64>(n_required, 0);
    if (rows < nmax || rows < need) {
        const i64 want = std::max<i64>(need, nmax);
        throw TableTooShort(path + ": table ends at last good n = " + std::to_string(rows) + ", need n = " +
                                std::to_string(want),
                            want);
    }
    if (need > 0 && need < rows) lam.resize(static_cast<std::size_t>(need) + 1);
    out.table = EigenTable(spec, std::move(lam));
    return out;
}

HeckeReport check_hecke(const EigenTable& table, i64 upto) {
    HeckeReport rep;
    upto = std::min(upto, table.n_max());
    const auto& spec = table.spec();
    for (i64 m = 2; m <= upto; ++m) {
        for (i64 n = m + 1; n * m <= upto; ++n) {
            if (std::gcd(m, n) != 1) continue;
            rep.multiplicativity = std::max(rep.multiplicativity, std::abs(table[m * n] - table[m] * table[n]));
            ++rep.pairs_checked;
        }
    }
    const arith::SieveTables sieve(static_cast<std::uint32_t>(std::max<i64>(table.n_max(), 2)));
    for (std::uint32_t up : sieve.primes()) {
        const i64 p = up;
        if (p > table.n_max()) break;
        if (!spec.is_bad(p) && std::abs(table[p]) > 2.0 + 1e-12) ++rep.deligne_violations;
        if (p > upto) continue;
        i64 prev2 = 1, prev = p;
        while (prev <= upto / p) {
            const i64 next = prev * p;
            const double expect = spec.is_bad(p) ? table[p] * table[prev] : table[p] * table[prev] - table[prev2];
            rep.recursion = std::max(rep.recursion, std::abs(table[next] - expect));
            prev2 = prev;
            prev = next;
        }
    }
    return rep;
}

}  // namespace twist::eigen
