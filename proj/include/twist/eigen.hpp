#pragma once

// Normalized Hecke eigenvalue tables: from elliptic-curve point counts for
// weight 2, or ingested from coefficient files for general even weight.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace twist::eigen {

using i64 = std::int64_t;
using u64 = std::uint64_t;

struct Curve {
    i64 a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;

    i64 b2() const { return a1 * a1 + 4 * a2; }
    i64 b4() const { return 2 * a4 + a1 * a3; }
    i64 b6() const { return a3 * a3 + 4 * a6; }
    i64 b8() const { return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4; }
    i64 c4() const { return b2() * b2() - 24 * b4(); }
    i64 c6() const { return -b2() * b2() * b2() + 36 * b2() * b4() - 216 * b6(); }
    __int128 discriminant() const;
    std::string str() const;
};

/// "a1,a2,a3,a4,a6", optionally wrapped in brackets.
Curve parse_curve(std::string_view text);

/// Conductor of a curve with odd squarefree level (semistable, minimal at
/// every bad prime). Anything else is rejected with InvalidArgument.
i64 conductor(const Curve& e);

/// a_p = p + 1 − #E(F_p) by a quadratic-character sum over x. At a prime of
/// multiplicative reduction this equals p − #E_ns(F_p).
int ap_count(const Curve& e, i64 p, i64 limit = 1'000'000);

/// a_p by baby-step giant-step on the group order (good p ≥ 5 only).
int ap_bsgs(const Curve& e, i64 p);

struct CurveSource {
    Curve curve;
};

struct TableSource {
    std::string path;
};

struct NewformSpec {
    int weight = 2;
    i64 level = 1;
    int eta = 1;
    std::variant<CurveSource, TableSource> source;
    std::string label;

    /// i^k η, the root number of the form itself.
    int root_number() const { return ((weight / 2) % 2 == 0 ? 1 : -1) * eta; }
    bool is_bad(i64 p) const { return level % p == 0; }
    std::string source_string() const;
};

/// Checks the standing assumptions; throws InvalidArgument.
void validate_spec(const NewformSpec& spec);

NewformSpec curve_form(const Curve& e, int eta, std::string label = {});

/// Fricke eigenvalue of a semistable curve: ∏ over p | N of −a_p.
int fricke_eigenvalue(const Curve& e);

class EigenTable {
public:
    EigenTable() = default;
    EigenTable(NewformSpec spec, std::vector<double> lambda);

    const NewformSpec& spec() const noexcept { return spec_; }
    i64 n_max() const noexcept { return static_cast<i64>(lambda_.size()) - 1; }
    double operator[](i64 n) const { return lambda_[static_cast<std::size_t>(n)]; }
    double at(i64 n) const;
    const std::vector<double>& values() const noexcept { return lambda_; }

private:
    NewformSpec spec_;
    std::vector<double> lambda_;  // index 0 unused
};

struct BuildOptions {
    i64 naive_limit = 20000;  // character sums up to here, BSGS above
    int workers = 1;
};

/// λ(n) for n ≤ n_max from prime values, the Hecke recursion and
/// multiplicativity. A seed table donates its prime values.
EigenTable build_table(const NewformSpec& spec, i64 n_max, const BuildOptions& opts = {},
                       const EigenTable* seed = nullptr);

/// Table from an explicit rule for λ(p).
EigenTable table_from_primes(const NewformSpec& spec, i64 n_max,
                             const std::function<double(i64)>& lambda_p);

u64 fnv1a64(std::string_view data, u64 h = 14695981039346656037ULL);

std::string serialize_table(const EigenTable& table);
/// The fnv1a64 trailer serialize_table would write, as 16 hex digits.
std::string table_checksum(const EigenTable& table);
void save_table(const EigenTable& table, const std::string& path);

struct LoadedTable {
    EigenTable table;
    bool had_checksum = false;
    std::string source;
};

/// Reads a table file. `expect` (if given) must agree with the header;
/// `n_required` larger than the file contents raises TableTooShort.
LoadedTable load_table(const std::string& path, const std::optional<NewformSpec>& expect = {},
                       i64 n_required = 0);

struct HeckeReport {
    double multiplicativity = 0.0;
    double recursion = 0.0;
    i64 deligne_violations = 0;
    i64 pairs_checked = 0;
};

HeckeReport check_hecke(const EigenTable& table, i64 upto);

}  // namespace twist::eigen
