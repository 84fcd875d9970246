#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "twist/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    args.insert(args.begin(), "twistmom");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = twist::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) v.push_back(l);
    return v;
}

std::vector<std::string> data_rows(const std::string& s) {
    std::vector<std::string> v;
    for (const auto& l : lines_of(s)) {
        if (!l.empty() && l[0] != '#') v.push_back(l);
    }
    return v;
}

fs::path scratch(const std::string& tag) {
    auto p = fs::temp_directory_path() / ("twist_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("exit codes") {
    CHECK(call({"--help"}).code == 0);
    CHECK(call({}).code == 2);
    CHECK(call({"nonsense"}).code == 2);
    CHECK(call({"gauss", "--format", "xml"}).code == 2);
    CHECK(call({"moment", "--X", "2"}).code == 2);
    CHECK(call({"verify", "--suite", "nope"}).code == 2);
    CHECK(call({"gauss", "--n", "4"}).code == 2);
    CHECK(call({"afe", "--curve-f", "1,2"}).code == 2);
    const auto bad_write = call({"gauss", "--out", "/nonexistent_dir/x.csv"});
    CHECK(bad_write.code == 3);
}

TEST_CASE("CSV header, columns and JSON agreement") {
    const auto csv = call({"gauss", "--n", "3,15", "--ell", "1,3"});
    REQUIRE(csv.code == 0);
    const auto ls = lines_of(csv.out);
    REQUIRE(!ls.empty());
    CHECK(ls[0].rfind("# twistmom ", 0) == 0);
    bool saw_seed = false;
    for (const auto& l : ls) saw_seed = saw_seed || l == "# seed=20240601";
    CHECK(saw_seed);
    const auto rows = data_rows(csv.out);
    REQUIRE(rows.size() >= 2);

    const auto js = call({"gauss", "--n", "3,15", "--ell", "1,3", "--format", "json"});
    REQUIRE(js.code == 0);
    const auto j = nlohmann::json::parse(js.out);
    CHECK(j["artifact"] == "twistmom");
    REQUIRE(j["rows"].size() + 1 == rows.size());
    // Compare every numeric cell of the first data row.
    std::vector<std::string> cells;
    std::istringstream is(rows[1]);
    for (std::string c; std::getline(is, c, ',');) cells.push_back(c);
    const auto& r0 = j["rows"][0];
    const auto& cols = j["columns"];
    REQUIRE(cols.size() == cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& v = r0[cols[i].get<std::string>()];
        if (v.is_number()) CHECK(std::stod(cells[i]) == v.get<double>());
    }
}

TEST_CASE("poisson-check and the flipped fixture") {
    CHECK(call({"poisson-check", "--n", "3,5"}).code == 0);
    CHECK(call({"verify", "--suite", "poisson"}).code == 0);
    CHECK(call({"verify", "--suite", "poisson", "--flip-gauss-prefactor"}).code == 1);
    const auto two = call({"verify", "--suite", "gauss,hecke"});
    CHECK(two.code == 0);
    const auto rows = data_rows(two.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].rfind("gauss,", 0) == 0);
    CHECK(rows[2].rfind("hecke,", 0) == 0);
}

TEST_CASE("eigen cache: build, hit, extend, rebuild") {
    const auto dir = scratch("cache");
    const std::string d = dir.string();
    auto status_of = [](const Result& r) {
        std::vector<std::string> st;
        for (const auto& row : data_rows(r.out)) st.push_back(row.substr(row.rfind(',') + 1));
        return st;
    };
    const auto a = call({"eigen", "--nmax", "3000", "--cache-dir", d});
    REQUIRE(a.code == 0);
    CHECK(status_of(a) == std::vector<std::string>{"status", "built", "built"});
    const auto b = call({"eigen", "--nmax", "2000", "--cache-dir", d});
    CHECK(status_of(b) == std::vector<std::string>{"status", "cache-hit", "cache-hit"});
    const auto c = call({"eigen", "--nmax", "5000", "--cache-dir", d});
    CHECK(status_of(c) == std::vector<std::string>{"status", "extended", "extended"});

    for (const auto& e : fs::directory_iterator(dir)) {
        std::ofstream os(e.path(), std::ios::trunc);
        os << "garbage\n";
    }
    const auto r = call({"eigen", "--nmax", "3000", "--cache-dir", d});
    CHECK(r.code == 0);
    CHECK(status_of(r) == std::vector<std::string>{"status", "built", "built"});
    CHECK(r.err.find("warning") != std::string::npos);

    // The checksum column matches between a fresh build and the cache.
    const auto again = call({"eigen", "--nmax", "3000", "--cache-dir", d});
    const auto fresh = call({"eigen", "--nmax", "3000"});
    auto sum_col = [](const Result& x) {
        std::vector<std::string> v;
        for (const auto& row : data_rows(x.out)) {
            auto cut = row.substr(0, row.rfind(','));
            v.push_back(cut.substr(cut.rfind(',') + 1));
        }
        return v;
    };
    CHECK(sum_col(again) == sum_col(fresh));
    fs::remove_all(dir);
}

TEST_CASE("config file with flag override") {
    const auto dir = scratch("config");
    const auto path = dir / "run.ini";
    {
        std::ofstream os(path);
        os << "n=3,5\nell=1\nformat=json\n";
    }
    const auto from_file = call({"gauss", "--config", path.string()});
    REQUIRE(from_file.code == 0);
    const auto j = nlohmann::json::parse(from_file.out);
    CHECK(j["rows"].size() == 2);
    const auto overridden = call({"gauss", "--config", path.string(), "--format", "csv", "--n", "7"});
    REQUIRE(overridden.code == 0);
    CHECK(data_rows(overridden.out).size() == 2);
    CHECK(call({"gauss", "--config", (dir / "missing.ini").string()}).code == 2);
    fs::remove_all(dir);
}

TEST_CASE("moment output and determinism") {
    const auto dir = scratch("moment");
    const std::vector<std::string> base{"moment", "--X", "400", "--pmax", "10000", "--deterministic",
                                        "--cache-dir", dir.string()};
    const auto one = call(base);
    REQUIRE(one.code == 0);
    const auto rows = data_rows(one.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "X,family_size,lhs,I_fg,I_gf,II,III,residual_rel,C_fg,predicted,ratio");
    auto with_workers = base;
    with_workers.insert(with_workers.end(), {"--workers", "3"});
    const auto three = call(with_workers);
    REQUIRE(three.code == 0);
    CHECK(data_rows(three.out) == rows);
    CHECK(call(base).out == one.out);
    fs::remove_all(dir);
}

TEST_CASE("installed binary") {
    const char* bin = std::getenv("TWISTMOM");
    if (!bin) return;
    const std::string cmd = std::string(bin) + " gauss --n 3 --ell 1 > /dev/null";
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 0);
    const int bad = std::system((std::string(bin) + " gauss --n 4 2> /dev/null > /dev/null").c_str());
    CHECK(WEXITSTATUS(bad) == 2);
}
