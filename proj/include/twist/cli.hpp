#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace twist::cli {

enum ExitCode : int { kOk = 0, kAssertion = 1, kConfig = 2, kResource = 3 };

struct RunConfig {
    std::string command;
    std::string curve_f = "[0,-1,1,-10,-20]";
    std::string curve_g = "[1,1,1,-10,-10]";
    std::string table_f;
    std::string table_g;
    int eta_f = -1;  // declared Fricke eigenvalues of curve sources
    int eta_g = -1;
    double X = 2000.0;
    std::vector<double> X_list;
    double M = 0.0;  // 0: X/(log X)^3
    long long p_max = 100000;
    int e_max = 12;
    double quad_T = 40.0;
    int quad_nodes = 2000;
    long long n_max = 0;  // eigen: 0 picks the size the X range needs
    std::vector<long long> d_list;
    std::vector<long long> n_list{1, 3, 5, 9, 15};
    std::vector<long long> ell_list{1, 3, 5, 7};
    double t = 0.0;
    bool with_eps = true;
    int workers = 1;
    bool deterministic = false;
    std::string format = "csv";
    std::string out;
    std::string cache_dir;
    std::vector<std::string> suites;
    bool flip_gauss_prefactor = false;
    unsigned long long seed = 20240601;

    /// Resolved settings as ordered key=value pairs for output headers.
    std::vector<std::pair<std::string, std::string>> echo() const;
};

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> notes;  // trailing comment lines
};

std::string to_csv(const Table& t, const RunConfig& cfg);
std::string to_json(const Table& t, const RunConfig& cfg);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace twist::cli
