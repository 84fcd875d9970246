#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace twist::quad {

/// Nodes and weights of a composite rule on a real interval.
struct Rule {
    std::vector<double> x;
    std::vector<double> w;
    std::size_t size() const noexcept { return x.size(); }
};

inline constexpr int kPanelOrder = 20;

/// Composite 20-point Gauss–Legendre rule with `panels` equal panels on [a, b].
Rule gauss_panels(double a, double b, int panels);

/// Composite rule whose panel count is ceil(nodes / 20).
Rule gauss_nodes(double a, double b, int nodes);

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive Gauss–Kronrod (31 point) on [a, b], split at `breaks` and into
/// `min_pieces` equal pieces before adapting.
Estimate adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                  const std::vector<double>& breaks = {}, int min_pieces = 1);

struct ComplexEstimate {
    std::complex<double> value;
    double error = 0.0;
};

ComplexEstimate adaptive_complex(const std::function<std::complex<double>(double)>& f, double a,
                                 double b, double tol, const std::vector<double>& breaks = {},
                                 int min_pieces = 1);

}  // namespace twist::quad
