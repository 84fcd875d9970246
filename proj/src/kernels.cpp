#include "twist/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "twist/errors.hpp"
#include "twist/special.hpp"

namespace twist::kernels {

using special::kPi;

double bump_g(double x) {
    if (x < 0.75 || x > 2.0) return 0.0;
    if (x < 1.0) {
        const double u = x - 0.75;
        return std::exp(16.0 - 1.0 / (u * u));
    }
    if (x <= 1.5) return 1.0;
    return 1.0 - bump_g(0.5 * x);
}

double bump_v(double x) { return bump_g(0.5 * x) + bump_g(x) + bump_g(2.0 * x); }

double bump_v1(double x) {
    return bump_g(4.0 * x) + bump_g(2.0 * x) + bump_g(x) + bump_g(0.5 * x) + bump_g(0.25 * x);
}

double partition_sum(long long n) {
    double acc = 0.0;
    const double x = static_cast<double>(n);
    for (double N = 1.0; N <= 2.0 * x; N *= 2.0) acc += bump_v(x / N) * bump_g(x / N);
    return acc;
}

double j_bump(double x) {
    if (x <= 0.5 || x >= 2.0) return 0.0;
    return std::exp(-1.0 / ((x - 0.5) * (2.0 - x)));
}

TestFunction TestFunction::scaled(double c) const {
    TestFunction out = *this;
    auto inner = f;
    out.f = [inner, c](double x) { return c * inner(x); };
    out.name = name + "*" + std::to_string(c);
    return out;
}

TestFunction j_default() { return {"J_default", j_bump, 0.5, 2.0, {}}; }

TestFunction g_function() { return {"G", bump_g, 0.75, 2.0, {1.0, 1.5}}; }

namespace {

double max_difference(const TestFunction& tf, int order, double h) {
    // Binomial central difference of the given order at step h.
    static const double kBinom[5][5] = {
        {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
    double worst = 0.0;
    const int samples = 3000;
    for (int i = 0; i <= samples; ++i) {
        const double x = tf.lo + (tf.hi - tf.lo) * (i + 0.37) / (samples + 1);
        double acc = 0.0;
        for (int j = 0; j <= order; ++j) {
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            acc += sign * kBinom[order][j] * tf(x + (0.5 * order - j) * h);
        }
        worst = std::max(worst, std::abs(acc) / std::pow(h, order));
    }
    return worst;
}

}  // namespace

void validate_test_function(const TestFunction& tf) {
    if (!tf.f) throw InvalidArgument("test function: no evaluation rule");
    if (tf.lo < 0.5 - 1e-12 || tf.hi > 2.0 + 1e-12 || !(tf.hi > tf.lo)) {
        throw InvalidArgument("test function '" + tf.name + "': support must lie in [1/2, 2]");
    }
    double peak = 0.0;
    const int samples = 4000;
    for (int i = 0; i <= samples; ++i) {
        const double x = tf.lo + (tf.hi - tf.lo) * i / samples;
        const double v = tf.f(x);
        if (!std::isfinite(v) || v < 0.0) {
            throw InvalidArgument("test function '" + tf.name + "': negative or non-finite value at x=" +
                                  std::to_string(x));
        }
        peak = std::max(peak, v);
    }
    if (peak == 0.0) throw InvalidArgument("test function '" + tf.name + "': identically zero");
    if (std::abs(tf.f(tf.lo)) > 1e-12 * peak || std::abs(tf.f(tf.hi)) > 1e-12 * peak) {
        throw InvalidArgument("test function '" + tf.name + "': does not vanish at the support ends");
    }
    // A jump in the (k-1)-th derivative makes the k-th difference quotient
    // grow like 1/h; smooth functions give h-stable quotients.
    for (int order = 1; order <= 4; ++order) {
        const double coarse = max_difference(tf, order, 2e-3);
        const double fine = max_difference(tf, order, 1e-3);
        if (fine > 1.5 * coarse + 1e-6 * peak) {
            throw InvalidArgument("test function '" + tf.name + "': fails smoothness gate at order " +
                                  std::to_string(order));
        }
    }
}

quad::ComplexEstimate mellin(const TestFunction& tf, cplx s, double tol) {
    const cplx sm1 = s - 1.0;
    const int pieces = 1 + static_cast<int>(std::abs(s.imag()) * std::log(tf.hi / tf.lo) / 4.0);
    return quad::adaptive_complex(
        [&](double x) {
            const double v = tf(x);
            return v == 0.0 ? cplx(0.0) : v * std::exp(sm1 * std::log(x));
        },
        tf.lo, tf.hi, tol, tf.breaks, pieces);
}

cplx mellin_checked(const TestFunction& tf, cplx s, double tol) {
    const auto e = mellin(tf, s, tol);
    if (!(e.error <= tol)) throw QuadratureError("mellin: tolerance not reached", e.error);
    return e.value;
}

double fourier_type(const TestFunction& tf, double t, double tol) {
    const double omega = 2.0 * kPi * t;
    const int pieces = 1 + static_cast<int>(std::ceil(std::abs(t) * (tf.hi - tf.lo)));
    return quad::adaptive(
               [&](double x) { return (std::cos(omega * x) + std::sin(omega * x)) * tf(x); }, tf.lo,
               tf.hi, tol, tf.breaks, pieces)
        .value;
}

cplx fourier_type_weighted(const TestFunction& tf, cplx w, double t, int sigma, int log_power,
                           double tol) {
    const double omega = 2.0 * kPi * std::abs(t);
    const double sg = sigma >= 0 ? 1.0 : -1.0;
    const int pieces = 1 + static_cast<int>(std::ceil(std::abs(t) * (tf.hi - tf.lo)));
    return quad::adaptive_complex(
               [&](double x) {
                   const double v = tf(x);
                   if (v == 0.0) return cplx(0.0);
                   const double lx = std::log(x);
                   cplx r = v * (std::cos(omega * x) + sg * std::sin(omega * x)) * std::exp(w * lx);
                   for (int m = 0; m < log_power; ++m) r *= lx;
                   return r;
               },
               tf.lo, tf.hi, tol, tf.breaks, pieces)
        .value;
}

cplx H_eval(int k, long long q, cplx w) {
    const cplx a = w + 0.5 * k;
    const double m = std::round(-a.real());
    if (m >= 0.0 && std::abs(a + m) < 1e-8) {
        throw InvalidArgument("H_eval: w is within 1e-8 of a pole of Γ(w + k/2)");
    }
    const double half_k = 0.5 * k;
    return std::exp(special::lgamma(a) - special::lgamma(cplx(half_k)) -
                    w * std::log(2.0 * kPi / std::sqrt(static_cast<double>(q))));
}

namespace {

cplx w_integrand(double half_k, double lg_half_k, double log_z, cplx u) {
    return std::exp(special::lgamma(u + half_k) - lg_half_k - u * log_z) / (u * u);
}

double z_of(long long q, double y) { return 2.0 * kPi * y / std::sqrt(static_cast<double>(q)); }

// (1/π)∫_0^T Re(integrand) on the line Re u = c.
double half_line(int k, double z, double c, const QuadSettings& qs) {
    const double half_k = 0.5 * k;
    const double lg = std::lgamma(half_k);
    const double log_z = std::log(z);
    const auto rule = quad::gauss_nodes(0.0, qs.T, std::max(qs.nodes / 2, quad::kPanelOrder));
    double acc = 0.0;
    for (std::size_t j = 0; j < rule.size(); ++j) {
        acc += rule.w[j] * w_integrand(half_k, lg, log_z, cplx(c, rule.x[j])).real();
    }
    return acc / kPi;
}

double w_of_z(int k, double z, const QuadSettings& qs) {
    if (!(z > 0.0)) throw InvalidArgument("W: argument must be positive");
    if (z >= 1.0) return half_line(k, z, 3.0, qs);
    // Shift past the double pole at u = 0 to avoid the z^{-3} cancellation.
    return special::digamma(0.5 * k) - std::log(z) + half_line(k, z, -0.5, qs);
}

}  // namespace

cplx W_line(int k, long long q, double y, double c, const QuadSettings& qs) {
    if (!(y > 0.0)) throw InvalidArgument("W_line: y must be positive");
    const double half_k = 0.5 * k;
    const double lg = std::lgamma(half_k);
    const double log_z = std::log(z_of(q, y));
    const auto rule = quad::gauss_nodes(-qs.T, qs.T, qs.nodes);
    cplx acc = 0.0;
    for (std::size_t j = 0; j < rule.size(); ++j) {
        acc += rule.w[j] * w_integrand(half_k, lg, log_z, cplx(c, rule.x[j]));
    }
    return acc / (2.0 * kPi);
}

double W_residue_at_zero(int k, long long q, double y) {
    return special::digamma(0.5 * k) - std::log(z_of(q, y));
}

double W_eval(int k, long long q, double y, const QuadSettings& qs) {
    if (!(y > 0.0)) throw InvalidArgument("W_eval: y must be positive");
    return w_of_z(k, z_of(q, y), qs);
}

WKernel::WKernel(int k, long long q, const QuadSettings& qs)
    : k_(k), q_(q), z_per_y_(2.0 * kPi / std::sqrt(static_cast<double>(q))), qs_(qs) {
    constexpr int n = kDegree + 1;
    coef_.resize(kMaxExp - kMinExp);
    std::array<double, n> vals{};
    for (int p = kMinExp; p < kMaxExp; ++p) {
        const double base = std::ldexp(1.0, p);
        for (int j = 0; j < n; ++j) {
            const double t = std::cos(kPi * (j + 0.5) / n);
            vals[j] = w_of_z(k, base * (1.5 + 0.5 * t), qs);
        }
        auto& c = coef_[p - kMinExp];
        for (int m = 0; m < n; ++m) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += vals[j] * std::cos(kPi * m * (j + 0.5) / n);
            c[m] = 2.0 * acc / n;
        }
        c[0] *= 0.5;
    }
}

double WKernel::at_z(double z) const {
    int e = 0;
    const double m = std::frexp(z, &e);
    const int p = e - 1;
    if (p < kMinExp || p >= kMaxExp) return w_of_z(k_, z, qs_);
    const auto& c = coef_[p - kMinExp];
    const double t = 4.0 * m - 3.0;
    const double t2 = 2.0 * t;
    double b1 = 0.0;
    double b2 = 0.0;
    for (int j = kDegree; j >= 1; --j) {
        const double b0 = c[j] + t2 * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return c[0] + t * b1 - b2;
}

void WKernel::at_z_many(const double* z, double* out, std::size_t n) const {
    while (n > 0) {
        const std::size_t len = std::min(n, kBatch);
        std::array<const double*, kBatch> c{};
        std::array<double, kBatch> t{}, b1{}, b2{};
        std::size_t off = 0;  // points outside the table are done one at a time
        for (std::size_t i = 0; i < len; ++i) {
            int e = 0;
            const double m = std::frexp(z[i], &e);
            const int p = e - 1;
            if (p < kMinExp || p >= kMaxExp) {
                c[i] = nullptr;
                ++off;
                continue;
            }
            c[i] = coef_[p - kMinExp].data();
            t[i] = 4.0 * m - 3.0;
        }
        if (off == 0) {
            for (int j = kDegree; j >= 1; --j) {
                for (std::size_t i = 0; i < len; ++i) {
                    const double b0 = c[i][j] + 2.0 * t[i] * b1[i] - b2[i];
                    b2[i] = b1[i];
                    b1[i] = b0;
                }
            }
            for (std::size_t i = 0; i < len; ++i) out[i] = c[i][0] + t[i] * b1[i] - b2[i];
        } else {
            for (std::size_t i = 0; i < len; ++i) out[i] = at_z(z[i]);
        }
        z += len;
        out += len;
        n -= len;
    }
}

std::shared_ptr<const WKernel> shared_w_kernel(int k, long long q) {
    static std::mutex mu;
    static std::map<std::pair<int, long long>, std::shared_ptr<const WKernel>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{k, q}];
    if (!slot) slot = std::make_shared<const WKernel>(k, q);
    return slot;
}

FourierTypeContour::FourierTypeContour(const TestFunction& tf, cplx w, const ContourSettings& cs,
                                       int log_power)
    : symmetric_(w.imag() == 0.0) {
    const int panels = std::max(1, static_cast<int>(std::ceil(cs.T / cs.panel_width)));
    const auto rule = symmetric_ ? quad::gauss_panels(0.0, cs.T, panels)
                                 : quad::gauss_panels(-cs.T, cs.T, 2 * panels);
    tau_ = rule.x;
    weight_ = rule.w;
    const std::size_t n = tau_.size();
    s_.resize(n);
    plus_.resize(n);
    minus_.resize(n);

    // Mellin values J̃(1 + w − s) = ∫ J(x) x^{w − ε} x^{-iτ} (log x)^m dx,
    // with the x-grid refined band by band as the oscillation grows.
    std::vector<double> cuts{tf.lo};
    for (double b : tf.breaks) {
        if (b > tf.lo && b < tf.hi) cuts.push_back(b);
    }
    cuts.push_back(tf.hi);
    std::sort(cuts.begin(), cuts.end());

    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < n; ++j) order[j] = j;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::abs(tau_[a]) < std::abs(tau_[b]); });

    const double band = 50.0;
    std::size_t pos = 0;
    while (pos < n) {
        const double band_hi = (std::floor(std::abs(tau_[order[pos]]) / band) + 1.0) * band;
        std::vector<double> lx;
        std::vector<cplx> cx;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double a = cuts[i];
            const double b = cuts[i + 1];
            const int xp = 16 + static_cast<int>(std::ceil(band_hi * (b - a) / (20.0 * a)));
            const auto xr = quad::gauss_panels(a, b, xp);
            for (std::size_t j = 0; j < xr.size(); ++j) {
                const double v = tf(xr.x[j]);
                if (v == 0.0) continue;
                const double l = std::log(xr.x[j]);
                cplx c = xr.w[j] * v * std::exp((w - cs.eps) * l);
                for (int m = 0; m < log_power; ++m) c *= l;
                lx.push_back(l);
                cx.push_back(c);
            }
        }
        while (pos < n && std::abs(tau_[order[pos]]) < band_hi) {
            const std::size_t j = order[pos++];
            const double tau = tau_[j];
            cplx acc = 0.0;
            for (std::size_t i = 0; i < lx.size(); ++i) acc += cx[i] * std::polar(1.0, -tau * lx[i]);
            const cplx s(cs.eps, tau);
            s_[j] = s;
            plus_[j] = acc * special::gamma_cos_sin(s, +1);
            minus_[j] = acc * special::gamma_cos_sin(s, -1);
        }
    }
}

cplx FourierTypeContour::operator()(double t, int sigma) const {
    if (t == 0.0) throw InvalidArgument("J_check_w: t = 0 is outside the contour representation");
    const double log_scale = std::log(2.0 * kPi * std::abs(t));
    const auto& g = sigma >= 0 ? plus_ : minus_;
    cplx acc = 0.0;
    for (std::size_t j = 0; j < tau_.size(); ++j) {
        const cplx term = weight_[j] * g[j] * std::exp(-s_[j] * log_scale);
        acc += term;
    }
    if (symmetric_) return acc.real() / kPi;
    return acc / (2.0 * kPi);
}

cplx J_check_w(const TestFunction& tf, cplx w, double t, int sigma, const ContourSettings& cs) {
    return FourierTypeContour(tf, w, cs)(t, sigma);
}

}  // namespace twist::kernels
