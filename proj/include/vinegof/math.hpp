#pragma once

// Small numerical toolbox: normal/t/chi-square distribution helpers,
// fixed-order Gauss-Legendre nodes, adaptive Simpson quadrature, a
// safeguarded scalar root bracket, Debye function, and rank statistics.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "vinegof/errors.hpp"

namespace vinegof::math {

inline constexpr double pi = 3.14159265358979323846;

inline double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

inline double std_normal_logpdf(double x) {
    return -0.5 * x * x - 0.5 * std::log(2.0 * pi);
}

// Wichura's AS241 (PPND16) quantile of the standard normal.
inline double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("std_normal_quantile: p outside (0,1)");
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r + 6.7265770927008700853e4) * r +
                    4.5921953931549871457e4) * r + 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                  1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r + 3.9307895800092710610e4) * r +
                    2.1213794301586595867e4) * r + 5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                  4.2313330701600911252e1) * r + 1.0);
    }
    r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
                   1.27045825245236838258e0) * r + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                 4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
                   1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                 2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
                   2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                 5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
                   7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                 5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -val : val;
}

inline double student_t_cdf(double x, double nu) {
    boost::math::students_t dist(nu);
    return boost::math::cdf(dist, x);
}

inline double student_t_quantile(double p, double nu) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("student_t_quantile: p outside (0,1)");
    boost::math::students_t dist(nu);
    return boost::math::quantile(dist, p);
}

inline double student_t_logpdf(double x, double nu) {
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * pi)
           - 0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

inline double chi_squared_cdf(double x, double dof) {
    if (x <= 0.0) return 0.0;
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(dist, x);
}

inline double chi_squared_upper_tail(double x, double dof) {
    if (x <= 0.0) return 1.0;
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, x));
}

// 64-point Gauss-Legendre rule on [0,1], generated once via Newton iteration
// on the Legendre polynomial.
struct GaussLegendre64 {
    std::array<double, 64> node{};
    std::array<double, 64> weight{};

    GaussLegendre64() {
        constexpr int n = 64;
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(pi * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
                }
                pp = n * (x * p0 - p1) / (x * x - 1.0);
                const double dx = p0 / pp;
                x -= dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            const double w = 2.0 / ((1.0 - x * x) * pp * pp);
            node[i] = 0.5 * (1.0 - x);
            node[n - 1 - i] = 0.5 * (1.0 + x);
            weight[i] = 0.5 * w;
            weight[n - 1 - i] = 0.5 * w;
        }
    }
};

inline const GaussLegendre64& gl64() {
    static const GaussLegendre64 rule;
    return rule;
}

// Integrate f over [a,b] with the 64-point rule.
template <class F>
double integrate_gl64(F&& f, double a, double b) {
    const auto& rule = gl64();
    double sum = 0.0;
    for (int i = 0; i < 64; ++i) sum += rule.weight[i] * f(a + (b - a) * rule.node[i]);
    return (b - a) * sum;
}

namespace detail {
template <class F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm, double fb, double whole,
                            double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
} // namespace detail

template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-12, int max_depth = 40) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Debye function of order one, D1(x) = (1/x) * int_0^x t/(e^t - 1) dt, x > 0.
inline double debye1(double x) {
    if (x <= 0.0) throw DomainError("debye1: x must be positive");
    auto integrand = [](double t) { return t <= 1e-12 ? 1.0 - 0.5 * t : t / std::expm1(t); };
    return integrate_gl64(integrand, 0.0, x) / x;
}

// Safeguarded root search for monotone increasing g on (lo, hi): Newton steps
// from the derivative when available, bisection otherwise. g(lo) < 0 < g(hi)
// is assumed after bracketing.
template <class G>
double solve_monotone(G&& g, double lo, double hi, double tol, int max_iter, const char* what) {
    double flo = g(lo);
    double fhi = g(hi);
    if (flo > 0.0 || fhi < 0.0) throw ConvergenceError(std::string(what) + ": root not bracketed");
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < max_iter; ++it) {
        const double fx = g(x);
        if (std::fabs(fx) < tol) return x;
        if (fx > 0.0) hi = x; else lo = x;
        x = 0.5 * (lo + hi);
        if (hi - lo < 1e-16) return x;
    }
    throw ConvergenceError(std::string(what) + ": no convergence after max iterations");
}

// Kendall's tau via Knight's O(n log n) algorithm (no-tie fast path with a
// concordance correction for ties, which are measure-zero for copula data).
inline double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw DomainError("kendall_tau: need two samples of equal length >= 2");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[idx[i]];

    // merge sort counting inversions in ys
    std::vector<double> buf(n);
    std::uint64_t swaps = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
            const std::size_t mid = lo + width;
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (ys[j] < ys[i]) {
                    swaps += mid - i;
                    buf[k++] = ys[j++];
                } else {
                    buf[k++] = ys[i++];
                }
            }
            while (i < mid) buf[k++] = ys[i++];
            while (j < hi) buf[k++] = ys[j++];
            std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
                      ys.begin() + static_cast<std::ptrdiff_t>(lo));
        }
    }
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    return (pairs - 2.0 * static_cast<double>(swaps)) / pairs;
}

inline std::vector<double> ranks(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[idx[i]] = static_cast<double>(i + 1);
    return r;
}

inline double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw DomainError("spearman_rho: need two samples of equal length >= 2");
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double mean = 0.5 * static_cast<double>(n + 1);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mean) * (ry[i] - mean);
        sxx += (rx[i] - mean) * (rx[i] - mean);
        syy += (ry[i] - mean) * (ry[i] - mean);
    }
    return sxy / std::sqrt(sxx * syy);
}

// Classical one-sample Kolmogorov statistic against U(0,1) and the asymptotic
// critical value; used by Monte Carlo checks, not by the GOF statistics.
inline double ks_uniform_statistic(std::vector<double> z) {
    std::sort(z.begin(), z.end());
    const std::size_t n = z.size();
    double d = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double hi = static_cast<double>(t + 1) / static_cast<double>(n) - z[t];
        const double lo = z[t] - static_cast<double>(t) / static_cast<double>(n);
        d = std::max({d, hi, lo});
    }
    return d;
}

inline double ks_critical_value(double alpha, std::size_t n) {
    // Kolmogorov distribution quantile via the standard series inversion.
    const double target = 1.0 - alpha;
    double lo = 0.2, hi = 3.0;
    auto kolmogorov_cdf = [](double x) {
        double s = 0.0;
        for (int k = 1; k <= 100; ++k) {
            const double term = std::exp(-2.0 * k * k * x * x);
            s += (k % 2 == 1 ? term : -term);
            if (term < 1e-16) break;
        }
        return 1.0 - 2.0 * s;
    };
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (lo + hi);
        if (kolmogorov_cdf(m) < target) lo = m; else hi = m;
    }
    return 0.5 * (lo + hi) / std::sqrt(static_cast<double>(n));
}

} // namespace vinegof::math
