#pragma once

// Univariate AD/CvM/KS statistics against a reference cdf, the empirical
// copula, the empirical-copula-process statistics (against a simulated
// surrogate of the fitted copula, and against the independence copula on PIT
// output), and the hybrid p-value combiner.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "vinegof/errors.hpp"
#include "vinegof/rvine_eval.hpp"

namespace vinegof {

enum class UniStatKind { ad, cvm, ks };

// The empirical distribution function used by KS/CvM carries the 1/(n+1)
// normalization; the AD statistic uses the classical sorted-sample closed
// form (the 1/(n+1) variant has a divergent tail weight integral).
inline double uni_stat(UniStatKind kind, const Eigen::VectorXd& s,
                       const std::function<double(double)>& null_cdf) {
    const int n = static_cast<int>(s.size());
    if (n < 1) throw DomainError("uni_stat: empty sample");
    std::vector<double> z(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        z[static_cast<std::size_t>(t)] = null_cdf(s[t]);
        if (!(z[static_cast<std::size_t>(t)] >= 0.0 && z[static_cast<std::size_t>(t)] <= 1.0))
            throw DomainError("uni_stat: reference cdf value outside [0,1]");
    }
    std::sort(z.begin(), z.end());

    switch (kind) {
        case UniStatKind::ks: {
            double dmax = 0.0;
            for (int t = 0; t <= n; ++t) {
                const double f = static_cast<double>(t) / (n + 1);
                const double lo = t == 0 ? 0.0 : z[static_cast<std::size_t>(t - 1)];
                const double hi = t == n ? 1.0 : z[static_cast<std::size_t>(t)];
                dmax = std::max({dmax, std::fabs(f - lo), std::fabs(f - hi)});
            }
            return dmax;
        }
        case UniStatKind::cvm: {
            double acc = 0.0;
            for (int t = 0; t <= n; ++t) {
                const double c = static_cast<double>(t) / (n + 1);
                const double a = t == 0 ? 0.0 : z[static_cast<std::size_t>(t - 1)];
                const double b = t == n ? 1.0 : z[static_cast<std::size_t>(t)];
                const double ca = c - a, cb = c - b;
                acc += (ca * ca * ca - cb * cb * cb) / 3.0;
            }
            return n * acc;
        }
        case UniStatKind::ad: {
            double acc = 0.0;
            for (int t = 0; t < n; ++t) {
                const double zt = z[static_cast<std::size_t>(t)];
                const double zrev = z[static_cast<std::size_t>(n - 1 - t)];
                if (zt <= 0.0 || zt >= 1.0 || zrev <= 0.0 || zrev >= 1.0)
                    throw DomainError("uni_stat(ad): reference cdf value on the boundary");
                acc += (2.0 * t + 1.0) * (std::log(zt) + std::log1p(-zrev));
            }
            return -n - acc / n;
        }
    }
    throw DomainError("uni_stat: unknown kind");
}

// Empirical copula with 1/(n+1) normalization.
inline double empirical_copula(const SampleMatrix& sample, const std::vector<double>& point) {
    const int n = sample.n();
    const int d = sample.d();
    if (static_cast<int>(point.size()) != d) throw DomainError("empirical_copula: point dimension mismatch");
    for (double x : point)
        if (!(x >= 0.0 && x <= 1.0)) throw DomainError("empirical_copula: point outside [0,1]^d");
    long count = 0;
    for (int t = 0; t < n; ++t) {
        bool dominated = true;
        for (int c = 0; c < d; ++c)
            if (sample.u(t, c) > point[static_cast<std::size_t>(c)]) {
                dominated = false;
                break;
            }
        count += dominated;
    }
    return static_cast<double>(count) / (n + 1);
}

enum class EcpKind { ecp_mcvm, ecp_mks, ecp2_mcvm, ecp2_mks };

namespace stats_detail {

// evaluate an empirical copula of `sample` at every row of `points`
inline std::vector<double> emp_copula_at_rows(const Eigen::MatrixXd& sample, const Eigen::MatrixXd& points) {
    const int n = static_cast<int>(sample.rows());
    const int m = static_cast<int>(points.rows());
    const int d = static_cast<int>(sample.cols());
    std::vector<double> out(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        long count = 0;
        for (int t = 0; t < n; ++t) {
            bool dominated = true;
            for (int c = 0; c < d; ++c)
                if (sample(t, c) > points(j, c)) {
                    dominated = false;
                    break;
                }
            count += dominated;
        }
        out[static_cast<std::size_t>(j)] = static_cast<double>(count) / (n + 1);
    }
    return out;
}

inline double reduce(EcpKind kind, std::vector<double>& diffs) {
    const bool cvm = kind == EcpKind::ecp_mcvm || kind == EcpKind::ecp2_mcvm;
    if (cvm) {
        for (double& v : diffs) v *= v;
        std::sort(diffs.begin(), diffs.end());
        double acc = 0.0;
        for (double v : diffs) acc += v;
        return acc;  // n * integral against the empirical measure (atoms 1/n)
    }
    double dmax = 0.0;
    for (double v : diffs) dmax = std::max(dmax, std::fabs(v));
    return dmax;
}

} // namespace stats_detail

// Distance between the empirical copula of the data and a simulated
// surrogate of the fitted copula, evaluated at the data points. The
// surrogate sample (approx_n rows) replaces the fitted cdf, which has no
// closed form for a vine.
inline double ecp_stat(EcpKind kind, const SampleMatrix& data, const RVineSpec& fitted, int approx_n,
                       std::uint64_t seed, std::uint64_t stream = 0) {
    if (kind != EcpKind::ecp_mcvm && kind != EcpKind::ecp_mks) throw DomainError("ecp_stat: wrong kind");
    if (approx_n < 1) throw DomainError("ecp_stat: approx_n must be positive");
    const SampleMatrix surrogate = simulate(fitted, approx_n, seed, stream);
    const auto lhs = stats_detail::emp_copula_at_rows(data.u, data.u);
    const auto rhs = stats_detail::emp_copula_at_rows(surrogate.u, data.u);
    std::vector<double> diffs(lhs.size());
    for (std::size_t j = 0; j < lhs.size(); ++j) diffs[j] = lhs[j] - rhs[j];
    return stats_detail::reduce(kind, diffs);
}

// Distance between the empirical copula of PIT output and the independence
// copula, evaluated at the PIT points.
inline double ecp2_stat(EcpKind kind, const Eigen::MatrixXd& y) {
    if (kind != EcpKind::ecp2_mcvm && kind != EcpKind::ecp2_mks) throw DomainError("ecp2_stat: wrong kind");
    const int n = static_cast<int>(y.rows());
    const int d = static_cast<int>(y.cols());
    if (n < 1 || d < 1) throw DomainError("ecp2_stat: empty PIT matrix");
    const auto lhs = stats_detail::emp_copula_at_rows(y, y);
    std::vector<double> diffs(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        double indep = 1.0;
        for (int c = 0; c < d; ++c) indep *= y(j, c);
        diffs[static_cast<std::size_t>(j)] = lhs[static_cast<std::size_t>(j)] - indep;
    }
    return stats_detail::reduce(kind, diffs);
}

// p_hybrid = min(1, m * min(p_1, ..., p_m))
inline double hybrid_pvalue(const std::vector<double>& pvals) {
    if (pvals.empty()) throw DomainError("hybrid_pvalue: need at least one p-value");
    double pmin = 1.0;
    for (double p : pvals) {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("hybrid_pvalue: p-value outside [0,1]");
        pmin = std::min(pmin, p);
    }
    return std::min(1.0, static_cast<double>(pvals.size()) * pmin);
}

} // namespace vinegof
