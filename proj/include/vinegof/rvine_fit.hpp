#pragma once

// Parameter estimation with fixed structure and families: tree-by-tree
// inversion of empirical Kendall's tau for starting values, then joint
// quasi-Newton maximum likelihood on link-transformed parameters.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "vinegof/errors.hpp"
#include "vinegof/math.hpp"
#include "vinegof/rvine.hpp"
#include "vinegof/rvine_eval.hpp"

namespace vinegof {

namespace fit_detail {

// parameter clamped into the open domain before the unconstrained transform
inline double clamp_for_link(Family f, int index, double x) {
    switch (f) {
        case Family::gauss: return std::clamp(x, -1.0 + 1e-10, 1.0 - 1e-10);
        case Family::student_t:
            return index == 0 ? std::clamp(x, -1.0 + 1e-10, 1.0 - 1e-10) : std::clamp(x, 2.0 + 1e-8, 30.0 - 1e-8);
        case Family::clayton: return std::max(x, 1e-10);
        case Family::gumbel:
        case Family::joe: return std::max(x, 1.0 + 1e-10);
        case Family::frank: return x;
        case Family::independence: break;
    }
    throw DomainError("clamp_for_link: family has no parameters");
}

inline double to_unconstrained(Family f, int index, double x) {
    x = clamp_for_link(f, index, x);
    switch (f) {
        case Family::gauss: return std::atanh(x);
        case Family::student_t: {
            if (index == 0) return std::atanh(x);
            const double z = (x - 2.0) / 28.0;
            return std::log(z / (1.0 - z));
        }
        case Family::clayton: return std::log(x);
        case Family::gumbel:
        case Family::joe: return std::log(x - 1.0);
        case Family::frank: return x;
        case Family::independence: break;
    }
    throw DomainError("to_unconstrained: family has no parameters");
}

inline double from_unconstrained(Family f, int index, double e) {
    switch (f) {
        case Family::gauss: return std::tanh(e);
        case Family::student_t: {
            if (index == 0) return std::tanh(e);
            return 2.0 + 28.0 / (1.0 + std::exp(-e));
        }
        case Family::clayton: return std::exp(e);
        case Family::gumbel:
        case Family::joe: return 1.0 + std::exp(e);
        case Family::frank: return e;
        case Family::independence: break;
    }
    throw DomainError("from_unconstrained: family has no parameters");
}

struct LinkMap {
    std::vector<Family> family;
    std::vector<int> index;

    static LinkMap of(const RVineSpec& spec) {
        LinkMap lm;
        const int d = spec.dim();
        for (int i = 0; i < d - 1; ++i)
            for (int k = d - 1; k > i; --k) {
                const auto& pc = spec.pair(k, i);
                for (int j = 0; j < param_count(pc.family); ++j) {
                    lm.family.push_back(pc.family);
                    lm.index.push_back(j);
                }
            }
        return lm;
    }

    Eigen::VectorXd encode(const Eigen::VectorXd& theta) const {
        Eigen::VectorXd eta(theta.size());
        for (Eigen::Index j = 0; j < theta.size(); ++j)
            eta[j] = to_unconstrained(family[static_cast<std::size_t>(j)], index[static_cast<std::size_t>(j)], theta[j]);
        return eta;
    }
    Eigen::VectorXd decode(const Eigen::VectorXd& eta) const {
        Eigen::VectorXd theta(eta.size());
        for (Eigen::Index j = 0; j < eta.size(); ++j)
            theta[j] = from_unconstrained(family[static_cast<std::size_t>(j)], index[static_cast<std::size_t>(j)], eta[j]);
        return theta;
    }
};

// empirical tau clamped into the family's invertible range; used by the
// engine-facing sequential fit so bootstrap replications never abort on a
// borderline draw
inline double clamp_tau(Family f, Rotation rot, double tau) {
    const bool flip = rot == Rotation::r90 || rot == Rotation::r270;
    double t = flip ? -tau : tau;
    switch (f) {
        case Family::gauss:
        case Family::student_t: t = std::clamp(t, -0.995, 0.995); break;
        case Family::clayton: t = std::clamp(t, 1e-4, 0.95); break;
        case Family::gumbel: t = std::clamp(t, 1e-4, 0.95); break;
        case Family::joe: t = std::clamp(t, 1e-4, 0.93); break;
        case Family::frank: {
            t = std::clamp(t, -0.92, 0.92);
            if (std::fabs(t) < 1e-5) t = t < 0.0 ? -1e-5 : 1e-5;
            break;
        }
        case Family::independence: t = 0.0; break;
    }
    return t;
}

inline double profile_student_nu(const std::vector<double>& a, const std::vector<double>& b, double rho) {
    // golden-section maximization of the pair log-likelihood in nu
    auto ll = [&](double nu) {
        PairCopulaSpec s{Family::student_t, Rotation::r0, {rho, nu}};
        double total = 0.0;
        for (std::size_t t = 0; t < a.size(); ++t) total += pair_logpdf(s, a[t], b[t]);
        return total;
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = 2.05, hi = 29.95;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = ll(x1), f2 = ll(x2);
    for (int it = 0; it < 40; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = ll(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = ll(x1);
        }
    }
    return 0.5 * (lo + hi);
}

// Shared implementation of the tree-by-tree fit; `strict` raises DomainError
// when an empirical tau leaves the family's attainable range, otherwise the
// tau is clamped.
inline RVineSpec sequential_impl(const RVineSpec& structure, const SampleMatrix& data, bool strict) {
    const EvalPlan plan = build_plan(structure);
    const int d = plan.d;
    const int n = data.n();
    if (data.d() != d) throw DomainError("fit_sequential: data dimension mismatch");
    const int p = structure.param_count();
    if (strict && n < 10 * p)
        throw DomainError("fit_sequential: need n >= 10 p (" + std::to_string(10 * p) + " rows)");

    RVineSpec out = structure;
    const std::size_t nsz = static_cast<std::size_t>(n);
    std::vector<std::vector<double>> vdir(static_cast<std::size_t>(d) * static_cast<std::size_t>(d)),
        vind(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
    auto col = [&](std::vector<std::vector<double>>& m, int k, int i) -> std::vector<double>& {
        return m[static_cast<std::size_t>(k * d + i)];
    };
    for (int c = 0; c < d; ++c) {
        auto& v = col(vdir, d - 1, c);
        v.resize(nsz);
        for (int t = 0; t < n; ++t) v[static_cast<std::size_t>(t)] = data.u(t, plan.data_col[static_cast<std::size_t>(c)]);
    }
    for (int i = d - 2; i >= 0; --i) {
        for (int k = d - 1; k > i; --k) {
            const std::size_t cell = static_cast<std::size_t>(k * d + i);
            const auto& z1 = col(vdir, k, i);
            const auto& z2 = plan.z2_dir[cell] ? col(vdir, k, plan.z2_col[cell]) : col(vind, k, plan.z2_col[cell]);
            PairCopulaSpec& pc = out.pair(k, i);
            if (pc.family != Family::independence) {
                const double tau_hat = math::kendall_tau(z2, z1);
                const bool flip = pc.rotation == Rotation::r90 || pc.rotation == Rotation::r270;
                const double base_tau = flip ? -tau_hat : tau_hat;
                double tau_use;
                if (strict) {
                    tau_use = base_tau;
                } else {
                    tau_use = clamp_tau(pc.family, Rotation::r0, base_tau);
                }
                std::vector<double> params;
                try {
                    params = tau_to_param(pc.family, tau_use);
                } catch (const DomainError& e) {
                    throw DomainError("fit_sequential: tree " + std::to_string(d - k) + ", edge (" +
                                      std::to_string(structure.matrix(k, i)) + "," +
                                      std::to_string(structure.matrix.diag(i)) + "): " + e.what());
                }
                if (pc.family == Family::student_t) params[1] = profile_student_nu(z2, z1, params[0]);
                pc.params = std::move(params);
            }
            if (plan.need_dir[cell] || plan.need_ind[cell]) {
                auto& od = col(vdir, k - 1, i);
                auto& oi = col(vind, k - 1, i);
                if (plan.need_dir[cell]) od.resize(nsz);
                if (plan.need_ind[cell]) oi.resize(nsz);
                for (int t = 0; t < n; ++t) {
                    const std::size_t ts = static_cast<std::size_t>(t);
                    if (plan.need_dir[cell]) od[ts] = pc_detail::clamp_unit(hfunc1(pc, z2[ts], z1[ts]));
                    if (plan.need_ind[cell]) oi[ts] = pc_detail::clamp_unit(hfunc2(pc, z2[ts], z1[ts]));
                }
            }
        }
    }
    return out;
}

} // namespace fit_detail

// Tree-by-tree estimation by inverting the empirical Kendall tau of each
// cell's pseudo-observations. Throws DomainError when a tau is unattainable
// for the cell's family.
inline RVineSpec fit_sequential(const RVineSpec& structure, const SampleMatrix& data) {
    return fit_detail::sequential_impl(structure, data, true);
}

// Engine-facing variant that clamps borderline taus instead of throwing;
// used for starting values inside bootstrap replications.
inline RVineSpec fit_sequential_clamped(const RVineSpec& structure, const SampleMatrix& data) {
    return fit_detail::sequential_impl(structure, data, false);
}

struct MleOptions {
    int max_iter = 500;
    double grad_tol = 1e-5;
    double rel_tol = 1e-9;
};

struct FitResult {
    RVineSpec spec;
    double loglik = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Joint BFGS maximization of the vine log-likelihood over all free
// parameters mapped to the unconstrained scale; gradients by central finite
// differences. Returns the best point found, flagged non-converged after
// max_iter iterations.
inline FitResult fit_mle(const RVineSpec& start, const SampleMatrix& data, const MleOptions& opts = {}) {
    const EvalPlan plan = build_plan(start);
    const int p = start.param_count();
    FitResult res;
    res.spec = start;
    if (p == 0) {
        res.loglik = 0.0;
        res.converged = true;
        return res;
    }
    const auto lm = fit_detail::LinkMap::of(start);
    const double neg_inf = -std::numeric_limits<double>::infinity();

    auto objective = [&](const Eigen::VectorXd& eta) -> double {
        try {
            return loglik(with_params(start, lm.decode(eta)), data, &plan).total;
        } catch (const NumericalError&) {
            return neg_inf;
        }
    };
    auto gradient = [&](const Eigen::VectorXd& eta) {
        Eigen::VectorXd g(p);
        const double scale = std::cbrt(std::numeric_limits<double>::epsilon());
        for (int j = 0; j < p; ++j) {
            const double h = scale * std::max(1.0, std::fabs(eta[j]));
            Eigen::VectorXd ep = eta, em = eta;
            ep[j] += h;
            em[j] -= h;
            g[j] = (objective(ep) - objective(em)) / (2.0 * h);
        }
        return g;
    };

    Eigen::VectorXd eta = lm.encode(get_params(start));
    double f = objective(eta);
    if (f == neg_inf) throw NumericalError("fit_mle: starting point has non-finite likelihood");
    Eigen::VectorXd g = gradient(eta);
    Eigen::MatrixXd hinv_approx = Eigen::MatrixXd::Identity(p, p);

    int it = 0;
    for (; it < opts.max_iter; ++it) {
        if (g.lpNorm<Eigen::Infinity>() < opts.grad_tol) {
            res.converged = true;
            break;
        }
        Eigen::VectorXd dir = hinv_approx * g;  // ascent direction
        if (dir.dot(g) <= 0.0) dir = g;
        double step = 1.0;
        const double slope = dir.dot(g);
        double f_new = neg_inf;
        Eigen::VectorXd eta_new;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            eta_new = eta + step * dir;
            f_new = objective(eta_new);
            if (f_new > f + 1e-4 * step * slope && std::isfinite(f_new)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            res.converged = g.lpNorm<Eigen::Infinity>() < 1e-3;  // flat to line-search resolution
            break;
        }
        const Eigen::VectorXd g_new = gradient(eta_new);
        const Eigen::VectorXd s = eta_new - eta;
        const Eigen::VectorXd y = g - g_new;  // gradient-of-(-f) differences for the minimization form
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const Eigen::VectorXd hy = hinv_approx * y;
            const double yhy = y.dot(hy);
            hinv_approx += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) -
                           (hy * s.transpose() + s * hy.transpose()) / sy;
        }
        const double change = std::fabs(f_new - f);
        eta = eta_new;
        g = g_new;
        const bool small_change = change < opts.rel_tol * std::max(1.0, std::fabs(f));
        f = f_new;
        if (small_change) {
            ++it;
            res.converged = true;
            break;
        }
    }
    res.iterations = it;
    res.spec = with_params(start, lm.decode(eta));
    res.loglik = f;
    return res;
}

} // namespace vinegof
