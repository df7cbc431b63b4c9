#pragma once

// Per-observation score vectors and Hessian matrices of the vine
// log-likelihood, by central finite differences over the free-parameter
// vector (columns left to right, bottom row up within a column).

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "vinegof/errors.hpp"
#include "vinegof/rvine.hpp"
#include "vinegof/rvine_eval.hpp"

namespace vinegof {

struct ScoreHessians {
    Eigen::MatrixXd scores;                // n x p
    std::vector<Eigen::MatrixXd> hessians; // n matrices, p x p, symmetric
};

namespace derivs_detail {

inline void check_stencil(const RVineSpec& spec, const Eigen::VectorXd& theta, const Eigen::VectorXd& h) {
    int off = 0;
    const int d = spec.dim();
    for (int i = 0; i < d - 1; ++i)
        for (int k = d - 1; k > i; --k) {
            const auto& pc = spec.pair(k, i);
            for (int j = 0; j < param_count(pc.family); ++j, ++off) {
                const auto dom = param_domain(pc.family, j);
                const double lo = theta[off] - h[off], hi = theta[off] + h[off];
                if (!dom.interior(lo, 0.0) || !dom.interior(hi, 0.0))
                    throw NumericalError("score_and_hessian: stencil leaves the parameter domain at cell (" +
                                         std::to_string(k + 1) + "," + std::to_string(i + 1) + ")");
                if (pc.family == Family::frank && std::fabs(theta[off]) <= h[off])
                    throw NumericalError("score_and_hessian: frank theta too close to zero at cell (" +
                                         std::to_string(k + 1) + "," + std::to_string(i + 1) + ")");
            }
        }
}

} // namespace derivs_detail

inline ScoreHessians score_and_hessian(const RVineSpec& spec, const SampleMatrix& data,
                                       const EvalPlan* plan_in = nullptr) {
    EvalPlan local;
    if (!plan_in) {
        local = build_plan(spec);
        plan_in = &local;
    }
    const EvalPlan& plan = *plan_in;
    const int p = spec.param_count();
    const int n = data.n();
    if (p < 1) throw DomainError("score_and_hessian: model has no free parameters");

    const Eigen::VectorXd theta = get_params(spec);
    const double scale = std::cbrt(std::numeric_limits<double>::epsilon());
    Eigen::VectorXd h(p);
    for (int j = 0; j < p; ++j) h[j] = scale * std::max(1.0, std::fabs(theta[j]));
    derivs_detail::check_stencil(spec, theta, h);

    auto eval = [&](const Eigen::VectorXd& th) -> Eigen::VectorXd {
        return loglik(with_params(spec, th), data, &plan).per_obs;
    };

    const Eigen::VectorXd f0 = eval(theta);
    std::vector<Eigen::VectorXd> fp(static_cast<std::size_t>(p)), fm(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
        Eigen::VectorXd tp = theta, tm = theta;
        tp[j] += h[j];
        tm[j] -= h[j];
        fp[static_cast<std::size_t>(j)] = eval(tp);
        fm[static_cast<std::size_t>(j)] = eval(tm);
    }

    ScoreHessians out;
    out.scores.resize(n, p);
    out.hessians.assign(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(p, p));
    for (int j = 0; j < p; ++j) {
        out.scores.col(j) = (fp[static_cast<std::size_t>(j)] - fm[static_cast<std::size_t>(j)]) / (2.0 * h[j]);
        const Eigen::VectorXd diag =
            (fp[static_cast<std::size_t>(j)] - 2.0 * f0 + fm[static_cast<std::size_t>(j)]) / (h[j] * h[j]);
        for (int t = 0; t < n; ++t) out.hessians[static_cast<std::size_t>(t)](j, j) = diag[t];
    }
    for (int a = 0; a < p; ++a) {
        for (int b = a + 1; b < p; ++b) {
            Eigen::VectorXd tpp = theta, tpm = theta, tmp = theta, tmm = theta;
            tpp[a] += h[a]; tpp[b] += h[b];
            tpm[a] += h[a]; tpm[b] -= h[b];
            tmp[a] -= h[a]; tmp[b] += h[b];
            tmm[a] -= h[a]; tmm[b] -= h[b];
            const Eigen::VectorXd mixed =
                (eval(tpp) - eval(tpm) - eval(tmp) + eval(tmm)) / (4.0 * h[a] * h[b]);
            for (int t = 0; t < n; ++t) {
                out.hessians[static_cast<std::size_t>(t)](a, b) = mixed[t];
                out.hessians[static_cast<std::size_t>(t)](b, a) = mixed[t];
            }
        }
    }
    return out;
}

} // namespace vinegof
