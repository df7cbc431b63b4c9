#pragma once

// Evaluation engine for R-vine models: the V-direct / V-indirect recursion
// with max-matrix argument routing, used for the log-likelihood, the
// Rosenblatt probability integral transform, its inverse, and simulation.
//
// The plan normalizes variable labels internally so that the diagonal reads
// (d, d-1, ..., 1); the max-matrix routing then applies verbatim and
// arbitrary diagonal permutations are supported at the model surface.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "vinegof/errors.hpp"
#include "vinegof/rng.hpp"
#include "vinegof/rvine.hpp"

namespace vinegof {

struct EvalPlan {
    int d = 0;
    std::vector<int> norm;      // normalized labels, row-major
    std::vector<int> mtilde;    // column-wise running maximum of norm
    std::vector<int> data_col;  // 0-based data column entering the bottom row, per matrix column
    std::vector<int> z2_col;    // per cell: source column of the second argument
    std::vector<std::uint8_t> z2_dir;    // per cell: source is the direct matrix
    std::vector<std::uint8_t> need_dir;  // per cell: its direct output is consumed
    std::vector<std::uint8_t> need_ind;  // per cell: its indirect output is consumed
};

inline EvalPlan build_plan(const RVineSpec& spec) {
    {
        const auto violations = validate(spec);
        if (!violations.empty()) {
            std::string msg = "invalid R-vine spec:";
            for (const auto& v : violations) msg += " [" + v.message + "]";
            throw DomainError(msg);
        }
    }
    const RVineMatrix& m = spec.matrix;
    const int d = m.dim();
    EvalPlan plan;
    plan.d = d;
    const std::size_t cells = static_cast<std::size_t>(d) * static_cast<std::size_t>(d);
    plan.norm.assign(cells, 0);
    plan.mtilde.assign(cells, 0);
    plan.data_col.assign(static_cast<std::size_t>(d), 0);
    plan.z2_col.assign(cells, 0);
    plan.z2_dir.assign(cells, 0);
    plan.need_dir.assign(cells, 0);
    plan.need_ind.assign(cells, 0);

    std::vector<int> pos(static_cast<std::size_t>(d) + 1, 0);
    for (int i = 0; i < d; ++i) pos[static_cast<std::size_t>(m.diag(i))] = i;
    auto at = [d](std::vector<int>& v, int k, int i) -> int& { return v[static_cast<std::size_t>(k * d + i)]; };

    for (int i = 0; i < d; ++i) {
        plan.data_col[static_cast<std::size_t>(i)] = m.diag(i) - 1;
        for (int k = i; k < d; ++k) at(plan.norm, k, i) = d - pos[static_cast<std::size_t>(m(k, i))];
    }
    for (int i = 0; i < d; ++i) {
        int running = 0;
        for (int k = d - 1; k >= i; --k) {
            running = std::max(running, at(plan.norm, k, i));
            at(plan.mtilde, k, i) = running;
        }
    }
    for (int i = 0; i < d - 1; ++i) {
        for (int k = d - 1; k > i; --k) {
            const int mt = at(plan.mtilde, k, i);
            const int j = d - mt;  // 0-based source column
            const bool direct = mt == at(plan.norm, k, i);
            plan.z2_col[static_cast<std::size_t>(k * d + i)] = j;
            plan.z2_dir[static_cast<std::size_t>(k * d + i)] = direct ? 1 : 0;
            if (k < d - 1) {
                plan.need_dir[static_cast<std::size_t>((k + 1) * d + i)] = 1;  // z1 of this cell
                auto& mask = direct ? plan.need_dir : plan.need_ind;
                mask[static_cast<std::size_t>((k + 1) * d + j)] = 1;
            }
        }
        plan.need_dir[static_cast<std::size_t>((i + 1) * d + i)] = 1;  // PIT output of column i
    }
    return plan;
}

struct LogLikResult {
    double total = 0.0;
    Eigen::VectorXd per_obs;
    long floored = 0;  // pair densities floored at 1e-300 before taking logs
};

namespace eval_detail {

inline constexpr double log_floor = -690.77552789821368;  // ln(1e-300)

struct Workspace {
    std::vector<double> vdir, vind;
    explicit Workspace(int d)
        : vdir(static_cast<std::size_t>(d) * static_cast<std::size_t>(d)),
          vind(static_cast<std::size_t>(d) * static_cast<std::size_t>(d)) {}
};

inline std::string cell_label(const RVineSpec& spec, int k, int i) {
    const int d = spec.dim();
    return "tree " + std::to_string(d - k) + ", edge (" + std::to_string(spec.matrix(k, i)) + "," +
           std::to_string(spec.matrix.diag(i)) + ")";
}

// One forward pass over a single observation. When y_out is non-null the PIT
// outputs are collected; when ll_out is non-null the log-density is summed.
inline void forward_row(const RVineSpec& spec, const EvalPlan& plan, const double* row, Workspace& ws,
                        double* y_out, double* ll_out, long* floored) {
    const int d = plan.d;
    auto vdir = [&](int k, int i) -> double& { return ws.vdir[static_cast<std::size_t>(k * d + i)]; };
    auto vind = [&](int k, int i) -> double& { return ws.vind[static_cast<std::size_t>(k * d + i)]; };
    for (int c = 0; c < d; ++c) vdir(d - 1, c) = row[plan.data_col[static_cast<std::size_t>(c)]];
    if (y_out) y_out[0] = vdir(d - 1, d - 1);
    double total = 0.0;
    for (int i = d - 2; i >= 0; --i) {
        for (int k = d - 1; k > i; --k) {
            const std::size_t cell = static_cast<std::size_t>(k * d + i);
            const double z1 = vdir(k, i);
            const double z2 = plan.z2_dir[cell] ? vdir(k, plan.z2_col[cell]) : vind(k, plan.z2_col[cell]);
            const PairCopulaSpec& pc = spec.pair(k, i);
            if (ll_out) {
                double lp = pair_logpdf(pc, z2, z1);
                if (std::isnan(lp)) throw NumericalError("loglik: NaN density at " + cell_label(spec, k, i));
                if (lp < log_floor) {
                    lp = log_floor;
                    if (floored) ++*floored;
                }
                total += lp;
            }
            if (plan.need_dir[cell]) vdir(k - 1, i) = pc_detail::clamp_unit(hfunc1(pc, z2, z1));
            if (plan.need_ind[cell]) vind(k - 1, i) = pc_detail::clamp_unit(hfunc2(pc, z2, z1));
        }
        if (y_out) y_out[d - 1 - i] = vdir(i, i);
    }
    if (ll_out) *ll_out = total;
}

} // namespace eval_detail

inline LogLikResult loglik(const RVineSpec& spec, const SampleMatrix& data, const EvalPlan* plan_in = nullptr) {
    EvalPlan local;
    if (!plan_in) {
        local = build_plan(spec);
        plan_in = &local;
    }
    const EvalPlan& plan = *plan_in;
    if (data.d() != plan.d) throw DomainError("loglik: data dimension does not match the model");
    const int n = data.n();
    LogLikResult res;
    res.per_obs.resize(n);
    eval_detail::Workspace ws(plan.d);
    std::vector<double> row(static_cast<std::size_t>(plan.d));
    for (int t = 0; t < n; ++t) {
        for (int c = 0; c < plan.d; ++c) row[static_cast<std::size_t>(c)] = data.u(t, c);
        double ll = 0.0;
        eval_detail::forward_row(spec, plan, row.data(), ws, nullptr, &ll, &res.floored);
        res.per_obs[t] = ll;
    }
    // accumulate in sorted order so that the total is exactly invariant under
    // permutations of the data rows
    std::vector<double> sorted(res.per_obs.data(), res.per_obs.data() + n);
    std::sort(sorted.begin(), sorted.end());
    res.total = 0.0;
    for (double v : sorted) res.total += v;
    return res;
}

// Rosenblatt probability integral transform of every data row. Column j of
// the output is the conditional cdf of the variable at diagonal position
// d-j+1, given the variables peeled after it.
inline Eigen::MatrixXd rosenblatt(const RVineSpec& spec, const SampleMatrix& data,
                                  const EvalPlan* plan_in = nullptr) {
    EvalPlan local;
    if (!plan_in) {
        local = build_plan(spec);
        plan_in = &local;
    }
    const EvalPlan& plan = *plan_in;
    if (data.d() != plan.d) throw DomainError("rosenblatt: data dimension does not match the model");
    const int n = data.n();
    Eigen::MatrixXd y(n, plan.d);
    eval_detail::Workspace ws(plan.d);
    std::vector<double> row(static_cast<std::size_t>(plan.d));
    std::vector<double> out(static_cast<std::size_t>(plan.d));
    for (int t = 0; t < n; ++t) {
        for (int c = 0; c < plan.d; ++c) row[static_cast<std::size_t>(c)] = data.u(t, c);
        eval_detail::forward_row(spec, plan, row.data(), ws, out.data(), nullptr, nullptr);
        for (int c = 0; c < plan.d; ++c) y(t, c) = pc_detail::clamp_unit(out[static_cast<std::size_t>(c)]);
    }
    return y;
}

// Exact inverse of the transform above: runs the recursion backwards with
// inverse h-functions, filling each column's stack so that columns to the
// left can route their second arguments.
inline SampleMatrix inverse_rosenblatt(const RVineSpec& spec, const Eigen::MatrixXd& w,
                                       const EvalPlan* plan_in = nullptr) {
    EvalPlan local;
    if (!plan_in) {
        local = build_plan(spec);
        plan_in = &local;
    }
    const EvalPlan& plan = *plan_in;
    const int d = plan.d;
    if (static_cast<int>(w.cols()) != d) throw DomainError("inverse_rosenblatt: dimension mismatch");
    const int n = static_cast<int>(w.rows());
    Eigen::MatrixXd u(n, d);
    eval_detail::Workspace ws(d);
    auto vdir = [&](int k, int i) -> double& { return ws.vdir[static_cast<std::size_t>(k * d + i)]; };
    auto vind = [&](int k, int i) -> double& { return ws.vind[static_cast<std::size_t>(k * d + i)]; };
    for (int t = 0; t < n; ++t) {
        for (int i = d - 1; i >= 0; --i) {
            double top = pc_detail::clamp_unit(w(t, d - 1 - i));
            vdir(i, i) = top;
            for (int k = i + 1; k < d; ++k) {
                const std::size_t cell = static_cast<std::size_t>(k * d + i);
                const double z2 = plan.z2_dir[cell] ? vdir(k, plan.z2_col[cell]) : vind(k, plan.z2_col[cell]);
                const PairCopulaSpec& pc = spec.pair(k, i);
                const double x = hinv1(pc, top, z2);
                vdir(k, i) = x;
                if (plan.need_ind[cell]) vind(k - 1, i) = pc_detail::clamp_unit(hfunc2(pc, z2, x));
                top = x;
            }
            u(t, plan.data_col[static_cast<std::size_t>(i)]) = vdir(d - 1, i);
        }
    }
    return SampleMatrix::from_matrix(std::move(u));
}

// n i.i.d. draws via the inverse transform applied to counter-based
// uniforms; bit-reproducible for a given seed.
inline SampleMatrix simulate(const RVineSpec& spec, int n, std::uint64_t seed,
                             std::uint64_t stream = 0, const EvalPlan* plan_in = nullptr) {
    if (n < 1) throw DomainError("simulate: n must be positive");
    EvalPlan local;
    if (!plan_in) {
        local = build_plan(spec);
        plan_in = &local;
    }
    const int d = plan_in->d;
    rng::UniformStream us(seed, stream);
    Eigen::MatrixXd w(n, d);
    for (int t = 0; t < n; ++t)
        for (int c = 0; c < d; ++c)
            w(t, c) = us.at(static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(d) +
                            static_cast<std::uint64_t>(c));
    return inverse_rosenblatt(spec, w, plan_in);
}

} // namespace vinegof
