#pragma once

// Information-matrix diagnostics: sample variability and sensitivity
// matrices, the information-ratio statistic tr(-Hbar^-1 Cbar)/p, and the
// information-matrix-equality test statistic n dbar' Vhat^-1 dbar with its
// chi-square reference.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "vinegof/errors.hpp"
#include "vinegof/math.hpp"
#include "vinegof/rvine_derivs.hpp"

namespace vinegof {

inline Eigen::VectorXd vech(const Eigen::MatrixXd& a) {
    const int p = static_cast<int>(a.rows());
    Eigen::VectorXd v(p * (p + 1) / 2);
    int off = 0;
    for (int c = 0; c < p; ++c)
        for (int r = c; r < p; ++r) v[off++] = a(r, c);
    return v;
}

struct InfoMatrices {
    Eigen::MatrixXd h_bar;      // mean Hessian, symmetric
    Eigen::MatrixXd c_bar;      // mean score outer product, PSD (clipped)
    Eigen::MatrixXd per_obs_d;  // n x p(p+1)/2, rows vech(H_t + C_t)
    int p = 0;
};

namespace info_detail {

// canonical accumulation order: lexicographic by row content, so every
// reduction is exactly invariant under permutations of the observations
inline std::vector<int> lex_order(const Eigen::MatrixXd& rows) {
    std::vector<int> idx(static_cast<std::size_t>(rows.rows()));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        for (Eigen::Index c = 0; c < rows.cols(); ++c) {
            if (rows(a, c) != rows(b, c)) return rows(a, c) < rows(b, c);
        }
        return false;
    });
    return idx;
}

inline Eigen::VectorXd ordered_col_mean(const Eigen::MatrixXd& rows) {
    const auto idx = lex_order(rows);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(rows.cols());
    for (int t : idx) sum += rows.row(t).transpose();
    return sum / static_cast<double>(rows.rows());
}

inline InfoMatrices from_score_hessians(const ScoreHessians& sh) {
    const int n = static_cast<int>(sh.scores.rows());
    const int p = static_cast<int>(sh.scores.cols());
    InfoMatrices im;
    im.p = p;
    im.h_bar = Eigen::MatrixXd::Zero(p, p);
    im.c_bar = Eigen::MatrixXd::Zero(p, p);
    im.per_obs_d.resize(n, p * (p + 1) / 2);
    for (int t = 0; t < n; ++t) {
        const Eigen::MatrixXd& ht = sh.hessians[static_cast<std::size_t>(t)];
        const Eigen::MatrixXd ct = sh.scores.row(t).transpose() * sh.scores.row(t);
        im.per_obs_d.row(t) = vech(ht + ct).transpose();
    }
    for (int t : lex_order(im.per_obs_d)) {
        im.h_bar += sh.hessians[static_cast<std::size_t>(t)];
        im.c_bar += sh.scores.row(t).transpose() * sh.scores.row(t);
    }
    im.h_bar /= n;
    im.c_bar /= n;
    im.h_bar = 0.5 * (im.h_bar + im.h_bar.transpose()).eval();
    im.c_bar = 0.5 * (im.c_bar + im.c_bar.transpose()).eval();
    // clip roundoff-negative eigenvalues so c_bar is positive semidefinite
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(im.c_bar);
    if (es.eigenvalues().minCoeff() < 0.0) {
        Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
        im.c_bar = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    }
    return im;
}

// symmetric solve with a condition-number guard
struct HbarSolver {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    explicit HbarSolver(const Eigen::MatrixXd& h_bar) : es(h_bar) {
        const auto& lam = es.eigenvalues();
        const double amax = lam.cwiseAbs().maxCoeff();
        const double amin = lam.cwiseAbs().minCoeff();
        if (!(amin > 0.0) || amax / amin > 1e12)
            throw SingularMatrixError("h_bar is near-singular (flat likelihood direction)");
    }
    Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const {
        return es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
               (es.eigenvectors().transpose() * b);
    }
};

} // namespace info_detail

// Sample information matrices at a fitted model.
inline InfoMatrices info_matrices(const RVineSpec& spec_fitted, const SampleMatrix& data,
                                  const EvalPlan* plan = nullptr) {
    return info_detail::from_score_hessians(score_and_hessian(spec_fitted, data, plan));
}

struct IrResult {
    double ir = 0.0;
    Eigen::MatrixXd psi_bar;
};

inline IrResult ir_statistic(const InfoMatrices& im) {
    info_detail::HbarSolver solver(im.h_bar);
    IrResult res;
    res.psi_bar = -solver.solve(im.c_bar);
    res.ir = res.psi_bar.trace() / static_cast<double>(im.p);
    return res;
}

struct WhiteResult {
    double t_n = 0.0;
    int dof = 0;
    Eigen::VectorXd d_bar;
    Eigen::MatrixXd v_hat;
};

// Information-matrix-equality statistic. The gradient of the vectorized sum
// with respect to theta is estimated by central finite differences of the
// per-observation d-vectors, and the covariance uses the standard plug-in
// with the estimator's influence term removed.
inline WhiteResult white_statistic(const InfoMatrices& im, const RVineSpec& spec_fitted,
                                   const SampleMatrix& data, const EvalPlan* plan = nullptr) {
    const int p = im.p;
    const int q = p * (p + 1) / 2;
    const int n = static_cast<int>(im.per_obs_d.rows());
    WhiteResult res;
    res.dof = q;
    res.d_bar = info_detail::ordered_col_mean(im.per_obs_d);

    info_detail::HbarSolver hsolver(im.h_bar);

    const Eigen::VectorXd theta = get_params(spec_fitted);
    const double scale = std::cbrt(std::numeric_limits<double>::epsilon());
    Eigen::MatrixXd grad_d(q, p);
    for (int j = 0; j < p; ++j) {
        const double h = scale * std::max(1.0, std::fabs(theta[j]));
        Eigen::VectorXd tp = theta, tm = theta;
        tp[j] += h;
        tm[j] -= h;
        const auto imp = info_detail::from_score_hessians(score_and_hessian(with_params(spec_fitted, tp), data, plan));
        const auto imm = info_detail::from_score_hessians(score_and_hessian(with_params(spec_fitted, tm), data, plan));
        grad_d.col(j) = (info_detail::ordered_col_mean(imp.per_obs_d) - info_detail::ordered_col_mean(imm.per_obs_d)) /
                        (2.0 * h);
    }

    const ScoreHessians sh = score_and_hessian(spec_fitted, data, plan);
    const Eigen::MatrixXd correction = grad_d * hsolver.solve(sh.scores.transpose());  // q x n
    Eigen::MatrixXd residuals(n, q);
    for (int t = 0; t < n; ++t)
        residuals.row(t) = im.per_obs_d.row(t) - correction.col(t).transpose();
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(q, q);
    for (int t : info_detail::lex_order(residuals))
        v += residuals.row(t).transpose() * residuals.row(t);
    v /= n;
    v += 1e-8 * Eigen::MatrixXd::Identity(q, q);
    res.v_hat = v;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(v);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw SingularMatrixError("white_statistic: covariance not invertible after ridge");
    res.t_n = static_cast<double>(n) * res.d_bar.dot(ldlt.solve(res.d_bar));
    return res;
}

// Upper-tail chi-square probability with p(p+1)/2 degrees of freedom;
// unreliable at small n, provided for reference alongside bootstrap
// p-values.
inline double white_asymptotic_pvalue(const WhiteResult& w) {
    return math::chi_squared_upper_tail(w.t_n, static_cast<double>(w.dof));
}

} // namespace vinegof
