#pragma once

// R-vine model representation in matrix form.
//
// A d-dimensional structure matrix M is lower triangular with entries in
// {1..d}. Column i (1-based) describes the pair copulas of the variable on
// the diagonal m(i,i): cell (k,i) below the diagonal is the edge
//   ( m(k,i), m(i,i) | m(k+1,i), ..., m(d,i) )
// sitting in tree d-k+1. The diagonal may be any permutation of 1..d; the
// "normalized" form with diagonal (d, d-1, ..., 1) is the special case used
// by the evaluation algorithm internally.
//
// The pair copula attached to cell (k,i) is evaluated as c(z2, z1) where the
// first argument is the conditional cdf of the off-diagonal variable m(k,i)
// and the second that of the diagonal variable m(i,i), both given the
// conditioning set of the cell.

#include <Eigen/Dense>
#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "vinegof/errors.hpp"
#include "vinegof/pair_copula.hpp"

namespace vinegof {

class RVineMatrix {
public:
    RVineMatrix() = default;
    RVineMatrix(int d, std::vector<int> cells) : d_(d), cells_(std::move(cells)) {
        if (d_ < 1 || static_cast<int>(cells_.size()) != d_ * d_)
            throw DomainError("RVineMatrix: cell storage must be d*d");
    }

    // rows: lower-triangular rows, row k holds k+1 leading entries (0-based)
    static RVineMatrix from_rows(const std::vector<std::vector<int>>& rows) {
        const int d = static_cast<int>(rows.size());
        std::vector<int> cells(static_cast<std::size_t>(d) * static_cast<std::size_t>(d), 0);
        for (int k = 0; k < d; ++k) {
            if (static_cast<int>(rows[static_cast<std::size_t>(k)].size()) < k + 1)
                throw DomainError("RVineMatrix: row " + std::to_string(k + 1) + " too short");
            for (int i = 0; i <= k; ++i)
                cells[static_cast<std::size_t>(k * d + i)] = rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        }
        return RVineMatrix(d, std::move(cells));
    }

    int dim() const { return d_; }
    int operator()(int row, int col) const { return cells_[static_cast<std::size_t>(row * d_ + col)]; }
    int& operator()(int row, int col) { return cells_[static_cast<std::size_t>(row * d_ + col)]; }
    int diag(int col) const { return (*this)(col, col); }

    bool operator==(const RVineMatrix& o) const { return d_ == o.d_ && cells_ == o.cells_; }

private:
    int d_ = 0;
    std::vector<int> cells_;
};

struct Violation {
    int row = -1;  // 1-based cell coordinates, -1 when not cell-specific
    int col = -1;
    std::string message;
};

// Structural admissibility check of the matrix: diagonal a permutation,
// every column's sub-diagonal entries are exactly the later diagonal
// entries, and every cell's second h-function argument is available in the
// column holding its conditioning set (the standard constructive R-vine
// matrix admissibility check).
inline std::vector<Violation> validate_matrix(const RVineMatrix& m) {
    std::vector<Violation> out;
    const int d = m.dim();
    if (d < 2) {
        out.push_back({-1, -1, "dimension < 2"});
        return out;
    }
    bool entries_ok = true;
    for (int i = 0; i < d; ++i)
        for (int k = i; k < d; ++k)
            if (m(k, i) < 1 || m(k, i) > d) {
                out.push_back({k + 1, i + 1, "entry outside 1..d"});
                entries_ok = false;
            }
    if (!entries_ok) return out;

    std::set<int> diag_set;
    for (int i = 0; i < d; ++i) diag_set.insert(m.diag(i));
    if (static_cast<int>(diag_set.size()) != d) {
        out.push_back({-1, -1, "diagonal is not a permutation of 1..d"});
        return out;
    }

    for (int i = 0; i < d - 1; ++i) {
        std::set<int> below;
        for (int k = i + 1; k < d; ++k) below.insert(m(k, i));
        if (static_cast<int>(below.size()) != d - 1 - i) {
            out.push_back({-1, i + 1, "column not a set (duplicate entry)"});
            continue;
        }
        std::set<int> later_diag;
        for (int j = i + 1; j < d; ++j) later_diag.insert(m.diag(j));
        if (below != later_diag)
            out.push_back({-1, i + 1, "column entries are not the diagonal variables of later columns"});
    }
    if (!out.empty()) return out;

    // position of each variable on the diagonal
    std::vector<int> pos(static_cast<std::size_t>(d) + 1, 0);
    for (int i = 0; i < d; ++i) pos[static_cast<std::size_t>(m.diag(i))] = i;

    for (int i = 0; i < d - 2; ++i) {
        for (int k = i + 1; k < d - 1; ++k) {
            // entry whose conditional must already exist: leftmost-peeled
            // variable of {m(k,i), ..., m(d-1,i)}
            int best = m(k, i);
            for (int r = k; r < d; ++r)
                if (pos[static_cast<std::size_t>(m(r, i))] < pos[static_cast<std::size_t>(best)]) best = m(r, i);
            const int j = pos[static_cast<std::size_t>(best)];
            std::multiset<int> need;
            for (int r = k + 1; r < d; ++r) need.insert(m(r, i));
            bool ok;
            if (best == m(k, i)) {
                std::multiset<int> have;
                for (int r = k + 1; r < d; ++r) have.insert(m(r, j));
                ok = have == need;
            } else {
                std::multiset<int> have{m.diag(j)};
                for (int r = k + 2; r < d; ++r) have.insert(m(r, j));
                ok = (k + 1 < d) && m(k + 1, j) == m(k, i) && have == need;
            }
            if (!ok)
                out.push_back({k + 1, i + 1, "proximity condition violated (conditional not constructible)"});
        }
    }
    return out;
}

// Full model: structure matrix plus one pair-copula spec per sub-diagonal
// cell. Cells are addressed row-major like the matrix.
struct RVineSpec {
    RVineMatrix matrix;
    std::vector<PairCopulaSpec> pairs;  // d*d, meaningful strictly below the diagonal

    int dim() const { return matrix.dim(); }
    const PairCopulaSpec& pair(int row, int col) const {
        return pairs[static_cast<std::size_t>(row * dim() + col)];
    }
    PairCopulaSpec& pair(int row, int col) { return pairs[static_cast<std::size_t>(row * dim() + col)]; }

    static RVineSpec make(RVineMatrix m) {
        RVineSpec s;
        const int d = m.dim();
        s.matrix = std::move(m);
        s.pairs.assign(static_cast<std::size_t>(d) * static_cast<std::size_t>(d), PairCopulaSpec::indep());
        return s;
    }

    int param_count() const {
        int p = 0;
        const int d = dim();
        for (int i = 0; i < d - 1; ++i)
            for (int k = i + 1; k < d; ++k) p += vinegof::param_count(pair(k, i).family);
        return p;
    }
};

inline std::vector<Violation> validate(const RVineSpec& spec) {
    auto out = validate_matrix(spec.matrix);
    if (!out.empty()) return out;
    const int d = spec.dim();
    if (static_cast<int>(spec.pairs.size()) != d * d) {
        out.push_back({-1, -1, "pair copula storage does not match dimension"});
        return out;
    }
    for (int i = 0; i < d - 1; ++i)
        for (int k = i + 1; k < d; ++k) {
            try {
                PairCopulaSpec::validate(spec.pair(k, i));
            } catch (const DomainError& e) {
                out.push_back({k + 1, i + 1, e.what()});
            }
        }
    return out;
}

// n x d matrix of copula observations, entries strictly inside (0,1).
// Construction nudges boundary-adjacent values into [1e-10, 1-1e-10] and
// remembers how many entries were touched.
struct SampleMatrix {
    Eigen::MatrixXd u;
    long clamped = 0;

    int n() const { return static_cast<int>(u.rows()); }
    int d() const { return static_cast<int>(u.cols()); }

    static SampleMatrix from_matrix(Eigen::MatrixXd m) {
        SampleMatrix s;
        s.u = std::move(m);
        if (s.u.rows() < 1 || s.u.cols() < 1) throw DomainError("SampleMatrix: need at least one row and column");
        for (Eigen::Index r = 0; r < s.u.rows(); ++r)
            for (Eigen::Index c = 0; c < s.u.cols(); ++c) {
                double& x = s.u(r, c);
                if (!std::isfinite(x) || x <= 0.0 || x >= 1.0)
                    throw DomainError("SampleMatrix: entry outside (0,1) at row " + std::to_string(r + 1) +
                                      ", column " + std::to_string(c + 1));
                const double cl = pc_detail::clamp_unit(x);
                if (cl != x) {
                    x = cl;
                    ++s.clamped;
                }
            }
        return s;
    }
};

// free-parameter vector layout: columns left to right, rows bottom to top
// (tree 1 first within each column)
inline Eigen::VectorXd get_params(const RVineSpec& spec) {
    Eigen::VectorXd theta(spec.param_count());
    int off = 0;
    const int d = spec.dim();
    for (int i = 0; i < d - 1; ++i)
        for (int k = d - 1; k > i; --k)
            for (double v : spec.pair(k, i).params) theta[off++] = v;
    return theta;
}

inline RVineSpec with_params(const RVineSpec& spec, const Eigen::VectorXd& theta) {
    RVineSpec out = spec;
    int off = 0;
    const int d = spec.dim();
    for (int i = 0; i < d - 1; ++i)
        for (int k = d - 1; k > i; --k)
            for (double& v : out.pair(k, i).params) v = theta[off++];
    if (off != theta.size()) throw DomainError("with_params: parameter vector length mismatch");
    return out;
}

} // namespace vinegof
