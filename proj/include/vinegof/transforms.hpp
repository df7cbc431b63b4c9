#pragma once

// Dimension-reduction step of the PIT-based tests: the order-statistics PIT
// of a transformed row and the weighted aggregation to univariate test data
// s_t = sum_i gamma_y(y_ti) * gamma_v(v_ti).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "vinegof/errors.hpp"
#include "vinegof/math.hpp"

namespace vinegof {

enum class Weighting {
    one,
    normal_quantile,          // Phi^-1(x); no known null, kept for completeness
    normal_quantile_squared,  // Phi^-1(x)^2; sums to a chi-square_d under the null
    abs_centered,             // |x - 0.5|
    centered_power,           // (x - 0.5)^alpha, alpha in {2, 4}
};

struct AggregationRule {
    Weighting gamma_y = Weighting::one;
    Weighting gamma_v = Weighting::one;
    int alpha = 2;

    static void validate(const AggregationRule& r) {
        if (r.gamma_y == Weighting::one && r.gamma_v == Weighting::one)
            throw DomainError("aggregation rule: at least one weighting must be nontrivial");
        if ((r.gamma_y == Weighting::centered_power || r.gamma_v == Weighting::centered_power) &&
            r.alpha != 2 && r.alpha != 4)
            throw DomainError("aggregation rule: centered power needs alpha in {2,4}");
    }
};

inline double apply_weight(Weighting w, int alpha, double x) {
    switch (w) {
        case Weighting::one: return 1.0;
        case Weighting::normal_quantile: return math::std_normal_quantile(x);
        case Weighting::normal_quantile_squared: {
            const double q = math::std_normal_quantile(x);
            return q * q;
        }
        case Weighting::abs_centered: return std::fabs(x - 0.5);
        case Weighting::centered_power: {
            double acc = 1.0;
            for (int i = 0; i < alpha; ++i) acc *= (x - 0.5);
            return acc;
        }
    }
    throw DomainError("apply_weight: unknown weighting");
}

// Order-statistics PIT of one transformed row: with y_(0) = 0,
//   v_i = 1 - ((1 - y_(i)) / (1 - y_(i-1)))^(d - i + 1).
// Depends on the row only through its order statistics.
inline std::vector<double> order_stat_pit(const std::vector<double>& y_row) {
    const int d = static_cast<int>(y_row.size());
    if (d < 1) throw DomainError("order_stat_pit: empty row");
    std::vector<double> sorted = y_row;
    for (double y : sorted)
        if (!(y >= 0.0 && y < 1.0)) throw DomainError("order_stat_pit: entry outside [0,1)");
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> v(static_cast<std::size_t>(d));
    double prev = 0.0;
    for (int i = 0; i < d; ++i) {
        const double num = 1.0 - sorted[static_cast<std::size_t>(i)];
        const double den = 1.0 - prev;
        v[static_cast<std::size_t>(i)] = 1.0 - std::pow(num / den, static_cast<double>(d - i));
        prev = sorted[static_cast<std::size_t>(i)];
    }
    return v;
}

// Aggregate a PIT matrix row-wise; the order-statistics transform is applied
// only when the v-weighting is nontrivial.
inline Eigen::VectorXd aggregate(const Eigen::MatrixXd& y, const AggregationRule& rule) {
    AggregationRule::validate(rule);
    const int n = static_cast<int>(y.rows());
    const int d = static_cast<int>(y.cols());
    const bool need_v = rule.gamma_v != Weighting::one;
    Eigen::VectorXd s(n);
    std::vector<double> row(static_cast<std::size_t>(d));
    for (int t = 0; t < n; ++t) {
        for (int c = 0; c < d; ++c) row[static_cast<std::size_t>(c)] = y(t, c);
        std::vector<double> v;
        if (need_v) v = order_stat_pit(row);
        double acc = 0.0;
        for (int c = 0; c < d; ++c) {
            const double wy = apply_weight(rule.gamma_y, rule.alpha, row[static_cast<std::size_t>(c)]);
            const double wv = need_v ? apply_weight(rule.gamma_v, rule.alpha, v[static_cast<std::size_t>(c)]) : 1.0;
            acc += wy * wv;
        }
        s[t] = acc;
    }
    return s;
}

// Named rules of the PIT test battery.
inline AggregationRule breymann_rule() { return {Weighting::normal_quantile_squared, Weighting::one, 2}; }
inline AggregationRule berg_rule() { return {Weighting::one, Weighting::abs_centered, 2}; }
inline AggregationRule berg2_rule() { return {Weighting::one, Weighting::centered_power, 2}; }

} // namespace vinegof
