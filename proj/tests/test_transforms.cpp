#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "vinegof/math.hpp"
#include "vinegof/rng.hpp"
#include "vinegof/transforms.hpp"

using namespace vinegof;
using Catch::Approx;

TEST_CASE("order-statistics PIT values", "[transforms]") {
    SECTION("two-dimensional worked example") {
        const auto v = order_stat_pit({0.25, 0.75});
        REQUIRE(v.size() == 2);
        CHECK(v[0] == Approx(0.4375).margin(1e-4));
        CHECK(v[1] == Approx(2.0 / 3.0).margin(1e-4));
    }
    SECTION("one-dimensional identity") {
        const auto v = order_stat_pit({0.4});
        CHECK(v[0] == Approx(0.4).margin(1e-15));
    }
    SECTION("entry equal to one raises") {
        CHECK_THROWS_AS(order_stat_pit({0.3, 1.0}), DomainError);
    }
    SECTION("depends only on the order statistics") {
        const std::vector<double> a{0.9, 0.1, 0.5, 0.3};
        const std::vector<double> b{0.1, 0.3, 0.5, 0.9};
        CHECK(order_stat_pit(a) == order_stat_pit(b));
    }
}

TEST_CASE("order-statistics PIT of uniforms is uniform", "[transforms]") {
    const int n = 5000, d = 5;
    rng::UniformStream us(97u);
    std::vector<std::vector<double>> v_cols(static_cast<std::size_t>(d), std::vector<double>());
    std::vector<double> row(static_cast<std::size_t>(d));
    for (int t = 0; t < n; ++t) {
        for (int c = 0; c < d; ++c) row[static_cast<std::size_t>(c)] = us.next();
        const auto v = order_stat_pit(row);
        for (int c = 0; c < d; ++c) v_cols[static_cast<std::size_t>(c)].push_back(v[static_cast<std::size_t>(c)]);
    }
    const double crit = math::ks_critical_value(0.01, n);
    for (int c = 0; c < d; ++c) {
        INFO("column " << c + 1);
        CHECK(math::ks_uniform_statistic(v_cols[static_cast<std::size_t>(c)]) < crit);
    }
}

TEST_CASE("aggregation rules", "[transforms]") {
    SECTION("normal-score rule vanishes on the median row") {
        Eigen::MatrixXd y(1, 3);
        y << 0.5, 0.5, 0.5;
        CHECK(aggregate(y, breymann_rule())[0] == Approx(0.0).margin(1e-20));
    }
    SECTION("absolute-deviation rule vanishes when the order-stat PIT is centered") {
        // y chosen so that both conditional order statistics map to 1/2
        const double y1 = 1.0 - std::sqrt(0.5);
        const double y2 = 1.0 - 0.5 * (1.0 - y1);
        Eigen::MatrixXd y(1, 2);
        y << y1, y2;
        CHECK(aggregate(y, berg_rule())[0] == Approx(0.0).margin(1e-14));
    }
    SECTION("rule validation") {
        CHECK_THROWS_AS(AggregationRule::validate({Weighting::one, Weighting::one, 2}), DomainError);
        CHECK_THROWS_AS(AggregationRule::validate({Weighting::one, Weighting::centered_power, 3}), DomainError);
    }
    SECTION("normal-score aggregation of uniforms matches the chi-square mean") {
        const int n = 5000, d = 5;
        rng::UniformStream us(531u);
        Eigen::MatrixXd y(n, d);
        for (int t = 0; t < n; ++t)
            for (int c = 0; c < d; ++c) y(t, c) = us.next();
        const auto s = aggregate(y, breymann_rule());
        CHECK(s.mean() == Approx(static_cast<double>(d)).margin(0.15));
    }
    SECTION("additive across dimension blocks for y-only rules") {
        rng::UniformStream us(65u);
        Eigen::MatrixXd y(4, 3);
        for (int t = 0; t < 4; ++t)
            for (int c = 0; c < 3; ++c) y(t, c) = us.next();
        const auto s_full = aggregate(y, breymann_rule());
        const auto s_left = aggregate(y.leftCols(2), breymann_rule());
        const auto s_right = aggregate(y.rightCols(1), breymann_rule());
        for (int t = 0; t < 4; ++t) REQUIRE(s_full[t] == s_left[t] + s_right[t]);
    }
    SECTION("unsquared normal-score variant is exposed separately") {
        Eigen::MatrixXd y(1, 2);
        y << 0.3, 0.8;
        const AggregationRule unsquared{Weighting::normal_quantile, Weighting::one, 2};
        const double expect = math::std_normal_quantile(0.3) + math::std_normal_quantile(0.8);
        CHECK(aggregate(y, unsquared)[0] == Approx(expect).margin(1e-14));
    }
}
