#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "vinegof/bootstrap.hpp"
#include "vinegof/math.hpp"

using namespace vinegof;
using Catch::Approx;

namespace {

RVineSpec bivariate(Family f, std::vector<double> params) {
    auto s = RVineSpec::make(RVineMatrix::from_rows({{2}, {1, 1}}));
    s.pair(1, 0) = PairCopulaSpec::make(f, std::move(params));
    return s;
}

} // namespace

TEST_CASE("tail p-value conventions", "[bootstrap]") {
    SECTION("constant statistic gives p = 1 under the >= convention") {
        CHECK(boot_detail::tail_pvalue({2.0, 2.0, 2.0, 2.0}, 2.0) == 1.0);
    }
    SECTION("observed value above all draws is floored at 1/B") {
        CHECK(boot_detail::tail_pvalue({0.1, 0.2, 0.3, 0.4}, 9.9) == Approx(0.25));
    }
    SECTION("never zero, never above one") {
        CHECK(boot_detail::tail_pvalue({1.0, 2.0}, 5.0) == 0.5);
        CHECK(boot_detail::tail_pvalue({1.0, 2.0}, 0.0) == 1.0);
    }
}

TEST_CASE("bootstrap p-values are deterministic and well-formed", "[bootstrap]") {
    const auto truth = bivariate(Family::gauss, {0.5});
    const auto data = simulate(truth, 300, 555u);
    const auto a = bootstrap_pvalues({GofTest::ir, GofTest::breymann_ks, GofTest::ecp2_cvm}, truth, data, 25, 42u);
    const auto b = bootstrap_pvalues({GofTest::ir, GofTest::breymann_ks, GofTest::ecp2_cvm}, truth, data, 25, 42u);
    REQUIRE(a.size() == 3);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].p_value == b[i].p_value);
        CHECK(a[i].statistic == b[i].statistic);
        CHECK(a[i].p_value >= 1.0 / 25.0);
        CHECK(a[i].p_value <= 1.0);
        CHECK(a[i].n == 300);
        CHECK(a[i].d == 2);
    }
    // the single-test wrapper agrees with the batch run (shared seed chain)
    const auto single = bootstrap_pvalue(GofTest::ir, truth, data, 25, 42u);
    CHECK(single.p_value == a[0].p_value);
    CHECK(single.statistic == a[0].statistic);
}

TEST_CASE("study with a degenerate constant statistic documents tie handling", "[bootstrap]") {
    StudyConfig config;
    config.true_model = bivariate(Family::gauss, {0.4});
    config.n = 40;
    config.B = 16;
    config.alpha = 0.05;
    config.seed = 7u;
    config.tests = {GofTest::ir};
    const auto res = boot_detail::run_study(config, [](const RVineSpec&, const SampleMatrix&, int, int) {
        return std::map<GofTest, double>{{GofTest::ir, 3.14}};
    });
    const auto& cell = res.cells.at(GofTest::ir)[0];
    // every draw ties with every other: p = 1 for all replications, so the
    // estimated size at alpha < 1 is exactly zero
    for (double p : cell.p_values) REQUIRE(p == 1.0);
    CHECK(cell.estimate == 0.0);
}

TEST_CASE("study determinism is independent of the worker count", "[bootstrap]") {
    StudyConfig config;
    config.true_model = bivariate(Family::clayton, {2.0});
    config.alternatives = {bivariate(Family::gauss, {0.6})};
    config.n = 150;
    config.B = 12;
    config.alpha = 0.05;
    config.seed = 99u;
    config.tests = {GofTest::ir, GofTest::breymann_cvm, GofTest::ecp2_ks};
    config.workers = 1;
    const auto r1 = size_power_study(config);
    config.workers = 2;
    const auto r2 = size_power_study(config);
    for (GofTest t : config.tests) {
        for (int m = 0; m < 2; ++m) {
            const auto& c1 = r1.cells.at(t)[static_cast<std::size_t>(m)];
            const auto& c2 = r2.cells.at(t)[static_cast<std::size_t>(m)];
            REQUIRE(c1.p_values.size() == c2.p_values.size());
            for (std::size_t j = 0; j < c1.p_values.size(); ++j) REQUIRE(c1.p_values[j] == c2.p_values[j]);
            REQUIRE(c1.estimate == c2.estimate);
        }
    }
}

TEST_CASE("study p-values live on [1/B, 1] and the size curve is monotone", "[bootstrap]") {
    StudyConfig config;
    config.true_model = bivariate(Family::gauss, {0.5});
    config.n = 120;
    config.B = 40;
    config.alpha = 0.05;
    config.seed = 3u;
    config.tests = {GofTest::breymann_ks};
    const auto res = size_power_study(config);
    const auto& cell = res.cells.at(GofTest::breymann_ks)[0];
    for (double p : cell.p_values) {
        REQUIRE(p >= 1.0 / 40.0);
        REQUIRE(p <= 1.0);
    }
    auto size_at = [&](double alpha) {
        long c = 0;
        for (double p : cell.p_values) c += (p <= alpha) ? 1 : 0;
        return static_cast<double>(c) / static_cast<double>(cell.p_values.size());
    };
    double prev = 0.0;
    for (double alpha : {0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0}) {
        const double s = size_at(alpha);
        REQUIRE(s >= prev);
        prev = s;
    }
}

TEST_CASE("power of an identical alternative matches the size", "[bootstrap][slow]") {
    StudyConfig config;
    config.true_model = bivariate(Family::gauss, {0.5});
    config.alternatives = {config.true_model};
    config.n = 150;
    config.B = 200;
    config.alpha = 0.05;
    config.seed = 1212u;
    config.tests = {GofTest::breymann_cvm};
    config.workers = 2;
    const auto res = size_power_study(config);
    const auto& cells = res.cells.at(GofTest::breymann_cvm);
    const double bound = 3.0 * std::sqrt(0.05 * 0.95 / 200.0);
    CHECK(std::fabs(cells[0].estimate - cells[1].estimate) <= bound + 1e-12);
}

TEST_CASE("bootstrap p-values of IR and White are uniform under the null", "[bootstrap][slow]") {
    StudyConfig config;
    config.true_model = bivariate(Family::clayton, {2.0});
    config.n = 1000;
    config.B = 200;
    config.alpha = 0.05;
    config.seed = 2024u;
    config.tests = {GofTest::ir, GofTest::white};
    config.workers = 2;
    const auto res = size_power_study(config);
    const double crit = math::ks_critical_value(0.01, 200);
    for (GofTest t : config.tests) {
        const auto& cell = res.cells.at(t)[0];
        INFO(gof_test_name(t));
        CHECK(math::ks_uniform_statistic(cell.p_values) < crit);
        CHECK(cell.estimate == Approx(0.05).margin(0.05));
    }
}

TEST_CASE("bootstrap null of the ECP statistic covers the observed value", "[bootstrap][slow]") {
    // Monte Carlo coverage: under the true model the 95th percentile of the
    // bootstrap reference should cover the observed statistic in at least
    // 90% of the seeds.
    const auto truth = bivariate(Family::gauss, {0.55});
    const int seeds = 20, B = 39;
    int covered = 0;
    for (int s = 0; s < seeds; ++s) {
        const auto data = simulate(truth, 300, 40000u + static_cast<std::uint64_t>(s));
        const auto rep = bootstrap_pvalue(GofTest::ecp_cvm, truth, data, B, 555u + static_cast<std::uint64_t>(s));
        // p > 0.05 is exactly "observed below the upper 5% tail of the null"
        covered += rep.p_value > 0.05 ? 1 : 0;
    }
    CHECK(covered >= 18);
}

TEST_CASE("KLIC Monte Carlo", "[bootstrap]") {
    const auto truth = bivariate(Family::clayton, {2.0});
    SECTION("distance to itself is exactly zero") {
        const auto res = klic_mc(truth, truth, 2000, 5u);
        CHECK(res.estimate == 0.0);
        CHECK(res.se == 0.0);
    }
    SECTION("distance to a different family is positive beyond noise") {
        const auto gauss = bivariate(Family::gauss, {std::sin(math::pi * 0.25)});  // tau-matched
        const auto res = klic_mc(truth, gauss, 20000, 6u);
        CHECK(res.estimate > 0.0);
        CHECK(res.estimate >= -3.0 * res.se);
        CHECK(res.se > 0.0);
        CHECK(res.se < 0.05);
    }
    SECTION("dimension mismatch raises") {
        auto indep3 = RVineSpec::make(RVineMatrix::from_rows({{3}, {2, 2}, {1, 1, 1}}));
        CHECK_THROWS_AS(klic_mc(truth, indep3, 100, 1u), DomainError);
    }
}
