#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "vinegof/math.hpp"
#include "vinegof/rng.hpp"

using namespace vinegof;
using Catch::Approx;

TEST_CASE("standard normal quantile and cdf", "[math]") {
    CHECK(math::std_normal_quantile(0.5) == Approx(0.0).margin(1e-15));
    CHECK(math::std_normal_quantile(0.975) == Approx(1.959963984540054).epsilon(1e-12));
    CHECK(math::std_normal_cdf(0.0) == Approx(0.5));
    for (double p : {1e-9, 1e-4, 0.2, 0.5, 0.8, 1.0 - 1e-4, 1.0 - 1e-9}) {
        CHECK(math::std_normal_cdf(math::std_normal_quantile(p)) == Approx(p).epsilon(1e-10));
    }
    CHECK_THROWS_AS(math::std_normal_quantile(0.0), DomainError);
    CHECK_THROWS_AS(math::std_normal_quantile(1.0), DomainError);
}

TEST_CASE("student t helpers", "[math]") {
    // nu = 1 is Cauchy: cdf(1) = 3/4
    CHECK(math::student_t_cdf(1.0, 1.0) == Approx(0.75).epsilon(1e-12));
    for (double p : {0.01, 0.3, 0.77}) {
        CHECK(math::student_t_cdf(math::student_t_quantile(p, 7.5), 7.5) == Approx(p).epsilon(1e-10));
    }
}

TEST_CASE("chi squared", "[math]") {
    // 95% quantile of chi2_1 is 3.841459
    CHECK(math::chi_squared_upper_tail(3.841458820694124, 1.0) == Approx(0.05).epsilon(1e-9));
    CHECK(math::chi_squared_cdf(0.0, 3.0) == 0.0);
}

TEST_CASE("Gauss-Legendre 64 integrates polynomials", "[math]") {
    CHECK(math::integrate_gl64([](double x) { return x * x; }, 0.0, 1.0) == Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(math::integrate_gl64([](double x) { return std::exp(x); }, 0.0, 1.0) ==
          Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("adaptive Simpson", "[math]") {
    const double got = math::integrate_adaptive([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0, 1e-13);
    CHECK(got == Approx(math::pi / 4.0).epsilon(1e-12));
}

TEST_CASE("Debye function of order one", "[math]") {
    // series D1(x) = 1 - x/4 + x^2/36 - ... for small x
    CHECK(math::debye1(1e-4) == Approx(1.0 - 1e-4 / 4.0).epsilon(1e-9));
    // D1(1) = 0.7775046341... (standard tables)
    CHECK(math::debye1(1.0) == Approx(0.7775046341122482).epsilon(1e-10));
}

TEST_CASE("Kendall tau matches the quadratic-time definition", "[math]") {
    rng::UniformStream stream(42u);
    const std::size_t n = 300;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = stream.next();
        y[i] = 0.5 * x[i] + 0.5 * stream.next();
    }
    double conc = 0.0, disc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = (x[i] - x[j]) * (y[i] - y[j]);
            if (s > 0.0) conc += 1.0;
            else if (s < 0.0) disc += 1.0;
        }
    const double brute = (conc - disc) / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
    CHECK(math::kendall_tau(x, y) == Approx(brute).margin(1e-14));
}

TEST_CASE("Spearman rho on monotone data", "[math]") {
    std::vector<double> x{0.1, 0.4, 0.2, 0.9, 0.7};
    std::vector<double> inc{1.0, 4.0, 2.0, 9.0, 7.0};
    CHECK(math::spearman_rho(x, inc) == Approx(1.0));
}

TEST_CASE("KS critical value", "[math]") {
    // asymptotic constants: K(0.05) = 1.3581, K(0.01) = 1.6276
    CHECK(math::ks_critical_value(0.05, 10000) * 100.0 == Approx(1.3581).margin(2e-3));
    CHECK(math::ks_critical_value(0.01, 10000) * 100.0 == Approx(1.6276).margin(2e-3));
}

TEST_CASE("Philox4x32-10 known-answer vectors", "[rng]") {
    using rng::Philox4x32;
    // vectors from the Random123 reference distribution (kat_vectors)
    auto zero = Philox4x32::block({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(zero[0] == 0x6627e8d5u);
    CHECK(zero[1] == 0xe169c58du);
    CHECK(zero[2] == 0xbc57ac4cu);
    CHECK(zero[3] == 0x9b00dbd8u);

    auto ones = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                  {0xffffffffu, 0xffffffffu});
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);

    auto pi = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                {0xa4093822u, 0x299f31d0u});
    CHECK(pi[0] == 0xd16cfe09u);
    CHECK(pi[1] == 0x94fdccebu);
    CHECK(pi[2] == 0x5001e420u);
    CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("uniform stream is reproducible, open-interval, roughly uniform", "[rng]") {
    rng::UniformStream a(123456789u, 7u);
    rng::UniformStream b(123456789u, 7u);
    double mean = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double x = a.next();
        REQUIRE(x > 0.0);
        REQUIRE(x < 1.0);
        CHECK(x == b.at(static_cast<std::uint64_t>(i)));
        mean += x;
    }
    mean /= 20000.0;
    CHECK(mean == Approx(0.5).margin(0.01));

    rng::UniformStream other_stream(123456789u, 8u);
    CHECK(other_stream.at(0) != a.at(0));
}

TEST_CASE("substream ids are disjoint across purposes and models", "[rng]") {
    const auto s1 = rng::substream(rng::Purpose::simulate, 0, 5);
    const auto s2 = rng::substream(rng::Purpose::ecp_surrogate, 0, 5);
    const auto s3 = rng::substream(rng::Purpose::simulate, 1, 5);
    CHECK(s1 != s2);
    CHECK(s1 != s3);
    CHECK(s2 != s3);
}
