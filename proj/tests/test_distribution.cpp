#include <mest/distribution.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace mest;

TEST_CASE("construction guards") {
    CHECK_THROWS_AS(ErrorDistribution::gaussian(0.0), ConfigError);
    CHECK_THROWS_AS(ErrorDistribution::laplace(-1.0), ConfigError);
    CHECK_THROWS_AS(ErrorDistribution::cauchy(0.0), ConfigError);
    CHECK_THROWS_AS(ErrorDistribution::student_t(0.0), ConfigError);
    CHECK_THROWS_AS(ErrorDistribution::log_pareto(2.0), ConfigError);  // x0 < e
}

TEST_CASE("sampler determinism") {
    const std::vector<ErrorDistribution> dists = {
        ErrorDistribution::gaussian(1.0), ErrorDistribution::laplace(2.0),
        ErrorDistribution::cauchy(1.0), ErrorDistribution::student_t(2.5),
        ErrorDistribution::log_pareto(std::exp(1.0))};
    for (const auto& dist : dists) {
        const Vector a = dist.sample(500, 99);
        const Vector b = dist.sample(500, 99);
        CHECK(a == b);
        const Vector c = dist.sample(500, 100);
        CHECK(a != c);
    }
}

TEST_CASE("gaussian sample mean within 4/sqrt(n)") {
    const Vector e = ErrorDistribution::gaussian(1.0).sample(1000000, 1);
    CHECK(std::abs(e.mean()) <= 4.0 / 1000.0);
}

TEST_CASE("cauchy sample median near zero") {
    Vector e = ErrorDistribution::cauchy(1.0).sample(100000, 2);
    std::nth_element(e.data(), e.data() + e.size() / 2, e.data() + e.size());
    CHECK(std::abs(e[e.size() / 2]) <= 0.02);
}

TEST_CASE("symmetry: sign balance of samples") {
    for (const auto& dist :
         {ErrorDistribution::laplace(1.0), ErrorDistribution::student_t(3.0),
          ErrorDistribution::log_pareto(std::exp(1.0))}) {
        const Vector e = dist.sample(100000, 3);
        const double positives = (e.array() > 0.0).count();
        CHECK(std::abs(positives - 50000.0) <= 4.0 * std::sqrt(100000.0) / 2.0);
    }
}

TEST_CASE("log-pareto normalization and tails match the quadrature oracle") {
    const ErrorDistribution lp = ErrorDistribution::log_pareto(std::exp(1.0));
    // oracle values computed independently with adaptive quadrature (scipy):
    // K = 3.3671052469, P(|e|>5) = 0.263580, P(|e|>20) = 0.024048,
    // P(|e|>100) = 0.002301
    CHECK(lp.tail_prob(5.0) == doctest::Approx(0.263580).epsilon(1e-4));
    CHECK(lp.tail_prob(20.0) == doctest::Approx(0.024048).epsilon(1e-4));
    CHECK(lp.tail_prob(100.0) == doctest::Approx(0.002301).epsilon(1e-4));
    CHECK(lp.density(1.0) == 0.0);  // inside the support gap
    CHECK(lp.density(3.0) == doctest::Approx(3.3671052469 / (9.0 * std::pow(std::log(3.0), 2)))
                                 .epsilon(1e-6));
}

TEST_CASE("log-pareto sampler matches its own tail probabilities") {
    const ErrorDistribution lp = ErrorDistribution::log_pareto(std::exp(1.0));
    const Index n = 100000;
    const Vector e = lp.sample(n, 17);
    for (double threshold : {5.0, 20.0, 100.0}) {
        const double expected = lp.tail_prob(threshold);
        const double observed =
            static_cast<double>((e.array().abs() > threshold).count()) / double(n);
        const double se = std::sqrt(expected * (1.0 - expected) / double(n));
        CHECK(std::abs(observed - expected) <= 3.0 * se);
    }
}

TEST_CASE("cdf closed forms and symmetry") {
    const ErrorDistribution g = ErrorDistribution::gaussian(2.0);
    CHECK(g.cdf(0.0) == doctest::Approx(0.5));
    CHECK(g.cdf(2.0) == doctest::Approx(0.841344746).epsilon(1e-8));

    const ErrorDistribution c = ErrorDistribution::cauchy(1.0);
    CHECK(c.cdf(1.0) == doctest::Approx(0.75));

    const ErrorDistribution t1 = ErrorDistribution::student_t(1.0);
    CHECK(t1.cdf(1.0) == doctest::Approx(0.75).epsilon(1e-8));  // t(1) is Cauchy
    CHECK(t1.cdf(0.0) == doctest::Approx(0.5));

    const ErrorDistribution lap = ErrorDistribution::laplace(1.0);
    CHECK(lap.cdf(0.0) == doctest::Approx(0.5));
    CHECK(lap.cdf(-1.0) + lap.cdf(1.0) == doctest::Approx(1.0));
}

TEST_CASE("moment rules") {
    CHECK(ErrorDistribution::gaussian(1.0).has_abs_moment(10.0));
    CHECK(ErrorDistribution::cauchy(1.0).has_abs_moment(0.5));
    CHECK_FALSE(ErrorDistribution::cauchy(1.0).has_abs_moment(1.0));
    CHECK(ErrorDistribution::student_t(3.0).has_abs_moment(2.5));
    CHECK_FALSE(ErrorDistribution::student_t(3.0).has_abs_moment(3.0));
    CHECK(ErrorDistribution::log_pareto(std::exp(1.0)).has_abs_moment(1.0));
    CHECK_FALSE(ErrorDistribution::log_pareto(std::exp(1.0)).has_abs_moment(1.1));
}

TEST_CASE("student t sampling is heavy-tailed but median-centered") {
    Vector e = ErrorDistribution::student_t(2.0).sample(100000, 5);
    std::nth_element(e.data(), e.data() + e.size() / 2, e.data() + e.size());
    CHECK(std::abs(e[e.size() / 2]) <= 0.02);
}

TEST_CASE("samplers match their own tail probabilities") {
    const Index n = 100000;
    for (const auto& dist : {ErrorDistribution::student_t(2.5), ErrorDistribution::laplace(1.5),
                             ErrorDistribution::cauchy(1.0)}) {
        const Vector e = dist.sample(n, 23);
        for (double threshold : {1.0, 3.0, 8.0}) {
            const double expected = dist.tail_prob(threshold);
            const double observed =
                static_cast<double>((e.array().abs() > threshold).count()) / double(n);
            const double se = std::sqrt(expected * (1.0 - expected) / double(n));
            CHECK(std::abs(observed - expected) <= 4.0 * se + 1e-12);
        }
    }
}
