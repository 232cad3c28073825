#include <mest/quadrature.hpp>

#include <doctest.h>

#include <cmath>

using namespace mest;

TEST_CASE("finite intervals") {
    CHECK(quad::integrate_finite([](double x) { return x * x * x; }, 0.0, 1.0) ==
          doctest::Approx(0.25).epsilon(1e-12));
    CHECK(quad::integrate_finite([](double x) { return std::sin(x); }, 0.0, M_PI) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(quad::integrate_finite([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
}

TEST_CASE("integrable endpoint singularity") {
    CHECK(quad::integrate_finite([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0) ==
          doctest::Approx(2.0).epsilon(2e-9));
    CHECK(quad::integrate_finite([](double x) { return std::log(x); }, 0.0, 1.0) ==
          doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("semi-infinite tails") {
    CHECK(quad::integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(quad::integrate_to_infinity([](double x) { return 1.0 / (1.0 + x * x); }, 0.0) ==
          doctest::Approx(M_PI / 2.0).epsilon(1e-11));
    CHECK(quad::integrate_to_infinity([](double x) { return std::exp(-x); }, 3.0) ==
          doctest::Approx(std::exp(-3.0)).epsilon(1e-11));
}

TEST_CASE("positive axis with breakpoints") {
    // piecewise integrand: 2 on (0,1), exp(-x) beyond
    auto f = [](double x) { return x < 1.0 ? 2.0 : std::exp(-x); };
    CHECK(quad::integrate_positive_axis(f, {1.0}) ==
          doctest::Approx(2.0 + std::exp(-1.0)).epsilon(1e-10));
    // breakpoints outside (0,inf) are ignored
    CHECK(quad::integrate_positive_axis([](double x) { return std::exp(-x); }, {-3.0, 0.0}) ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("slowly decaying tail after transform") {
    // int_e^inf dx/(x^2 ln^2 x) = exp(-1) - E1(1) = 0.148495506...
    const double val =
        quad::integrate_to_infinity([](double x) { return 1.0 / (x * x * std::pow(std::log(x), 2)); },
                                    std::exp(1.0), 1e-12);
    CHECK(val == doctest::Approx(0.14849550677).epsilon(1e-9));
}

TEST_CASE("adaptive simpson") {
    CHECK(quad::adaptive_simpson([](double x) { return x * x; }, 0.0, 2.0) ==
          doctest::Approx(8.0 / 3.0).epsilon(1e-12));
    CHECK(quad::adaptive_simpson([](double x) { return std::cos(x); }, 0.0, 1.0) ==
          doctest::Approx(std::sin(1.0)).epsilon(1e-12));
    CHECK(quad::adaptive_simpson([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, 1e-12) ==
          doctest::Approx(0.5 * (0.3 * 0.3 + 0.7 * 0.7)).epsilon(1e-9));
}
