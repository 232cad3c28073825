#include <mest/loss.hpp>
#include <mest/quadrature.hpp>
#include <mest/rng.hpp>

#include <doctest.h>

#include <algorithm>
#include <vector>

using namespace mest;

namespace {

std::vector<ConvexLoss> all_losses() {
    return {ConvexLoss::huber(0.5),    ConvexLoss::huber(1.345), ConvexLoss::power(1.0),
            ConvexLoss::power(1.3),    ConvexLoss::power(1.7),   ConvexLoss::power(2.0),
            ConvexLoss::quantile(0.25), ConvexLoss::quantile(0.5), ConvexLoss::quantile(0.8)};
}

// integral of psi over [a,b] with explicit splits at the kinks
double integrate_psi(const ConvexLoss& loss, double a, double b) {
    std::vector<double> cuts = {a, b};
    for (double k : psi_kinks(loss))
        if (k > std::min(a, b) && k < std::max(a, b)) cuts.push_back(k);
    std::sort(cuts.begin(), cuts.end());
    if (a > b) std::reverse(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i)
        total += quad::adaptive_simpson([&](double t) { return psi(loss, t); }, cuts[i - 1],
                                        cuts[i], 1e-11);
    return total;
}

}  // namespace

TEST_CASE("rho closed forms") {
    CHECK(rho(ConvexLoss::huber(1.0), 0.5) == doctest::Approx(0.125));
    CHECK(rho(ConvexLoss::huber(1.0), 2.0) == doctest::Approx(1.5));
    CHECK(rho(ConvexLoss::quantile(0.3), -2.0) == doctest::Approx(1.4));
    CHECK(rho(ConvexLoss::quantile(0.3), 2.0) == doctest::Approx(0.6));
    CHECK(rho(ConvexLoss::power(1.0), -3.0) == doctest::Approx(3.0));
    CHECK(rho(ConvexLoss::power(2.0), -3.0) == doctest::Approx(9.0));
}

TEST_CASE("psi selection") {
    CHECK(psi(ConvexLoss::huber(1.0), 3.0) == doctest::Approx(1.0));
    CHECK(psi(ConvexLoss::quantile(0.3), 1.0) == doctest::Approx(0.3));
    CHECK(psi(ConvexLoss::quantile(0.3), -1.0) == doctest::Approx(-0.7));
    CHECK(psi(ConvexLoss::power(2.0), 1.5) == doctest::Approx(3.0));
    // midpoint selection at the kink
    CHECK(psi(ConvexLoss::quantile(0.3), 0.0) == doctest::Approx(-0.2));
    CHECK(psi(ConvexLoss::quantile(0.5), 0.0) == doctest::Approx(0.0));
    CHECK(psi(ConvexLoss::power(1.0), 0.0) == doctest::Approx(0.0));
}

TEST_CASE("psi one-sided derivatives") {
    auto [lo, hi] = psi_one_sided(ConvexLoss::quantile(0.3), 0.0);
    CHECK(lo == doctest::Approx(-0.7));
    CHECK(hi == doctest::Approx(0.3));
    auto [l1, h1] = psi_one_sided(ConvexLoss::power(1.0), 0.0);
    CHECK(l1 == doctest::Approx(-1.0));
    CHECK(h1 == doctest::Approx(1.0));
    auto [l2, h2] = psi_one_sided(ConvexLoss::huber(2.0), 1.0);
    CHECK(l2 == doctest::Approx(1.0));
    CHECK(h2 == doctest::Approx(1.0));
}

TEST_CASE("invalid parameters rejected at construction") {
    CHECK_THROWS_AS(ConvexLoss::huber(0.0), ConfigError);
    CHECK_THROWS_AS(ConvexLoss::huber(-1.0), ConfigError);
    CHECK_THROWS_AS(ConvexLoss::power(0.9), ConfigError);
    CHECK_THROWS_AS(ConvexLoss::power(2.1), ConfigError);
    CHECK_THROWS_AS(ConvexLoss::quantile(0.0), ConfigError);
    CHECK_THROWS_AS(ConvexLoss::quantile(1.0), ConfigError);
}

TEST_CASE("increment bound estimates") {
    const auto huber = increment_bound(ConvexLoss::huber(1.0), 0.5);
    CHECK(huber.c0 == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(huber.c0_closed == doctest::Approx(0.5));

    const auto lad_jump = increment_bound(ConvexLoss::quantile(0.5), 0.1);
    CHECK(lad_jump.c0 == doctest::Approx(1.0));
    CHECK(lad_jump.c0_closed == doctest::Approx(1.0));

    const auto square = increment_bound(ConvexLoss::power(2.0), 0.25);
    CHECK(square.c0 == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(square.c0_closed == doctest::Approx(0.5));

    // power q in (1,2): sup increment 2q(h/2)^{q-1}, attained straddling zero
    const auto frac = increment_bound(ConvexLoss::power(1.5), 0.4);
    CHECK(frac.c0 == doctest::Approx(2.0 * 1.5 * std::pow(0.2, 0.5)).epsilon(1e-4));
    CHECK(frac.c0 <= frac.c0_closed + 1e-9);

    CHECK_THROWS_AS(increment_bound(ConvexLoss::huber(1.0), -1.0), ConfigError);
    GridSpec empty;
    empty.h_fractions.clear();
    CHECK_THROWS_AS(increment_bound(ConvexLoss::huber(1.0), 0.5, empty), ConfigError);
}

TEST_CASE("psi is nondecreasing on a random sorted grid") {
    Rng rng(42);
    for (const auto& loss : all_losses()) {
        std::vector<double> grid(1000);
        for (auto& u : grid) u = 20.0 * (rng.uniform01() - 0.5);
        grid.push_back(0.0);
        std::sort(grid.begin(), grid.end());
        for (std::size_t i = 1; i < grid.size(); ++i)
            REQUIRE(psi(loss, grid[i - 1]) <= psi(loss, grid[i]) + 1e-15);
    }
}

TEST_CASE("sandwich psi- <= psi <= psi+") {
    Rng rng(7);
    for (const auto& loss : all_losses()) {
        std::vector<double> points(1000);
        for (auto& u : points) u = 10.0 * (rng.uniform01() - 0.5);
        points.push_back(0.0);
        for (double u : points) {
            const auto [lo, hi] = psi_one_sided(loss, u);
            const double mid = psi(loss, u);
            REQUIRE(lo <= mid + 1e-15);
            REQUIRE(mid <= hi + 1e-15);
            REQUIRE(lo <= hi);
        }
    }
}

TEST_CASE("fundamental theorem: rho(b) - rho(a) = int_a^b psi") {
    Rng rng(11);
    for (const auto& loss : all_losses()) {
        for (int rep = 0; rep < 20; ++rep) {
            const double a = 10.0 * (rng.uniform01() - 0.5);
            const double b = 10.0 * (rng.uniform01() - 0.5);
            const double lhs = rho(loss, b) - rho(loss, a);
            REQUIRE(std::abs(lhs - integrate_psi(loss, a, b)) <= 1e-8);
        }
    }
}

TEST_CASE("convexity via midpoint test") {
    Rng rng(13);
    for (const auto& loss : all_losses()) {
        for (int rep = 0; rep < 1000; ++rep) {
            double u = 12.0 * (rng.uniform01() - 0.5);
            double v = 12.0 * (rng.uniform01() - 0.5);
            const double lambda = rng.uniform01();
            const double mixed = rho(loss, lambda * u + (1.0 - lambda) * v);
            REQUIRE(mixed <= lambda * rho(loss, u) + (1.0 - lambda) * rho(loss, v) + 1e-12);
        }
    }
}

TEST_CASE("array overloads match the scalar path") {
    Array u(5);
    u << -2.0, -0.5, 0.0, 0.5, 2.0;
    for (const auto& loss : all_losses()) {
        const Array r = rho(loss, u);
        const Array s = psi(loss, u);
        for (Index i = 0; i < u.size(); ++i) {
            CHECK(r[i] == rho(loss, u[i]));
            CHECK(s[i] == psi(loss, u[i]));
        }
    }
}

TEST_CASE("float instantiation of the scalar kernels") {
    const ConvexLoss loss = ConvexLoss::huber(1.0);
    CHECK(rho(loss, 0.5f) == doctest::Approx(0.125f));
    CHECK(psi(loss, 3.0f) == doctest::Approx(1.0f));
}
