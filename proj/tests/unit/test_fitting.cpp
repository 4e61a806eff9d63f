#include <doctest.h>

#include "excitrans/experiments.hpp"
#include "excitrans/fitting.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace excitrans;

TEST_CASE("power law recovered exactly") {
    std::vector<double> xs, ys;
    for (double x : {10.0, 20.0, 40.0, 80.0, 160.0}) {
        xs.push_back(x);
        ys.push_back(3.0 / (x * x));
    }
    const ScalingFit f = fit_scaling(xs, ys, ScalingModel::PowerLaw);
    CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-9));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.points == 5);
    CHECK(f.predict(50.0) == doctest::Approx(3.0 / 2500.0).epsilon(1e-9));
}

TEST_CASE("exponential rate recovered exactly") {
    std::vector<double> xs, ys;
    for (int i = 0; i < 8; ++i) {
        xs.push_back(i);
        ys.push_back(0.5 * std::exp(-static_cast<double>(i)));
    }
    const ScalingFit f = fit_scaling(xs, ys, ScalingModel::Exponential);
    CHECK(f.slope == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fit rejects short or non-positive data") {
    const std::vector<double> three{1, 2, 3};
    CHECK_THROWS_AS((void)fit_scaling(three, three, ScalingModel::PowerLaw), std::invalid_argument);
    const std::vector<double> xs{1, 2, 3, 4};
    const std::vector<double> ys{1, -2, 3, 4};
    CHECK_THROWS_AS((void)fit_scaling(xs, ys, ScalingModel::Exponential), std::invalid_argument);
    const std::vector<double> zero_x{0, 2, 3, 4};
    CHECK_THROWS_AS((void)fit_scaling(zero_x, xs, ScalingModel::PowerLaw), std::invalid_argument);
}

TEST_CASE("R squared of noisy data matches an independent computation") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 0.1);
    std::vector<double> xs, ys;
    for (int i = 1; i <= 20; ++i) {
        xs.push_back(i);
        ys.push_back(std::exp(-0.3 * i + noise(rng)));
    }
    const ScalingFit f = fit_scaling(xs, ys, ScalingModel::Exponential);
    // Closed-form OLS on (x, log y).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double l = std::log(ys[i]);
        sx += xs[i];
        sy += l;
        sxx += xs[i] * xs[i];
        sxy += xs[i] * l;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double l = std::log(ys[i]);
        ss_res += std::pow(l - (intercept + slope * xs[i]), 2);
        ss_tot += std::pow(l - sy / n, 2);
    }
    CHECK(f.slope == doctest::Approx(slope).epsilon(1e-10));
    CHECK(f.r_squared == doctest::Approx(1.0 - ss_res / ss_tot).epsilon(1e-10));
}

TEST_CASE("crossover of a step curve sits at the step") {
    std::vector<double> xs, ys;
    for (int i = 0; i <= 16; ++i) {
        const double x = 0.01 * std::pow(10.0, i / 8.0);
        xs.push_back(x);
        ys.push_back(x < 0.1 ? 1e-4 : 1.0);
    }
    const auto c = crossover_locator(xs, ys);
    REQUIRE(c.has_value());
    CHECK(c->interval == 7);
    CHECK(c->x_star > xs[7]);
    CHECK(c->x_star < xs[8]);
}

TEST_CASE("flat curve has no crossover") {
    const std::vector<double> xs{1, 2, 4, 8, 16};
    const std::vector<double> ys{2, 2, 2, 2, 2};
    CHECK_FALSE(crossover_locator(xs, ys).has_value());
}

TEST_CASE("joint power law in two variables") {
    std::vector<double> a, b, y;
    for (double x1 : {0.5, 1.0, 2.0, 4.0}) {
        for (double x2 : {50.0, 100.0, 200.0}) {
            a.push_back(x1);
            b.push_back(x2);
            y.push_back(7.0 * std::pow(x1, 4.0) / (x2 * x2));
        }
    }
    const PowerLaw2D f = fit_power_law_2d(a, b, y);
    CHECK(f.exponent_x1 == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(f.exponent_x2 == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(f.r_squared == doctest::Approx(1.0));
}

TEST_CASE("relative spread") {
    const std::vector<double> v{1.0, 1.05, 1.1};
    CHECK(relative_spread(v) == doctest::Approx(0.1));
    const std::vector<double> bad{0.0, 1.0};
    CHECK_THROWS_AS((void)relative_spread(bad), std::invalid_argument);
}
