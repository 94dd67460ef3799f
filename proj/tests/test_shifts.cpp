#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ratetip/shifts.hpp"

using namespace ratetip;

namespace {

ShiftSpec make(ShiftShape shape, double base, double delta, double eps, double c = 1.0,
               double tau = 0.0) {
    ShiftSpec s;
    s.shape = shape;
    s.base = base;
    s.magnitude = delta;
    s.rate = eps;
    s.c = c;
    s.tau = tau;
    return s;
}

} // namespace

TEST_CASE("shape values at the pulse centre") {
    CHECK(evaluate(make(ShiftShape::tanh_mono, 0.75, 0.6, 0.1), 0.0) ==
          Catch::Approx(0.75 + 0.3));
    CHECK(evaluate(make(ShiftShape::sech_pulse, 0.75, 0.6, 0.1), 0.0) ==
          Catch::Approx(0.75 + 0.6));
    CHECK(evaluate(make(ShiftShape::tanh_mono, 0.75, 0.6, 0.1), 1e9) ==
          Catch::Approx(1.35));
    CHECK(evaluate(make(ShiftShape::sech_pulse, 0.75, 0.6, 0.1), 1e9) ==
          Catch::Approx(0.75).margin(1e-12));
}

TEST_CASE("plateau shift with c = 1, tau = 0 equals the pulse pointwise") {
    const auto plateau = make(ShiftShape::sech_plateau, -1.0, 2.0, 0.05, 1.0, 0.0);
    const auto pulse = make(ShiftShape::sech_pulse, -1.0, 2.0, 0.05);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ut(-400.0, 400.0);
    for (int i = 0; i < 1000; ++i) {
        const double t = ut(rng);
        CHECK(evaluate(plateau, t) == Catch::Approx(evaluate(pulse, t)).epsilon(1e-14));
    }
}

TEST_CASE("sech_mono rises like the pulse and holds its maximum") {
    const auto mono = make(ShiftShape::sech_mono, -1.0, 2.0, 0.1);
    const auto pulse = make(ShiftShape::sech_pulse, -1.0, 2.0, 0.1);
    CHECK(evaluate(mono, -3.0) == Catch::Approx(evaluate(pulse, -3.0)));
    CHECK(evaluate(mono, 5.0) == Catch::Approx(1.0));
    CHECK(evaluate(mono, 500.0) == Catch::Approx(1.0));
}

TEST_CASE("start times match the closed forms") {
    const double eps = 0.37;
    const auto tanh_shift = make(ShiftShape::tanh_mono, 0.0, 1.0, eps);
    const auto pulse = make(ShiftShape::sech_pulse, 0.0, 1.0, eps);
    CHECK(start_time(tanh_shift) == Catch::Approx(-3.4534 / eps).margin(1e-3 / eps));
    CHECK(start_time(pulse) == Catch::Approx(-7.6009 / eps).margin(1e-3 / eps));
    // defining equation round-trip for every shape
    for (const auto& s : {tanh_shift, pulse, make(ShiftShape::sech_plateau, 0.3, 2.0, eps, 2.0, 5.0),
                          make(ShiftShape::sech_mono, -1.0, 2.0, eps)}) {
        for (double d : {1e-3, 0.02, 0.4}) {
            const double t0 = start_time(s, d);
            CHECK(t0 < 0.0);
            CHECK(evaluate(s, t0) - (s.base + d * s.magnitude) == Catch::Approx(0.0).margin(1e-12));
        }
    }
    CHECK_THROWS_AS(start_time(pulse, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(start_time(pulse, 1.0), std::invalid_argument);
}

TEST_CASE("exceedance time of the plateaued shift") {
    // c=1, tau=0, mu_-=-1, Delta=2, mu_b=0: 20 * asech(1/2) = 20 ln(2+sqrt(3))
    const auto pulse = make(ShiftShape::sech_pulse, -1.0, 2.0, 0.1);
    CHECK(exceedance_time(pulse, 0.0) == Catch::Approx(26.3392).margin(1e-4));
    const auto plateau5 = make(ShiftShape::sech_plateau, -1.0, 2.0, 0.1, 1.0, 5.0);
    CHECK(exceedance_time(plateau5, 0.0) ==
          Catch::Approx(exceedance_time(pulse, 0.0) + 5.0).epsilon(1e-12));
    // mu_b -> mu_- + Delta: only the plateau remains
    CHECK(exceedance_time(plateau5, 1.0 - 1e-13) == Catch::Approx(5.0).margin(1e-4));
    CHECK_THROWS_AS(exceedance_time(pulse, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(exceedance_time(pulse, -1.0), std::invalid_argument);
}

TEST_CASE("peak slope is eps*Delta/2 for the tanh and sech shapes") {
    for (auto shape : {ShiftShape::tanh_mono, ShiftShape::sech_pulse}) {
        const auto s = make(shape, 0.2, 1.7, 0.23);
        double max_sampled = 0.0;
        for (int i = -4000; i <= 4000; ++i)
            max_sampled = std::max(max_sampled, std::abs(derivative(s, i * 0.01 / s.rate)));
        CHECK(max_rate_of_change(s) == Catch::Approx(0.5 * 0.23 * 1.7).epsilon(1e-14));
        CHECK(max_sampled <= max_rate_of_change(s) + 1e-9);
        CHECK(max_sampled > 0.999 * max_rate_of_change(s));
    }
}

TEST_CASE("plateau shift is C1: one-sided slopes vanish at the joints") {
    const auto s = make(ShiftShape::sech_plateau, 0.0, 1.0, 0.4, 2.5, 3.0);
    const double h = 1e-7;
    CHECK(std::abs((evaluate(s, 0.0) - evaluate(s, -h)) / h) < 1e-5);
    CHECK(std::abs((evaluate(s, s.tau + h) - evaluate(s, s.tau)) / h) < 1e-5);
    CHECK(derivative(s, 0.0) == Catch::Approx(0.0).margin(1e-14));
    CHECK(derivative(s, s.tau) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("the pulse is symmetric in time") {
    const auto s = make(ShiftShape::sech_pulse, 1.0, 0.5, 0.8);
    for (double t : {0.1, 1.0, 7.3, 55.0})
        CHECK(evaluate(s, -t) == Catch::Approx(evaluate(s, t)).epsilon(1e-15));
}

TEST_CASE("settle time leaves a negligible residue") {
    for (auto shape :
         {ShiftShape::tanh_mono, ShiftShape::sech_pulse, ShiftShape::sech_mono,
          ShiftShape::sech_plateau}) {
        const auto s = make(shape, 0.5, 1.0, 0.05, 0.5, 12.0);
        const double te = settle_time(s);
        const double final_value = evaluate(s, 1e12);
        CHECK(std::abs(evaluate(s, te) - final_value) < 1e-7 * s.magnitude);
    }
}

TEST_CASE("spec validation rejects bad fields") {
    auto s = make(ShiftShape::sech_plateau, 0.0, 1.0, 0.1, 0.0, 1.0);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = make(ShiftShape::tanh_mono, 0.0, -1.0, 0.1);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = make(ShiftShape::tanh_mono, 0.0, 1.0, 0.0);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    CHECK_THROWS_AS(shift_shape_from_name("bogus"), std::invalid_argument);
    CHECK(shift_shape_from_name("sech_pulse") == ShiftShape::sech_pulse);
    CHECK(shift_target_from_name("m") == ShiftTarget::m);
}
