#include "dpcmux/logvalue.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using dpcmux::LogValue;

TEST_CASE("LogValue round-trips doubles across the full exponent range") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> expo(-300.0, 300.0);
    std::uniform_real_distribution<double> mant(1.0, 10.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = (i % 2 ? -1.0 : 1.0) * mant(rng) * std::pow(10.0, expo(rng));
        const double back = LogValue::from_double(x).to_double();
        CHECK(back == doctest::Approx(x).epsilon(1e-12));
    }
    CHECK(LogValue::from_double(0.0).is_zero());
    CHECK(LogValue::from_double(0.0).to_double() == 0.0);
    CHECK(LogValue::from_double(0.0).sign() == 0);
}

TEST_CASE("LogValue products track log sums and signs") {
    auto a = LogValue::from_double(-3.5e200);
    auto b = LogValue::from_double(2.0e-150);
    auto p = a * b;
    CHECK(p.sign() == -1);
    CHECK(p.log_magnitude() == doctest::Approx(std::log(3.5e200) + std::log(2.0e-150)));
    CHECK((a * LogValue::zero()).is_zero());
    CHECK((a / a).to_double() == doctest::Approx(1.0));
    // A product far outside double range keeps a finite log.
    auto huge = LogValue::from_log(500.0).pow_int(10);
    CHECK(huge.log_magnitude() == doctest::Approx(5000.0));
    CHECK(LogValue::from_log(300.0).pow_int(0).to_double() == 1.0);
}

TEST_CASE("LogValue signed addition") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = u(rng), y = u(rng);
        const double s = (LogValue::from_double(x) + LogValue::from_double(y)).to_double();
        CHECK(s == doctest::Approx(x + y).epsilon(1e-12));
        const double d = (LogValue::from_double(x) - LogValue::from_double(y)).to_double();
        CHECK(d == doctest::Approx(x - y).epsilon(1e-12));
    }
    auto v = LogValue::from_double(5.0);
    CHECK((v - v).is_zero());
    CHECK((v + LogValue::zero()).to_double() == doctest::Approx(5.0));
}
