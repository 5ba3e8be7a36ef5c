#include "ddegrowth/logreal.hpp"

#include <catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

using namespace ddegrowth;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Distance in representable doubles; both arguments finite.
std::int64_t ulp_distance(double a, double b) {
    const auto key = [](double x) {
        const auto bits = std::bit_cast<std::int64_t>(x);
        return bits < 0 ? std::numeric_limits<std::int64_t>::min() - bits : bits;
    };
    const std::int64_t d = key(a) - key(b);
    return d < 0 ? -d : d;
}

LogReal L(double v) { return LogReal::from_log(v); }

}  // namespace

TEST_CASE("log_add on small cases", "[logdomain]") {
    CHECK_THAT(log_add(L(0.0), L(0.0)).log_value(), WithinRel(std::log(2.0), 1e-15));
    CHECK(log_add(LogReal::zero(), L(3.5)).log_value() == 3.5);
    CHECK(log_add(L(3.5), LogReal::zero()).log_value() == 3.5);
    CHECK(log_add(L(1000.0), L(0.0)).log_value() == 1000.0);
    CHECK(log_add(LogReal::zero(), LogReal::zero()).is_zero());
}

TEST_CASE("log_add with an infinite argument stays infinite", "[logdomain]") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(log_add(L(inf), L(inf)).log_value() == inf);
    CHECK(log_add(L(inf), L(2.0)).log_value() == inf);
}

TEST_CASE("log_scale", "[logdomain]") {
    CHECK_THAT(log_scale(L(0.0), 2.0).log_value(), WithinRel(std::log(2.0), 1e-15));
    CHECK(log_scale(LogReal::zero(), 5.0).is_zero());
    CHECK(log_scale(L(10.0), 1.0).log_value() == 10.0);
    CHECK_THROWS_AS(log_scale(L(1.0), 0.0), DomainError);
    CHECK_THROWS_AS(log_scale(L(1.0), -2.0), DomainError);
    CHECK_THROWS_AS(log_scale(L(1.0), std::nan("")), DomainError);
}

TEST_CASE("from_value and value", "[logdomain]") {
    CHECK(LogReal::from_value(0.0).is_zero());
    CHECK_THAT(LogReal::from_value(7.0).value(), WithinRel(7.0, 1e-15));
    CHECK_THROWS_AS(LogReal::from_value(-1.0), DomainError);
    CHECK_THROWS_AS(LogReal::from_value(std::nan("")), DomainError);
    CHECK(std::isinf(L(1e4).value()));
}

TEST_CASE("horizon signal past 1e308", "[logdomain]") {
    CHECK_FALSE(L(1e308).exceeds_horizon());
    CHECK(L(1.5e308).exceeds_horizon());
    CHECK(L(std::numeric_limits<double>::infinity()).exceeds_horizon());
}

TEST_CASE("log_add is commutative and associative to 4 ulp", "[logdomain][property]") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> u(-700.0, 700.0);
    for (int i = 0; i < 20000; ++i) {
        const LogReal a = L(u(rng));
        const LogReal b = L(u(rng));
        const LogReal c = L(u(rng));
        INFO("a=" << a.log_value() << " b=" << b.log_value() << " c=" << c.log_value());
        REQUIRE(log_add(a, b).log_value() == log_add(b, a).log_value());
        const double left = log_add(log_add(a, b), c).log_value();
        const double right = log_add(a, log_add(b, c)).log_value();
        REQUIRE(ulp_distance(left, right) <= 4);
    }
}

TEST_CASE("adding bottom round-trips exactly", "[logdomain][property]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-300.0, 300.0);
    for (int i = 0; i < 5000; ++i) {
        const double v = u(rng);
        REQUIRE(log_add(L(v), LogReal::zero()).log_value() == v);
    }
}

TEST_CASE("log_add is monotone in each argument", "[logdomain][property]") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-700.0, 700.0);
    for (int i = 0; i < 20000; ++i) {
        double a = u(rng);
        double a2 = u(rng);
        if (a > a2) {
            std::swap(a, a2);
        }
        const LogReal b = L(u(rng));
        REQUIRE(log_add(L(a), b) <= log_add(L(a2), b));
    }
}

TEST_CASE("ordering follows the represented values", "[logdomain]") {
    CHECK(LogReal::zero() < L(-1e300));
    CHECK(L(1.0) < L(2.0));
    CHECK(L(2.0) == L(2.0));
    CHECK(LogReal::from_value(3.0) > LogReal::from_value(2.0));
}
