#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "sticky/errors.hpp"
#include "sticky/specfun.hpp"

using namespace sticky;
namespace sf = sticky::specfun;
using sf::QuadratureMethod;
using sf::QuadratureSpec;
using sf::RealFunction;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

// Adaptive Simpson, used only as an independent oracle.
double simpson(const RealFunction& f, double a, double b, double fa, double fm, double fb, double whole, double eps,
               int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * eps) return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, eps / 2, depth - 1);
}

double simpson(const RealFunction& f, double a, double b, double eps) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), eps, 50);
}

// Power series sum (z/2)^(2k+1) / (k! (k+1)!) in long double.
double i1_series(double z) {
    long double term = z / 2.0L, sum = term;
    const long double q = static_cast<long double>(z) * z / 4.0L;
    for (int k = 1; k < 400; ++k) {
        term *= q / (static_cast<long double>(k) * (k + 1));
        sum += term;
        if (term < sum * 1e-21L) break;
    }
    return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("erfc trivial values and reflection") {
    CHECK(sf::erfc(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sf::erfc(-1.0) + sf::erfc(1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(sf::erfc(-30.0) == 2.0);
    CHECK(sf::erfc(40.0) == 0.0);
}

TEST_CASE("erfc against frozen high-precision values") {
    struct Row {
        double z, value;
    };
    const Row rows[] = {
        {0.1, 0.8875370839817151016},        {0.5, 0.47950012218695346232},
        {1.0, 0.15729920705028513066},       {-1.0, 1.8427007929497148693},
        {2.9, 4.1097878099458857996e-5},     {3.0, 2.2090496998585441373e-5},
        {3.1, 1.1648657367199589313e-5},     {5.0, 1.5374597944280348502e-12},
        {10.0, 2.088487583762544757e-45},    {26.0, 5.6631924088561428465e-296},
    };
    for (const auto& r : rows) {
        CAPTURE(r.z);
        CHECK(rel(sf::erfc(r.z), r.value) < 1e-12);
    }
    CHECK(std::fabs(sf::erfc(0.5) - 0.4795001222) < 1e-9);
}

TEST_CASE("erfc agrees with std::erfc on a dense grid") {
    double worst = 0.0;
    for (double z = -6.0; z <= 26.0; z += 0.01) worst = std::max(worst, rel(sf::erfc(z), std::erfc(z)));
    CHECK(worst < 1e-12);
}

TEST_CASE("erfc rejects non-finite input") {
    CHECK_THROWS_AS(sf::erfc(std::numeric_limits<double>::quiet_NaN()), DomainError);
    CHECK_THROWS_AS(sf::erfc(std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("bessel_i1") {
    CHECK(sf::bessel_i1(0.0) == 0.0);
    CHECK(sf::bessel_i1(-2.5) == doctest::Approx(-sf::bessel_i1(2.5)).epsilon(1e-15));
    CHECK(std::fabs(sf::bessel_i1(1.0) - 0.5651591040) < 1e-9);
    CHECK(rel(sf::bessel_i1(1.0), 0.56515910399248502721) < 1e-12);
    CHECK(rel(sf::bessel_i1(50.0), 2.9030785901035567968e20) < 1e-10);
    double worst = 0.0;
    for (double z = 0.05; z <= 50.0; z += 0.05) {
        worst = std::max(worst, rel(sf::bessel_i1(z), i1_series(z)));
        worst = std::max(worst, rel(sf::bessel_i1(z), std::cyl_bessel_i(1.0, z)));
    }
    CHECK(worst < 1e-10);
    CHECK_THROWS_AS(sf::bessel_i1(std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("bessel_i0") {
    CHECK(sf::bessel_i0(0.0) == 1.0);
    double worst = 0.0;
    for (double z = 0.0; z <= 50.0; z += 0.05) worst = std::max(worst, rel(sf::bessel_i0(z), std::cyl_bessel_i(0.0, z)));
    CHECK(worst < 1e-10);
    CHECK(sf::bessel_i0(-3.0) == sf::bessel_i0(3.0));
}

TEST_CASE("normal helpers") {
    CHECK(sf::normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(sf::normal_cdf(1.0) + sf::normal_cdf(-1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sf::normal_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)));
}

TEST_CASE("QuadratureSpec validation") {
    QuadratureSpec s;
    CHECK_NOTHROW(s.validate());
    s.abs_tol = 0.0;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s = {};
    s.node_count = 1;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s = {};
    s.max_subdivisions = 0;
    CHECK_THROWS_AS(s.validate(), DomainError);
}

TEST_CASE("gauss_expectation moments") {
    CHECK(sf::gauss_expectation([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(sf::gauss_expectation([](double z) { return z * z; }) - 1.0) < 1e-10);
    QuadratureSpec gh;
    gh.method = QuadratureMethod::gauss_hermite;
    CHECK(sf::gauss_expectation([](double z) { return z * z * z * z; }, gh) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::fabs(sf::gauss_expectation([](double z) { return std::cos(z); }, gh) - std::exp(-0.5)) < 1e-12);
}

TEST_CASE("gauss_expectation of a kinked integrand") {
    const auto g = [](double z) { return sf::erfc(std::fabs(z)); };
    const double frozen = 0.39182655203060727017;
    const double oracle =
        2.0 * simpson([&](double z) { return g(z) * sf::normal_pdf(z); }, 0.0, 9.0, 1e-14);
    CHECK(std::fabs(oracle - frozen) < 1e-11);
    CHECK(std::fabs(sf::gauss_expectation(g) - frozen) < 1e-11);
}

TEST_CASE("gauss_expectation reports non-convergence") {
    QuadratureSpec s;
    s.max_subdivisions = 1;
    s.abs_tol = 1e-15;
    s.rel_tol = 1e-15;
    const auto rough = [](double z) { return std::sqrt(std::fabs(std::sin(40.0 * z))); };
    try {
        sf::gauss_expectation(rough, s);
        FAIL("expected AccuracyError");
    } catch (const AccuracyError& e) {
        CHECK(std::isfinite(e.best_estimate()));
        CHECK(e.residual() > 0.0);
    }
}

TEST_CASE("integrate_piecewise over the real line") {
    const double c = std::sqrt(3.0), b = 0.7;
    const auto f = [&](double x) { return std::exp(-std::fabs(x) - c * std::fabs(b - x)); };
    // Piecewise exponential antiderivative: (-inf, 0), (0, b), (b, inf).
    const double oracle = std::exp(-c * b) / (1.0 + c) + std::exp(-c * b) * std::expm1((c - 1.0) * b) / (c - 1.0) +
                          std::exp(-b) / (1.0 + c);
    const double frozen = 0.56263909224237059241;
    CHECK(std::fabs(oracle - frozen) < 1e-15);
    const double bps[] = {0.0, b};
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(std::fabs(sf::integrate_piecewise(f, -inf, inf, bps) - frozen) < 1e-11);
    CHECK(std::fabs(sf::integrate_interval([](double x) { return std::exp(-x); }, 0.0, inf) - 1.0) < 1e-11);
    CHECK(sf::integrate_interval([](double x) { return x; }, 2.0, 2.0) == 0.0);
}

TEST_CASE("gauss_hermite_rule") {
    const auto rule = sf::gauss_hermite_rule(20);
    REQUIRE(rule.nodes.size() == 20);
    double sum = 0.0, second = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i];
        second += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
    }
    CHECK(sum == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
    CHECK(second == doctest::Approx(std::sqrt(std::numbers::pi) / 2.0).epsilon(1e-13));
    CHECK_THROWS_AS(sf::gauss_hermite_rule(1), DomainError);
}
