#include "doctest.h"

#include "helpers.hpp"
#include "qeilab/chebyshev.hpp"
#include "qeilab/quadrature.hpp"

#include <cmath>

using namespace qeilab;

TEST_SUITE("quadrature") {

TEST_CASE("finite-interval rule reproduces closed forms") {
    const auto s = quad::integrate([](double x) { return std::sin(x); }, 0.0, std::acos(-1.0));
    CHECK(s.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.error < 1e-8);

    const auto e = quad::integrate([](double x) { return std::exp(x); }, 0.0, 1.0);
    CHECK(e.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("tail doubling converges on an exponential and certifies the stop") {
    const auto r = quad::integrate_to_infinity([](double u) { return std::exp(-u); }, 0.0);
    REQUIRE(r.status == quad::TailResult::Status::Converged);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r.upper > 8.0);
    CHECK(r.doublings >= 1);
}

TEST_CASE("tail doubling declares slow decay divergent instead of guessing") {
    const auto r = quad::integrate_to_infinity([](double u) { return 1.0 / (1.0 + u); }, 0.0);
    CHECK(r.status == quad::TailResult::Status::Divergent);
}

TEST_CASE("split points keep jumps out of the panels") {
    // Integrand with a step at 3.5: exact value 1 + e^{-3.5}.
    auto f = [](double u) { return std::exp(-u) * (u < 3.5 ? 1.0 : 2.0); };
    const std::vector<double> splits{3.5};
    const auto r = quad::integrate_to_infinity(f, 0.0, 8.0, 1e-10, 20, &splits);
    REQUIRE(r.status == quad::TailResult::Status::Converged);
    CHECK(r.value == doctest::Approx(1.0 + std::exp(-3.5)).epsilon(1e-9));
}

TEST_CASE("composite Gauss nodes integrate oscillations and normalize weights") {
    const double two_pi = 2.0 * std::acos(-1.0);
    const quad::Panel p = quad::composite_gauss(8, 0.0, two_pi);
    double wsum = 0.0, cos2 = 0.0;
    for (std::size_t i = 0; i < p.x.size(); ++i) {
        wsum += p.w[i];
        cos2 += p.w[i] * std::cos(p.x[i]) * std::cos(p.x[i]);
    }
    CHECK(wsum == doctest::Approx(two_pi).epsilon(1e-14));
    CHECK(cos2 == doctest::Approx(two_pi / 2.0).epsilon(1e-13));
    CHECK(p.x.size() == 8u * 16u);
}

TEST_CASE("Chebyshev proxy certifies its own fit") {
    const auto proxy = ChebyshevSeries::fit([](double x) { return std::cos(x); }, 0.0, 10.0);
    CHECK(proxy.fit_error() < 1e-11);
    for (double x : {0.37, 4.2, 9.9})
        CHECK(proxy(x) == doctest::Approx(std::cos(x)).epsilon(1e-10));
    // Clamped evaluation outside the fit window.
    CHECK(proxy(11.0) == doctest::Approx(std::cos(10.0)).epsilon(1e-10));
}

TEST_CASE("Chebyshev fit refuses functions whose coefficients do not decay") {
    CHECK_THROWS_AS(ChebyshevSeries::fit([](double x) { return x > 0.5 ? 1.0 : 0.0; }, 0.0,
                                         1.0, 1e-13, 257),
                    NumericError);
}

}  // TEST_SUITE
