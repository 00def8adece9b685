#include "doctest.h"

#include "qeilab/tower.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

using namespace qeilab::tower;

namespace {

// Brute-force partial sums in extended precision: a code path that shares
// nothing with the library's certified summation.
long double brute_sum(const MassTower& t, const std::function<long double(long double)>& term,
                      std::uint64_t n) {
    long double acc = 0.0L;
    for (std::uint64_t r = 1; r <= n; ++r) acc += term(static_cast<long double>(t.mass(r)));
    return acc;
}

}  // namespace

TEST_SUITE("tower") {

TEST_CASE("mass laws and counting functions") {
    const MassTower arith = MassTower::arithmetic(0.5);
    CHECK(arith.m1() == 0.5);
    CHECK(arith.mass(3) == doctest::Approx(1.5));
    CHECK(arith.counting(0.4) == 0.0);
    CHECK(arith.counting(0.5) == 1.0);
    CHECK(arith.counting(1.74) == 3.0);

    const MassTower logt = MassTower::logarithmic(1.0);
    CHECK(logt.mass(1) == doctest::Approx(std::log(2.0) / 2.0));
    // N(1) = floor(e^2 - 1) = 6 for unit density.
    CHECK(logt.counting(1.0) == 6.0);
    CHECK(logt.counting(0.0) == 0.0);
    // Left limit at a mass: m_6 = log(7)/2, so N just below it is 5.
    const double m6 = std::log(7.0) / 2.0;
    CHECK(logt.counting(std::nextafter(m6, 0.0)) == 5.0);
    CHECK(logt.counting(m6) == 6.0);

    const MassTower fin = MassTower::finite({1.0, 1.0, 2.0});
    CHECK(fin.counting(1.0) == 2.0);
    CHECK(fin.counting(5.0) == 3.0);
    CHECK(fin.is_finite());

    const auto jumps = arith.masses_between(0.0, 2.0, 100);
    CHECK(jumps == std::vector<double>{0.5, 1.0, 1.5, 2.0});
}

TEST_CASE("construction rejects gapless or disordered spectra") {
    CHECK_THROWS_AS(MassTower::arithmetic(0.0), std::invalid_argument);
    CHECK_THROWS_AS(MassTower::logarithmic(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(MassTower::finite({}), std::invalid_argument);
    CHECK_THROWS_AS(MassTower::finite({2.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(MassTower::finite({0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("G(4) on the unit arithmetic tower is 1/(e-1)") {
    const MassTower t = MassTower::arithmetic(1.0);
    const SumVerdict g = weighted_mass_sum(t, Weight::G, {.beta = 4.0});
    REQUIRE(g.status == SumVerdict::Status::Convergent);
    const double closed = 1.0 / (std::exp(1.0) - 1.0);
    CHECK(std::abs(g.value - closed) <= 1e-10 + g.remainder_bound);
    CHECK(g.remainder_bound < 1e-8);
}

TEST_CASE("F(1) on the unit arithmetic tower matches brute-force summation") {
    const MassTower t = MassTower::arithmetic(1.0);
    const SumVerdict f = weighted_mass_sum(t, Weight::F, {.beta = 1.0});
    REQUIRE(f.status == SumVerdict::Status::Convergent);
    const long double oracle =
        brute_sum(t, [](long double m) { return std::exp(-4.0L * m) / (m * m); }, 60);
    CHECK(std::abs(f.value - double(oracle)) <= 1e-14 + f.remainder_bound);
    // Frozen digits as a regression pin.
    CHECK(f.value == doctest::Approx(0.0184001943529288).epsilon(1e-12));
}

TEST_CASE("logarithmic G(16) at unit density is the zeta tail zeta(2) - 1") {
    const MassTower t = MassTower::logarithmic(1.0);
    // G(16) = sum (r+1)^{-2} = zeta(2) - 1, evaluated via the standard-library
    // zeta as an independent oracle.
    const SumVerdict g = weighted_mass_sum(t, Weight::G, {.beta = 16.0});
    REQUIRE(g.status == SumVerdict::Status::Convergent);
    const double closed = std::riemann_zeta(2.0) - 1.0;
    CHECK(std::abs(g.value - closed) <= 1e-9 + g.remainder_bound);
}

TEST_CASE("logarithmic F diverges below half the density scale and converges above") {
    const MassTower t = MassTower::logarithmic(1.0);
    const SumVerdict below = weighted_mass_sum(t, Weight::F, {.beta = 0.4});
    REQUIRE(below.status == SumVerdict::Status::Divergent);
    REQUIRE(below.witness.has_value());
    CHECK(!below.witness->comparison.empty());
    CHECK(!below.witness->partial_sums.empty());
    // Partial sums must actually grow.
    const auto& ps = below.witness->partial_sums;
    CHECK(ps.back().second > ps.front().second);

    const SumVerdict above = weighted_mass_sum(t, Weight::F, {.beta = 0.6});
    CHECK(above.status == SumVerdict::Status::Convergent);
}

TEST_CASE("custom towers answer Undetermined without a certificate and certify with one") {
    const std::vector<double> prefix{1.0, 2.0, 3.0};
    const MassTower blind = MassTower::custom(prefix);
    const SumVerdict u = weighted_mass_sum(blind, Weight::G, {.beta = 4.0});
    CHECK(u.status == SumVerdict::Status::Undetermined);

    const MassTower certified =
        MassTower::custom(prefix, LinearTailCertificate{0.0, 1.0, 1});
    const SumVerdict g = weighted_mass_sum(certified, Weight::G, {.beta = 4.0});
    REQUIRE(g.status == SumVerdict::Status::Convergent);
    // The certificate pins the tail into an interval; the exact arithmetic
    // value must lie inside value +- remainder.
    const double exact = 1.0 / (std::exp(1.0) - 1.0);
    CHECK(std::abs(g.value - exact) <= g.remainder_bound + 1e-12);
}

TEST_CASE("counting/integral identity holds on both reference spectra") {
    const IdentityCheck arith = counting_integral_identity_check(MassTower::arithmetic(1.0), 4.0);
    REQUIRE(arith.status == IdentityCheck::Status::Ok);
    CHECK(arith.residual < 1e-5);
    CHECK(arith.series == doctest::Approx(1.0 / (std::exp(1.0) - 1.0)).epsilon(1e-8));

    const IdentityCheck logt = counting_integral_identity_check(MassTower::logarithmic(1.0), 16.0);
    REQUIRE(logt.status == IdentityCheck::Status::Ok);
    CHECK(logt.residual < 1e-5);

    // At beta = 8 the logarithmic G series is harmonic, so the identity is
    // reported as divergent rather than evaluated.
    const IdentityCheck div = counting_integral_identity_check(MassTower::logarithmic(1.0), 8.0);
    CHECK(div.status == IdentityCheck::Status::DivergentG);
}

TEST_CASE("index bounds on a single-mass tower reduce to closed forms") {
    const MassTower t = MassTower::finite({1.0});
    const IndexBounds b = nuclearity_index_bounds(t, {.beta = 1.0, .radius = 2.0});
    REQUIRE(b.status == SumVerdict::Status::Convergent);
    // F(1) = e^{-4}, so the lower bound is e^{-2}.
    CHECK(b.lower == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    // Exact upper: exp(R^3/beta^3 * |log(1 - e^{-1/2})|).
    const double L = std::abs(std::log(1.0 - std::exp(-0.5)));
    CHECK(b.upper_exact == doctest::Approx(std::exp(8.0 * L)).epsilon(1e-12));
    // Simplified upper: exp(R^3/(m1 beta^4) * e^{-1/4}).
    CHECK(b.upper_simplified == doctest::Approx(std::exp(8.0 * std::exp(-0.25))).epsilon(1e-12));

    CHECK_THROWS_AS(nuclearity_index_bounds(t, {.beta = 1.0, .radius = 0.5}),
                    std::invalid_argument);
}

TEST_CASE("local normality needs both tempering sums") {
    const LocalNormality ok = local_normality_check(MassTower::arithmetic(1.0), 1.0);
    CHECK(ok.holds);
    CHECK(ok.half.status == SumVerdict::Status::Convergent);
    CHECK(ok.twice.status == SumVerdict::Status::Convergent);
    // Half-weight sum at beta = 1 is geometric: 1/(e^{1/2} - 1).
    CHECK(std::abs(ok.half.value - 1.0 / (std::exp(0.5) - 1.0)) <= 1e-10 + ok.half.remainder_bound);

    // Logarithmic tower at small beta: the half sum is a divergent power series.
    const LocalNormality bad = local_normality_check(MassTower::logarithmic(1.0), 2.0);
    CHECK(!bad.holds);
}

TEST_CASE("nuclearity classification separates the reference spectra") {
    const NuclearityVerdict arith = classify_nuclearity(MassTower::arithmetic(1.0));
    CHECK(arith.necessary == TriState::Yes);
    CHECK(arith.sufficient == TriState::Yes);
    // G(beta) = 1/(e^{beta m1/4}-1) grows like beta^{-1}, and the reported
    // exponent is the one of the index criterion e^{(beta0/beta)^n}, whose
    // log picks up the extra beta^{-4} prefactor: n = 1 + 4.
    CHECK(arith.n_fit > 4.5);
    CHECK(arith.n_fit < 5.5);
    CHECK(arith.fit_residual < 0.05);

    const NuclearityVerdict logt = classify_nuclearity(MassTower::logarithmic(1.0));
    CHECK(logt.necessary == TriState::No);
    CHECK(logt.sufficient == TriState::No);
    CHECK(!logt.detail.empty());

    const NuclearityVerdict fin = classify_nuclearity(MassTower::finite({1.0, 2.0}));
    CHECK(fin.necessary == TriState::Yes);
    CHECK(fin.sufficient == TriState::Yes);

    const NuclearityVerdict blind = classify_nuclearity(MassTower::custom({1.0, 2.0}));
    CHECK(blind.necessary == TriState::Undetermined);
    CHECK(blind.sufficient == TriState::Undetermined);
}

TEST_CASE("Tauberian plug-in bound: closed form, family membership, near-optimality") {
    const TauberianBound tb = tauberian_counting_bound(1.0, 1.0, 1.0, 100.0);
    CHECK(tb.beta_star == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(tb.bound_at_beta_star == doctest::Approx(100.0 * std::exp(20.0)).epsilon(1e-12));
    CHECK(tb.B == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tb.C == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(tb.envelope_at_v == doctest::Approx(tb.bound_at_beta_star).epsilon(1e-12));
    CHECK(tauberian_family(1.0, 1.0, 1.0, 100.0, tb.beta_star) ==
          doctest::Approx(tb.bound_at_beta_star).epsilon(1e-12));

    // The plug-in beta* is near the true minimizer: the bound dominates the
    // numeric minimum but not by more than a factor 2.
    double numeric_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 4000; ++i) {
        const double beta = std::pow(10.0, -3.0 + 3.0 * i / 4000.0);
        numeric_min = std::min(numeric_min, tauberian_family(1.0, 1.0, 1.0, 100.0, beta));
    }
    CHECK(tb.bound_at_beta_star >= numeric_min * (1.0 - 1e-12));
    CHECK(tb.bound_at_beta_star <= numeric_min * 2.0);
}

TEST_CASE("weighted sums validate their parameters") {
    const MassTower t = MassTower::arithmetic(1.0);
    CHECK_THROWS_AS(weighted_mass_sum(t, Weight::G, {.beta = 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(weighted_mass_sum(t, Weight::QuarticPhi, {.lambda = -1.0}),
                    std::invalid_argument);
}

}  // TEST_SUITE
