#include <catch2/catch_amalgamated.hpp>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "levymix/levy_core.hpp"

using namespace levymix;

namespace {

KoBoLParams symmetric_fixture() {
    // nu 0.5, c 1, lambda +-5: the exponent is real on the real line.
    return {0.5, 1.0, 1.0, 5.0, -5.0, 0.0};
}

// Per-unit-time variance of the KoBoL law, closed form.
double kobol_variance_rate(const KoBoLParams& p) {
    return std::tgamma(2.0 - p.nu) * (p.c_plus * std::pow(-p.lambda_minus, p.nu - 2.0) +
                                      p.c_minus * std::pow(p.lambda_plus, p.nu - 2.0));
}

// Per-unit-time mean, closed form; Gamma(1-nu) through the recursion so
// the tgamma argument stays in (0,1).
double kobol_mean_rate(const KoBoLParams& p) {
    double g1 = std::tgamma(2.0 - p.nu) / (1.0 - p.nu);
    return p.mu + g1 * (p.c_plus * std::pow(-p.lambda_minus, p.nu - 1.0) -
                        p.c_minus * std::pow(p.lambda_plus, p.nu - 1.0));
}

KoBoLParams random_kobol(std::mt19937& gen, bool low_order) {
    std::uniform_real_distribution<double> unu_lo(0.1, 0.95), unu_hi(1.05, 1.9);
    std::uniform_real_distribution<double> uc(0.2, 3.0), ulp(2.0, 8.0), umu(-0.5, 0.5);
    KoBoLParams p;
    p.nu = low_order ? unu_lo(gen) : unu_hi(gen);
    p.c_plus = uc(gen);
    p.c_minus = uc(gen);
    p.lambda_plus = ulp(gen);
    p.lambda_minus = -ulp(gen);
    p.mu = umu(gen);
    return p;
}

}  // namespace

TEST_CASE("kobol exponent matches tabulated values") {
    KoBoLParams p = symmetric_fixture();
    // values computed with 30-digit arithmetic
    struct Row {
        double xi, psi;
    };
    const Row rows[] = {
        {0.5, 0.019755032554766987},
        {1.0, 0.07829600487578421},
        {2.0, 0.30242229147748446},
        {4.0, 1.0757123601064533},
    };
    for (const Row& r : rows) {
        cplx v = kobol_exponent(p, cplx(r.xi, 0.0));
        CHECK(std::abs(v.real() - r.psi) <= 1e-12 * std::abs(r.psi));
        CHECK(std::abs(v.imag()) <= 1e-14);
    }
}

TEST_CASE("kobol exponent basic identities") {
    std::mt19937 gen(2024);
    std::uniform_real_distribution<double> uxi(-10.0, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
        KoBoLParams p = random_kobol(gen, trial % 2 == 0);
        CHECK(std::abs(kobol_exponent(p, cplx(0.0, 0.0))) <= 1e-13);
        for (int k = 0; k < 10; ++k) {
            double xi = uxi(gen);
            cplx plus = kobol_exponent(p, cplx(xi, 0.0));
            cplx minus = kobol_exponent(p, cplx(-xi, 0.0));
            CHECK(std::abs(minus - std::conj(plus)) <= 1e-12 * (1.0 + std::abs(plus)));
            CHECK(plus.real() >= -1e-12);
        }
    }
}

TEST_CASE("kobol exponent rejects arguments off the strip") {
    KoBoLParams p = symmetric_fixture();
    CHECK_NOTHROW(kobol_exponent(p, cplx(1.0, 4.99)));
    CHECK_THROWS_AS(kobol_exponent(p, cplx(1.0, 5.0)), domain_error);
    CHECK_THROWS_AS(kobol_exponent(p, cplx(0.0, -5.1)), domain_error);
}

TEST_CASE("kobol parameter validation") {
    KoBoLParams p = symmetric_fixture();
    p.nu = 1.0;
    CHECK_THROWS_AS(p.validate(), domain_error);
    p.nu = 2.0;
    CHECK_THROWS_AS(p.validate(), domain_error);
    p.nu = -0.3;
    CHECK_THROWS_AS(p.validate(), domain_error);
    p = symmetric_fixture();
    p.c_plus = 0.0;
    CHECK_THROWS_AS(p.validate(), domain_error);
    p = symmetric_fixture();
    p.lambda_minus = 0.5;
    CHECK_THROWS_AS(p.validate(), domain_error);
    p = symmetric_fixture();
    p.lambda_plus = -2.0;
    CHECK_THROWS_AS(p.validate(), domain_error);
    p = symmetric_fixture();
    p.mu = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(p.validate(), domain_error);
}

TEST_CASE("gamma_neg agrees with closed forms") {
    // Gamma(-1/2) = -2 sqrt(pi), Gamma(-3/2) = 4 sqrt(pi) / 3
    CHECK(gamma_neg(0.5) == Catch::Approx(-2.0 * std::sqrt(std::numbers::pi)).epsilon(1e-14));
    CHECK(gamma_neg(1.5) == Catch::Approx(4.0 * std::sqrt(std::numbers::pi) / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(gamma_neg(1.0), domain_error);
    CHECK_THROWS_AS(gamma_neg(2.0), domain_error);
}

TEST_CASE("incomplete_b matches tabulated values and the gamma route") {
    CHECK(incomplete_b(0.5, 5.0) == Catch::Approx(0.79142461922102707).epsilon(1e-10));
    CHECK(incomplete_b(0.5, 2.0) == Catch::Approx(1.1962880133226082).epsilon(1e-10));
    // B(0, lambda) = (1 - e^{-lambda}) / lambda
    CHECK(incomplete_b(0.0, 1.0) ==
          Catch::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));

    // Independent route: B(nu, lambda) = lambda^{nu-1} * gamma_lower(1 - nu, lambda).
    for (double nu : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        for (double lam : {0.5, 2.0, 5.0, 8.0}) {
            double via_gamma =
                std::pow(lam, nu - 1.0) * boost::math::tgamma_lower(1.0 - nu, lam);
            CHECK(incomplete_b(nu, lam) == Catch::Approx(via_gamma).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(incomplete_b(1.2, 2.0), domain_error);
    CHECK_THROWS_AS(incomplete_b(0.5, -1.0), domain_error);
}

TEST_CASE("cumulant rates reproduce closed forms") {
    SECTION("gaussian") {
        CharExponent e = CharExponent::gaussian({0.09, 0.02});
        CumulantRates c = cumulant_rates(e);
        CHECK(c.mean_rate == Catch::Approx(0.02).margin(1e-12));
        CHECK(c.variance_rate == Catch::Approx(0.09).margin(1e-12));
    }
    SECTION("gaussian pure drift has zero variance") {
        CharExponent e = CharExponent::gaussian({0.0, 0.5});
        CumulantRates c = cumulant_rates(e);
        CHECK(c.mean_rate == Catch::Approx(0.5).margin(1e-12));
        CHECK(c.variance_rate == 0.0);
    }
    SECTION("kobol fixture variance") {
        CharExponent e = CharExponent::kobol(symmetric_fixture());
        CumulantRates c = cumulant_rates(e);
        CHECK(c.variance_rate == Catch::Approx(0.15853309190424044).epsilon(1e-8));
        CHECK(c.mean_rate == Catch::Approx(kobol_mean_rate(symmetric_fixture())).margin(1e-8));
    }
    SECTION("random kobol parameters") {
        std::mt19937 gen(99);
        for (int trial = 0; trial < 20; ++trial) {
            KoBoLParams p = random_kobol(gen, trial % 2 == 0);
            CumulantRates c = cumulant_rates(CharExponent::kobol(p));
            // Re psi(h) ~ kappa_2 h^2 / 2 is assembled from terms of size
            // lambda^nu, so rounding caps the attainable accuracy here.
            CHECK(c.variance_rate ==
                  Catch::Approx(kobol_variance_rate(p)).epsilon(1e-6).margin(1e-8));
            CHECK(c.mean_rate == Catch::Approx(kobol_mean_rate(p)).margin(1e-7));
        }
    }
}

TEST_CASE("levy-khintchine quadrature reproduces the closed form") {
    // Low order: reconcile the drifts through the finite-variation
    // constant B; the jump integral then determines the rest.
    SECTION("low order, explicit drift constant") {
        KoBoLParams p{0.7, 1.3, 0.4, 6.0, -3.0, 0.2};
        LevyDensitySpec d = kobol_levy_density(p);
        double b = p.mu + p.c_plus * incomplete_b(p.nu, -p.lambda_minus) -
                   p.c_minus * incomplete_b(p.nu, p.lambda_plus);
        for (double xi : {-7.5, -2.0, -0.4, 0.6, 1.0, 3.3, 9.0}) {
            cplx lhs = kobol_exponent(p, cplx(xi, 0.0));
            cplx rhs = lk_exponent_numeric(d, 0.0, b, cplx(xi, 0.0));
            CHECK(std::abs(lhs - rhs) <= 1e-7 * (1.0 + std::abs(lhs)));
        }
    }
    // High order: the compensator drift has no elementary form, so pin it
    // at one frequency; the difference of the two forms is exactly linear
    // in xi, which makes every other frequency an honest check.
    SECTION("high order, calibrated drift constant") {
        KoBoLParams p{1.4, 0.9, 1.1, 5.0, -4.0, -0.1};
        LevyDensitySpec d = kobol_levy_density(p);
        const double xi0 = 0.37;
        cplx lk0 = lk_exponent_numeric(d, 0.0, 0.0, cplx(xi0, 0.0));
        KoBoLParams p0 = p;
        p0.mu = 0.0;
        cplx k0 = kobol_exponent(p0, cplx(xi0, 0.0));
        double drift_const = (lk0 - k0).imag() / xi0;
        double b = p.mu + drift_const;
        for (double xi : {-8.0, -3.1, -1.0, 0.8, 2.0, 5.5, 9.7}) {
            cplx lhs = kobol_exponent(p, cplx(xi, 0.0));
            cplx rhs = lk_exponent_numeric(d, 0.0, b, cplx(xi, 0.0));
            CHECK(std::abs(lhs - rhs) <= 1e-7 * (1.0 + std::abs(lhs)));
        }
    }
    SECTION("nonzero gaussian part enters as a xi^2 / 2") {
        KoBoLParams p{0.5, 1.0, 1.0, 5.0, -5.0, 0.0};
        LevyDensitySpec d = kobol_levy_density(p);
        double b = p.c_plus * incomplete_b(p.nu, -p.lambda_minus) -
                   p.c_minus * incomplete_b(p.nu, p.lambda_plus);
        cplx with_a = lk_exponent_numeric(d, 0.04, b, cplx(2.0, 0.0));
        cplx without = lk_exponent_numeric(d, 0.0, b, cplx(2.0, 0.0));
        CHECK(std::abs(with_a - without - cplx(0.08, 0.0)) <= 1e-9);
    }
}

TEST_CASE("levy density helper sanity") {
    KoBoLParams p = symmetric_fixture();
    LevyDensitySpec d = kobol_levy_density(p);
    CHECK(d.cutoff > 1.0);
    CHECK(d.inner_radius > 0.0);
    CHECK(d.inner_radius < 1e-50);
    CHECK(d.density(0.5) == Catch::Approx(std::pow(0.5, -1.5) * std::exp(-2.5)));
    CHECK(d.density(-0.5) == Catch::Approx(std::pow(0.5, -1.5) * std::exp(-2.5)));
    CHECK_THROWS_AS(d.density(0.0), domain_error);
}

TEST_CASE("null and gaussian blocks") {
    CharExponent n = CharExponent::null();
    CHECK(n.is_null());
    CHECK(n.evaluate(cplx(3.0, 1.0)) == cplx(0.0, 0.0));
    CHECK(n.strip().contains(-100.0));
    CHECK_THROWS_AS(n.with_drift_shift(0.1), domain_error);

    CharExponent g = CharExponent::gaussian({0.04, 0.01});
    cplx v = g.evaluate(cplx(2.0, 0.0));
    CHECK(v.real() == Catch::Approx(0.08));
    CHECK(v.imag() == Catch::Approx(-0.02));
    CharExponent shifted = g.with_drift_shift(0.05);
    CHECK(shifted.gaussian_params().gamma == Catch::Approx(0.06));
    CHECK_THROWS_AS(CharExponent::gaussian({-0.1, 0.0}), domain_error);
}

TEST_CASE("compensated exponential helper is stable") {
    // small z: series against the naive form evaluated in long double range
    cplx z(1e-8, -2e-8);
    cplx s = detail::cexpm1m(z);
    cplx expected = 0.5 * z * z + z * z * z / 6.0;
    CHECK(std::abs(s - expected) <= 1e-30);
    // moderate z: direct evaluation applies
    cplx w(0.7, 0.4);
    CHECK(std::abs(detail::cexpm1m(w) - (std::exp(w) - 1.0 - w)) <= 1e-18);
}
