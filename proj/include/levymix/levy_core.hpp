#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <variant>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "levymix/errors.hpp"

namespace levymix {

using cplx = std::complex<double>;

// Horizontal strip { xi : lo < Im xi < hi } on which an exponent is analytic.
struct Strip {
    double lo;
    double hi;

    static Strip whole() {
        return {-std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity()};
    }

    bool contains(double im) const { return lo < im && im < hi; }

    // Intersection of two strips.
    static Strip intersect(const Strip& a, const Strip& b) {
        return {a.lo > b.lo ? a.lo : b.lo, a.hi < b.hi ? a.hi : b.hi};
    }

    // Preimage of the strip under xi -> a * xi.
    static Strip pulled_back(const Strip& s, double a) {
        if (a == 0.0) return whole();
        if (a > 0.0) return {s.lo / a, s.hi / a};
        return {s.hi / a, s.lo / a};
    }

    bool empty() const { return !(lo < hi); }
};

namespace detail {

inline void require_finite(double x, const char* name) {
    if (!std::isfinite(x)) throw domain_error(std::string(name) + " must be finite");
}

inline std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace detail

// Tempered stable (KoBoL) parameters.  The order nu excludes 1; the
// exponent formulas below hold on nu in (0,1) union (1,2).
struct KoBoLParams {
    double nu;            // order, in (0,1) or (1,2)
    double c_plus;        // intensity of upward jumps, > 0
    double c_minus;       // intensity of downward jumps, > 0
    double lambda_plus;   // tempering of downward jumps, > 0
    double lambda_minus;  // tempering of upward jumps, < 0
    double mu;            // drift

    void validate() const {
        detail::require_finite(nu, "nu");
        detail::require_finite(c_plus, "c_plus");
        detail::require_finite(c_minus, "c_minus");
        detail::require_finite(lambda_plus, "lambda_plus");
        detail::require_finite(lambda_minus, "lambda_minus");
        detail::require_finite(mu, "mu");
        if (!((nu > 0.0 && nu < 1.0) || (nu > 1.0 && nu < 2.0)))
            throw domain_error("nu must lie in (0,1) or (1,2), got " + detail::fmt(nu));
        if (c_plus <= 0.0 || c_minus <= 0.0)
            throw domain_error("c_plus and c_minus must be positive");
        if (lambda_plus <= 0.0)
            throw domain_error("lambda_plus must be positive, got " + detail::fmt(lambda_plus));
        if (lambda_minus >= 0.0)
            throw domain_error("lambda_minus must be negative, got " + detail::fmt(lambda_minus));
    }
};

// Brownian motion with drift: psi(xi) = a xi^2 / 2 - i gamma xi.
struct GaussianParams {
    double a;      // variance rate, >= 0
    double gamma;  // drift

    void validate() const {
        detail::require_finite(a, "a");
        detail::require_finite(gamma, "gamma");
        if (a < 0.0) throw domain_error("variance rate a must be nonnegative");
    }
};

// Placeholder block contributing nothing (point mass at zero).
struct NullParams {};

// Gamma(-nu) for nu in (0,1) union (1,2), via the recursion
// Gamma(-nu) = Gamma(2-nu) / ((-nu) * (1-nu)), which keeps the
// tgamma argument inside (0,2).
inline double gamma_neg(double nu) {
    if (!((nu > 0.0 && nu < 1.0) || (nu > 1.0 && nu < 2.0)))
        throw domain_error("gamma_neg: nu must lie in (0,1) or (1,2)");
    return std::tgamma(2.0 - nu) / ((-nu) * (1.0 - nu));
}

inline Strip kobol_strip(const KoBoLParams& p) { return {p.lambda_minus, p.lambda_plus}; }

namespace detail {

inline void check_strip(const Strip& s, cplx xi, const char* what) {
    double w = xi.imag();
    if (!s.contains(w))
        throw domain_error(std::string(what) + ": Im xi = " + fmt(w) +
                           " outside strip (" + fmt(s.lo) + ", " + fmt(s.hi) + ")");
}

}  // namespace detail

// Characteristic exponent of the KoBoL process, normalized so that
// E exp(i xi U_t) = exp(-t psi(xi)).  Analytic on the strip
// Im xi in (lambda_minus, lambda_plus); both complex power bases have
// positive real part there, so principal branches apply.
inline cplx kobol_exponent(const KoBoLParams& p, cplx xi) {
    detail::check_strip(kobol_strip(p), xi, "kobol_exponent");
    const cplx i(0.0, 1.0);
    const double g = gamma_neg(p.nu);
    const cplx up = std::pow(std::complex<double>(-p.lambda_minus, 0.0) - i * xi, p.nu);
    const cplx dn = std::pow(std::complex<double>(p.lambda_plus, 0.0) + i * xi, p.nu);
    const double up0 = std::pow(-p.lambda_minus, p.nu);
    const double dn0 = std::pow(p.lambda_plus, p.nu);
    return -i * p.mu * xi + p.c_plus * g * (up0 - up) + p.c_minus * g * (dn0 - dn);
}

inline cplx gaussian_exponent(const GaussianParams& p, cplx xi) {
    const cplx i(0.0, 1.0);
    return 0.5 * p.a * xi * xi - i * p.gamma * xi;
}

// One-dimensional characteristic exponent of a single block.
class CharExponent {
  public:
    enum class Kind { null, gaussian, kobol };

    static CharExponent null() { return CharExponent(NullParams{}); }

    static CharExponent gaussian(GaussianParams p) {
        p.validate();
        return CharExponent(p);
    }

    static CharExponent kobol(KoBoLParams p) {
        p.validate();
        return CharExponent(p);
    }

    Kind kind() const { return static_cast<Kind>(body_.index()); }

    bool is_null() const { return kind() == Kind::null; }

    cplx evaluate(cplx xi) const {
        switch (kind()) {
            case Kind::null: return cplx(0.0, 0.0);
            case Kind::gaussian: return gaussian_exponent(std::get<GaussianParams>(body_), xi);
            default: return kobol_exponent(std::get<KoBoLParams>(body_), xi);
        }
    }

    Strip strip() const {
        if (kind() == Kind::kobol) return kobol_strip(std::get<KoBoLParams>(body_));
        return Strip::whole();
    }

    // Returns a copy with the drift moved by delta.  Null blocks carry no
    // drift parameter, so they cannot absorb an adjustment.
    CharExponent with_drift_shift(double delta) const {
        detail::require_finite(delta, "drift shift");
        switch (kind()) {
            case Kind::null:
                throw domain_error("cannot shift drift of a null block");
            case Kind::gaussian: {
                GaussianParams p = std::get<GaussianParams>(body_);
                p.gamma += delta;
                return CharExponent(p);
            }
            default: {
                KoBoLParams p = std::get<KoBoLParams>(body_);
                p.mu += delta;
                return CharExponent(p);
            }
        }
    }

    const KoBoLParams& kobol_params() const { return std::get<KoBoLParams>(body_); }
    const GaussianParams& gaussian_params() const { return std::get<GaussianParams>(body_); }

  private:
    template <class P>
    explicit CharExponent(P p) : body_(p) {}

    std::variant<NullParams, GaussianParams, KoBoLParams> body_;
};

// Anything that can evaluate a one-dimensional exponent on a strip.
template <class E>
concept one_dim_exponent = requires(const E& e, cplx xi) {
    { e.evaluate(xi) } -> std::convertible_to<cplx>;
    { e.strip() } -> std::convertible_to<Strip>;
};

// Per-unit-time mean and variance of the law generated by an exponent.
struct CumulantRates {
    double mean_rate;
    double variance_rate;
};

// Central differences at step h = 1e-2 with one Richardson pass.
// Uses psi(0) = 0, psi(-x) = conj(psi(x)) on the real line.  The step
// balances truncation against cancellation: Re psi(h) ~ kappa_2 h^2 / 2
// is tiny next to the individual exponent terms, so shrinking h further
// amplifies rounding instead of reducing the error.  After the Richardson
// pass the truncation term is kappa_6 h^4 / 1440, far below rounding for
// any tempering above one.
template <one_dim_exponent E>
CumulantRates cumulant_rates(const E& e) {
    const double h = 1e-2;
    auto mean_at = [&](double step) { return -e.evaluate(cplx(step, 0.0)).imag() / step; };
    auto var_at = [&](double step) {
        return 2.0 * e.evaluate(cplx(step, 0.0)).real() / (step * step);
    };
    double m = (4.0 * mean_at(h / 2) - mean_at(h)) / 3.0;
    double v = (4.0 * var_at(h / 2) - var_at(h)) / 3.0;
    return {m, v};
}

// B(nu, lambda) = int_0^1 x^{-nu} e^{-lambda x} dx for nu < 1, lambda > 0.
// Finite-variation drift reconciliation constant; also exposed for tests.
inline double incomplete_b(double nu, double lambda) {
    detail::require_finite(nu, "nu");
    detail::require_finite(lambda, "lambda");
    if (nu >= 1.0) throw domain_error("incomplete_b requires nu < 1, got " + detail::fmt(nu));
    if (lambda <= 0.0) throw domain_error("incomplete_b requires lambda > 0");
    boost::math::quadrature::tanh_sinh<double> integrator;
    auto f = [&](double x) { return std::pow(x, -nu) * std::exp(-lambda * x); };
    double err = 0.0;
    double val = integrator.integrate(f, 0.0, 1.0, 1e-12, &err);
    if (!(err <= 1e-9 * std::max(1.0, std::abs(val))))
        throw numeric_error("incomplete_b quadrature did not converge, error " + detail::fmt(err));
    return val;
}

namespace detail {

// exp(z) - 1 - z, computed by series for small |z| to avoid cancellation.
inline cplx cexpm1m(cplx z) {
    if (std::abs(z) >= 0.5) return std::exp(z) - 1.0 - z;
    cplx term = z * z / 2.0;
    cplx sum = term;
    for (int k = 3; k < 24; ++k) {
        term *= z / static_cast<double>(k);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// (exp(i x xi) - 1 - i x xi) / x^2, stable as x -> 0.
inline cplx compensated_phase(double x, cplx xi) {
    const cplx z = cplx(0.0, 1.0) * (x * xi);
    if (std::abs(z) >= 0.5) return cexpm1m(z) / (x * x);
    // series sum_{k>=2} (i xi)^k x^{k-2} / k!
    const cplx ix = cplx(0.0, 1.0) * xi;
    cplx term = ix * ix / 2.0;
    cplx sum = term;
    for (int k = 3; k < 24; ++k) {
        term *= ix * x / static_cast<double>(k);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

template <class F>
double kronrod_real(const F& f, double a, double b) {
    double err = 0.0;
    double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, 15, 1e-10, &err);
    if (!(err <= 1e-7 * std::max(1.0, std::abs(val))))
        throw numeric_error("levy quadrature did not converge, error estimate " + fmt(err));
    return val;
}

template <class F>
cplx kronrod_cplx(const F& f, double a, double b) {
    double re = kronrod_real([&](double x) { return f(x).real(); }, a, b);
    double im = kronrod_real([&](double x) { return f(x).imag(); }, a, b);
    return {re, im};
}

}  // namespace detail

// A Levy density given as a plain callable, with truncation hints: mass
// beyond |x| > cutoff and the second moment below |x| < inner_radius are
// treated as negligible by the quadrature.
struct LevyDensitySpec {
    std::function<double(double)> density;
    double cutoff;
    double inner_radius;
};

// Levy density of the KoBoL process:
//   c_plus  x^{-nu-1} e^{lambda_minus x}   for x > 0,
//   c_minus |x|^{-nu-1} e^{lambda_plus x}  for x < 0.
// The inner radius keeps x^{-nu-1} inside double range while leaving a
// second-moment truncation error far below 1e-8.
inline LevyDensitySpec kobol_levy_density(const KoBoLParams& p) {
    p.validate();
    LevyDensitySpec spec;
    spec.density = [p](double x) {
        if (x > 0.0) return p.c_plus * std::pow(x, -p.nu - 1.0) * std::exp(p.lambda_minus * x);
        if (x < 0.0) return p.c_minus * std::pow(-x, -p.nu - 1.0) * std::exp(p.lambda_plus * x);
        throw domain_error("levy density undefined at x = 0");
    };
    double decay = std::min(p.lambda_plus, -p.lambda_minus);
    spec.cutoff = 1.0 + 40.0 / decay;
    spec.inner_radius = std::pow(10.0, -290.0 / (p.nu + 1.0));
    return spec;
}

// Direct numeric evaluation of the Levy-Khintchine form
//   psi(xi) = a xi^2 / 2 - i b xi
//             - int (e^{i x xi} - 1 - i x xi 1_{|x|<=1}) Pi(dx),
// used as an independent oracle for closed-form exponents.  The jump
// integral is split at |x| = 1 where the compensator switches off; the
// inner pieces run in log coordinates so endpoint singularities of the
// density stay representable.
inline cplx lk_exponent_numeric(const LevyDensitySpec& d, double a, double b, cplx xi) {
    if (!(d.cutoff > 1.0)) throw domain_error("lk_exponent_numeric: cutoff must exceed 1");
    if (!(d.inner_radius > 0.0 && d.inner_radius < 1.0))
        throw domain_error("lk_exponent_numeric: inner_radius must lie in (0,1)");
    const cplx i(0.0, 1.0);
    const double lo = std::log(d.inner_radius);

    // |x| in (inner_radius, 1]: compensated integrand, x = s * e^u.
    auto inner = [&](double sign) {
        return detail::kronrod_cplx(
            [&](double u) {
                double x = sign * std::exp(u);
                return detail::compensated_phase(x, xi) * (x * x) * d.density(x) *
                       std::exp(u);
            },
            lo, 0.0);
    };
    // |x| in [1, cutoff]: plain integrand, no compensator.
    auto outer = [&](double sign) {
        return detail::kronrod_cplx(
            [&](double x) {
                double xx = sign * x;
                return (std::exp(i * (xx * xi)) - 1.0) * d.density(xx);
            },
            1.0, d.cutoff);
    };

    cplx jumps = inner(1.0) + inner(-1.0) + outer(1.0) + outer(-1.0);
    return 0.5 * a * xi * xi - i * b * xi - jumps;
}

}  // namespace levymix
