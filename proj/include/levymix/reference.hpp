#pragma once

#include <cmath>
#include <numbers>

#include "levymix/errors.hpp"
#include "levymix/levy_core.hpp"

namespace levymix {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Black-Scholes price of a European call with continuous dividend yield.
inline double black_scholes_call(double spot, double strike, double rate, double vol,
                                 double expiry, double dividend = 0.0) {
    detail::require_finite(spot, "spot");
    detail::require_finite(strike, "strike");
    detail::require_finite(rate, "rate");
    detail::require_finite(vol, "vol");
    detail::require_finite(expiry, "expiry");
    detail::require_finite(dividend, "dividend");
    if (spot <= 0.0) throw domain_error("spot must be positive");
    if (strike < 0.0) throw domain_error("strike must be nonnegative");
    if (vol < 0.0) throw domain_error("vol must be nonnegative");
    if (expiry <= 0.0) throw domain_error("expiry must be positive");

    const double fwd = spot * std::exp(-dividend * expiry);
    const double disc_k = strike * std::exp(-rate * expiry);
    const double sig = vol * std::sqrt(expiry);
    if (sig == 0.0 || strike == 0.0) {
        double v = fwd - disc_k;
        return v > 0.0 ? v : 0.0;
    }
    const double d1 =
        (std::log(spot / strike) + (rate - dividend + 0.5 * vol * vol) * expiry) / sig;
    const double d2 = d1 - sig;
    return fwd * normal_cdf(d1) - disc_k * normal_cdf(d2);
}

// Exchange option e^{-rT} E (S1_T - S2_T)^+ for two lognormal assets with
// correlation rho.  The rate drops out; only the dividend yields enter:
//   sigma^2 = v1^2 + v2^2 - 2 rho v1 v2,
//   d1 = (ln(S1/S2) + (q2 - q1 + sigma^2/2) T) / (sigma sqrt(T)),
//   price = S1 e^{-q1 T} N(d1) - S2 e^{-q2 T} N(d1 - sigma sqrt(T)).
inline double margrabe_price(double spot1, double spot2, double vol1, double vol2, double rho,
                             double expiry, double div1 = 0.0, double div2 = 0.0) {
    detail::require_finite(spot1, "spot1");
    detail::require_finite(spot2, "spot2");
    detail::require_finite(vol1, "vol1");
    detail::require_finite(vol2, "vol2");
    detail::require_finite(rho, "rho");
    detail::require_finite(expiry, "expiry");
    detail::require_finite(div1, "div1");
    detail::require_finite(div2, "div2");
    if (spot1 <= 0.0 || spot2 <= 0.0) throw domain_error("spots must be positive");
    if (vol1 < 0.0 || vol2 < 0.0) throw domain_error("vols must be nonnegative");
    if (rho < -1.0 || rho > 1.0) throw domain_error("rho must lie in [-1, 1]");
    if (expiry <= 0.0) throw domain_error("expiry must be positive");

    double var = vol1 * vol1 + vol2 * vol2 - 2.0 * rho * vol1 * vol2;
    if (var < 0.0) var = 0.0;  // rounding at |rho| = 1
    const double sig = std::sqrt(var) * std::sqrt(expiry);
    const double f1 = spot1 * std::exp(-div1 * expiry);
    const double f2 = spot2 * std::exp(-div2 * expiry);
    if (sig == 0.0) {
        double v = f1 - f2;
        return v > 0.0 ? v : 0.0;
    }
    const double d1 =
        (std::log(spot1 / spot2) + (div2 - div1 + 0.5 * var) * expiry) / sig;
    const double d2 = d1 - sig;
    return f1 * normal_cdf(d1) - f2 * normal_cdf(d2);
}

}  // namespace levymix
