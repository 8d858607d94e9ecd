#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "levymix/errors.hpp"
#include "levymix/model.hpp"

namespace levymix {

// Risk-neutral pricing requires E e^{U_{s,t}} = e^{r_s t} for every asset,
// i.e. Psi(-i e_s) = -r_s.  The residual below is Psi(-i e_s) + r_s.

// Residuals of the martingale condition, one per asset.  Throws
// domain_error when -i e_s leaves the analyticity strip (a block needs
// lambda_minus < -1 to give the spot exponential a finite mean).
inline std::vector<double> emm_residual(const BasketModel& m, std::span<const double> rates) {
    const int n = m.size();
    if (static_cast<int>(rates.size()) != n)
        throw domain_error("rate count must match asset count");
    std::vector<double> res(static_cast<std::size_t>(n));
    std::vector<cplx> v(static_cast<std::size_t>(n), cplx(0.0, 0.0));
    for (int s = 0; s < n; ++s) {
        if (!std::isfinite(rates[s])) throw domain_error("rates must be finite");
        v[static_cast<std::size_t>(s)] = cplx(0.0, -1.0);
        cplx psi;
        try {
            psi = joint_exponent(m, std::span<const cplx>(v));
        } catch (const domain_error& e) {
            throw domain_error(std::string("martingale condition unreachable: ") + e.what());
        }
        v[static_cast<std::size_t>(s)] = cplx(0.0, 0.0);
        if (std::abs(psi.imag()) > 1e-10)
            throw numeric_error("martingale residual has nonzero imaginary part");
        res[static_cast<std::size_t>(s)] = psi.real() + rates[s];
    }
    return res;
}

inline std::vector<double> emm_residual(const BasketModel& m, double rate) {
    std::vector<double> rates(static_cast<std::size_t>(m.size()), rate);
    return emm_residual(m, std::span<const double>(rates));
}

// Shifts each x-block drift by its own residual, which zeroes the
// residual exactly: a drift shift delta moves Psi(-i e_s) by -delta.
// Residuals already below 1e-14 are left untouched, so models without a
// drift parameter still pass when they are calibrated to begin with.
inline BasketModel adjust_drifts(const BasketModel& m, std::span<const double> rates) {
    std::vector<double> res = emm_residual(m, rates);
    for (int s = 0; s < m.size(); ++s) {
        auto& d = res[static_cast<std::size_t>(s)];
        if (std::abs(d) <= 1e-14) {
            d = 0.0;
            continue;
        }
        if (m.x_block(s).is_null())
            throw domain_error("asset " + std::to_string(s) +
                               ": x block has no drift parameter to absorb the "
                               "martingale adjustment");
    }
    return m.with_x_drift_shifts(res);
}

inline BasketModel adjust_drifts(const BasketModel& m, double rate) {
    std::vector<double> rates(static_cast<std::size_t>(m.size()), rate);
    return adjust_drifts(m, std::span<const double>(rates));
}

}  // namespace levymix
