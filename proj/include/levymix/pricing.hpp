#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "levymix/calibration.hpp"
#include "levymix/errors.hpp"
#include "levymix/fourier.hpp"
#include "levymix/model.hpp"
#include "levymix/parallel.hpp"
#include "levymix/reduce.hpp"

namespace levymix {

// Spot levels, discounting rate and horizon.  asset_rates are the
// per-asset forward growth rates used by the martingale calibration;
// when empty every asset grows at the discounting rate r.
struct MarketSpec {
    std::vector<double> spots;
    double r = 0.0;
    std::vector<double> asset_rates;
    double t_maturity = 0.0;

    int size() const { return static_cast<int>(spots.size()); }

    std::vector<double> forward_rates() const {
        if (!asset_rates.empty()) return asset_rates;
        return std::vector<double>(spots.size(), r);
    }

    void validate() const {
        if (spots.empty()) throw domain_error("market needs at least one spot");
        for (double s : spots) {
            detail::require_finite(s, "spot");
            if (s <= 0.0) throw domain_error("spots must be positive");
        }
        detail::require_finite(r, "rate");
        if (!asset_rates.empty()) {
            if (asset_rates.size() != spots.size())
                throw domain_error("asset_rates count must match spot count");
            for (double x : asset_rates) detail::require_finite(x, "asset rate");
        }
        if (!(t_maturity > 0.0) || !std::isfinite(t_maturity))
            throw domain_error("maturity must be positive");
    }
};

// European basket payoff (sum_s w_s S_s - K)^+; spreads use signed weights.
struct PayoffSpec {
    std::vector<double> weights;
    double strike = 0.0;

    void validate() const {
        if (weights.empty()) throw domain_error("payoff needs at least one weight");
        bool any = false;
        for (double w : weights) {
            detail::require_finite(w, "payoff weight");
            if (w != 0.0) any = true;
        }
        if (!any) throw domain_error("payoff weights must not all vanish");
        detail::require_finite(strike, "strike");
    }
};

inline double payoff_eval(const PayoffSpec& p, std::span<const double> spots) {
    if (spots.size() != p.weights.size())
        throw domain_error("payoff dimension must match spot count");
    double acc = -p.strike;
    for (std::size_t s = 0; s < spots.size(); ++s) {
        if (!(spots[s] >= 0.0)) throw domain_error("terminal spots must be nonnegative");
        acc += p.weights[s] * spots[s];
    }
    return acc > 0.0 ? acc : 0.0;
}

struct PriceDiagnostics {
    double normalization_defect = 0.0;  // density mass defect on the grid
    double boundary_mass = 0.0;         // payoff-weighted value near the grid edge
    double max_residual = 0.0;          // martingale residual after adjustment
    bool payoff_reaches_grid = true;    // false when the strike is beyond the box
};

struct PriceResult {
    double price = 0.0;
    PriceDiagnostics diagnostics;
};

namespace detail {

inline void check_basket_inputs(const BasketModel& m, const MarketSpec& mkt,
                                const PayoffSpec& p) {
    mkt.validate();
    p.validate();
    if (mkt.size() != m.size()) throw domain_error("spot count must match asset count");
    if (static_cast<int>(p.weights.size()) != m.size())
        throw domain_error("weight count must match asset count");
}

// Martingale gate shared by the transform and Monte Carlo pricers.
inline BasketModel gated_model(const BasketModel& m, const MarketSpec& mkt, bool adjust) {
    std::vector<double> rates = mkt.forward_rates();
    BasketModel out = adjust ? adjust_drifts(m, std::span<const double>(rates)) : m;
    std::vector<double> res = emm_residual(out, std::span<const double>(rates));
    double worst = 0.0;
    for (double x : res) worst = std::max(worst, std::abs(x));
    if (worst > 1e-8)
        throw domain_error("martingale residual " + fmt(worst) +
                           " exceeds 1e-8; price with drift adjustment enabled");
    return out;
}

}  // namespace detail

// Prices a European basket option by integrating the payoff against the
// transform-inverted joint density of log returns.  Limited to three
// assets; larger baskets go through the Monte Carlo pricer.  Unless
// adjust is false the x-block drifts are recalibrated first, and either
// way the martingale residual must already be below 1e-8.
inline PriceResult price_basket(const BasketModel& m, const MarketSpec& mkt,
                                const PayoffSpec& payoff, const FourierGrid& grid,
                                bool adjust = true) {
    detail::check_basket_inputs(m, mkt, payoff);
    const int n = m.size();
    if (n > 3)
        throw capability_error("transform pricing limited to 3 assets, use Monte Carlo");
    BasketModel priced = detail::gated_model(m, mkt, adjust);

    std::vector<double> res = emm_residual(priced, std::span<const double>(mkt.forward_rates()));
    double worst = 0.0;
    for (double x : res) worst = std::max(worst, std::abs(x));

    DensityTensor d = density_nd(priced, mkt.t_maturity, grid);
    const int N = grid.points;
    const std::int64_t total = static_cast<std::int64_t>(d.values.size());

    // Per-axis terminal spot tables S_d * exp(x) at the cell centers.
    std::vector<std::vector<double>> spot_at(static_cast<std::size_t>(n));
    for (int dte = 0; dte < n; ++dte) {
        spot_at[static_cast<std::size_t>(dte)].resize(static_cast<std::size_t>(N));
        for (int k = 0; k < N; ++k)
            spot_at[static_cast<std::size_t>(dte)][static_cast<std::size_t>(k)] =
                mkt.spots[static_cast<std::size_t>(dte)] * std::exp(grid.node(dte, k));
    }

    const double vol = grid.cell_volume();
    std::vector<double> contrib(static_cast<std::size_t>(total));
    detail::parallel_for(total, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t flat = lo; flat < hi; ++flat) {
            std::int64_t rem = flat;
            double acc = -payoff.strike;
            for (int dd = n - 1; dd >= 0; --dd) {
                int k = static_cast<int>(rem % N);
                rem /= N;
                acc += payoff.weights[static_cast<std::size_t>(dd)] *
                       spot_at[static_cast<std::size_t>(dd)][static_cast<std::size_t>(k)];
            }
            double pay = acc > 0.0 ? acc : 0.0;
            contrib[static_cast<std::size_t>(flat)] =
                pay * d.values[static_cast<std::size_t>(flat)] * vol;
        }
    });

    const double discount = std::exp(-mkt.r * mkt.t_maturity);
    double raw = detail::pairwise_sum(std::span<const double>(contrib));

    // Contribution collected within three cells of any face; when it is a
    // visible fraction of the price the box is too small to trust.
    double band = 0.0;
    for (std::int64_t flat = 0; flat < total; ++flat) {
        std::int64_t rem = flat;
        bool edge = false;
        for (int dd = 0; dd < n; ++dd) {
            int k = static_cast<int>(rem % N);
            rem /= N;
            if (k < 3 || k >= N - 3) edge = true;
        }
        if (edge) band += contrib[static_cast<std::size_t>(flat)];
    }

    PriceResult out;
    out.price = discount * raw;
    out.diagnostics.normalization_defect = d.normalization_defect;
    out.diagnostics.boundary_mass = discount * band;
    out.diagnostics.max_residual = worst;

    // Strike beyond the reachable box: every cell is out of the money, so
    // the result collapses to zero without boundary mass to flag it.
    double best = -payoff.strike;
    for (int dd = 0; dd < n; ++dd) {
        double w = payoff.weights[static_cast<std::size_t>(dd)];
        double s0 = mkt.spots[static_cast<std::size_t>(dd)];
        best += w * s0 * std::exp(w >= 0.0 ? grid.node(dd, N - 1) : grid.node(dd, 0));
    }
    out.diagnostics.payoff_reaches_grid = best > 0.0;

    if (out.price > 0.0 && out.diagnostics.boundary_mass > 1e-3 * out.price)
        throw numeric_error("payoff mass " + detail::fmt(out.diagnostics.boundary_mass) +
                            " sits at the grid boundary: enlarge the grid");
    return out;
}

inline PriceResult price_basket(const BasketModel& m, const MarketSpec& mkt,
                                const PayoffSpec& payoff, bool adjust = true) {
    detail::check_basket_inputs(m, mkt, payoff);
    if (m.size() > 3)
        throw capability_error("transform pricing limited to 3 assets, use Monte Carlo");
    BasketModel priced = detail::gated_model(m, mkt, adjust);
    FourierGrid g = default_grid(priced, mkt.t_maturity);
    return price_basket(m, mkt, payoff, g, adjust);
}

}  // namespace levymix
