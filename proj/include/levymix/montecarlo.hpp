#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "levymix/errors.hpp"
#include "levymix/fourier.hpp"
#include "levymix/model.hpp"
#include "levymix/parallel.hpp"
#include "levymix/pricing.hpp"
#include "levymix/reduce.hpp"
#include "levymix/rng.hpp"

namespace levymix {

// Inverse-CDF table of a one-dimensional terminal law on grid cell edges.
struct SamplerTable {
    std::vector<double> edges;  // N + 1 cell edges
    std::vector<double> cdf;    // matching knots, cdf front = 0, back = 1
    double clipped_mass = 0.0;  // negative density removed by clipping

    double inverse(double u) const {
        if (!(u > 0.0 && u < 1.0)) throw domain_error("uniform draw must lie in (0,1)");
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t hi = static_cast<std::size_t>(it - cdf.begin());
        if (hi == 0) hi = 1;
        if (hi >= cdf.size()) hi = cdf.size() - 1;
        std::size_t lo = hi - 1;
        double w = cdf[hi] - cdf[lo];
        double frac = w > 0.0 ? (u - cdf[lo]) / w : 0.5;
        return edges[lo] + frac * (edges[hi] - edges[lo]);
    }
};

// Tabulates the terminal law of a one-dimensional exponent by inverting
// its characteristic function, clipping ripple below zero and
// renormalizing.
template <one_dim_exponent E>
SamplerTable build_sampler(const E& e, double t, const FourierGrid& g) {
    DensityTensor d = density_1d(e, t, g);
    const int N = g.points;
    const double dx = g.dx(0);
    SamplerTable tab;
    tab.edges.resize(static_cast<std::size_t>(N) + 1);
    tab.cdf.resize(static_cast<std::size_t>(N) + 1);
    for (int k = 0; k <= N; ++k)
        tab.edges[static_cast<std::size_t>(k)] = g.x0(0) + (k - 0.5) * dx;
    double total = 0.0;
    double clipped = 0.0;
    tab.cdf[0] = 0.0;
    for (int k = 0; k < N; ++k) {
        double v = d.values[static_cast<std::size_t>(k)];
        if (v < 0.0) {
            clipped -= v * dx;
            v = 0.0;
        }
        total += v * dx;
        tab.cdf[static_cast<std::size_t>(k) + 1] = total;
    }
    if (!(total > 0.0)) throw numeric_error("sampler table has no positive mass");
    for (double& c : tab.cdf) c /= total;
    tab.cdf.back() = 1.0;
    tab.clipped_mass = clipped + std::abs(total - 1.0);
    return tab;
}

template <one_dim_exponent E>
SamplerTable build_sampler(const E& e, double t, int points = 2048) {
    return build_sampler(e, t, default_grid(e, t, points));
}

// Terminal draws of the joint vector U_T, row major.
struct TerminalDraws {
    int n = 0;
    long n_paths = 0;
    std::vector<double> data;

    std::span<const double> row(long p) const {
        return std::span<const double>(data).subspan(
            static_cast<std::size_t>(p) * static_cast<std::size_t>(n),
            static_cast<std::size_t>(n));
    }
};

namespace detail {

// One-dimensional block sampler: either an inverse-CDF table or, for
// degenerate blocks (null, or zero variance), a deterministic value.
struct BlockSampler {
    bool deterministic = false;
    double fixed = 0.0;
    SamplerTable table;

    double draw(double u) const { return deterministic ? fixed : table.inverse(u); }
};

inline BlockSampler make_block_sampler(const CharExponent& e, double t, int points) {
    BlockSampler b;
    CumulantRates c = cumulant_rates(e);
    if (e.is_null() || !(c.variance_rate > 0.0)) {
        b.deterministic = true;
        b.fixed = e.is_null() ? 0.0 : c.mean_rate * t;
        return b;
    }
    b.table = build_sampler(e, t, points);
    return b;
}

}  // namespace detail

// Samples the terminal law directly: each block is drawn from its own
// tabulated one-dimensional law and mixed through A.  Every draw is a
// pure function of (seed, block index, path index), so output does not
// depend on scheduling.  With antithetic on, paths 2q and 2q+1 use the
// uniforms u and 1-u, and the path count must be even.
inline TerminalDraws simulate_terminal(const BasketModel& m, double t, long n_paths,
                                       std::uint64_t seed, bool antithetic = true,
                                       int sampler_points = 2048) {
    if (!(t > 0.0) || !std::isfinite(t)) throw domain_error("time horizon must be positive");
    if (n_paths <= 0) throw config_error("path count must be positive");
    if (antithetic && (n_paths % 2) != 0)
        throw config_error("path count must be even with antithetic sampling");

    const int n = m.size();
    std::vector<detail::BlockSampler> xs, zs;
    xs.reserve(static_cast<std::size_t>(n));
    zs.reserve(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s)
        xs.push_back(detail::make_block_sampler(m.x_block(s), t, sampler_points));
    for (int k = 0; k < n; ++k)
        zs.push_back(detail::make_block_sampler(m.z_block(k), t, sampler_points));

    std::vector<CounterRng> xr, zr;
    for (int s = 0; s < n; ++s) xr.emplace_back(seed, static_cast<std::uint64_t>(s));
    for (int k = 0; k < n; ++k)
        zr.emplace_back(seed, static_cast<std::uint64_t>(n + k));

    TerminalDraws out;
    out.n = n;
    out.n_paths = n_paths;
    out.data.resize(static_cast<std::size_t>(n_paths) * static_cast<std::size_t>(n));

    detail::parallel_for(n_paths, [&](std::int64_t lo, std::int64_t hi) {
        std::vector<double> x(static_cast<std::size_t>(n)), z(static_cast<std::size_t>(n));
        for (std::int64_t p = lo; p < hi; ++p) {
            auto uniform = [&](const CounterRng& r) {
                if (!antithetic) return r.uniform(static_cast<std::uint64_t>(p));
                double u = r.uniform(static_cast<std::uint64_t>(p >> 1));
                return (p & 1) ? 1.0 - u : u;
            };
            for (int s = 0; s < n; ++s)
                x[static_cast<std::size_t>(s)] =
                    xs[static_cast<std::size_t>(s)].deterministic
                        ? xs[static_cast<std::size_t>(s)].fixed
                        : xs[static_cast<std::size_t>(s)].draw(uniform(xr[static_cast<std::size_t>(s)]));
            for (int k = 0; k < n; ++k)
                z[static_cast<std::size_t>(k)] =
                    zs[static_cast<std::size_t>(k)].deterministic
                        ? zs[static_cast<std::size_t>(k)].fixed
                        : zs[static_cast<std::size_t>(k)].draw(uniform(zr[static_cast<std::size_t>(k)]));
            double* row = out.data.data() + static_cast<std::size_t>(p) * n;
            for (int s = 0; s < n; ++s) {
                double acc = x[static_cast<std::size_t>(s)];
                for (int k = 0; k < n; ++k)
                    acc += m.mixing()(s, k) * z[static_cast<std::size_t>(k)];
                row[s] = acc;
            }
        }
    });
    return out;
}

struct McResult {
    double estimate = 0.0;
    double std_error = 0.0;
    long n_paths = 0;
    std::uint64_t seed = 0;
    bool antithetic = true;
    double max_residual = 0.0;
};

// Monte Carlo price of the basket payoff.  Works for any asset count.
// The variance estimate treats an antithetic pair as one observation.
inline McResult mc_price(const BasketModel& m, const MarketSpec& mkt, const PayoffSpec& payoff,
                         long n_paths, std::uint64_t seed, bool antithetic = true,
                         bool adjust = true, int sampler_points = 2048) {
    detail::check_basket_inputs(m, mkt, payoff);
    BasketModel priced = detail::gated_model(m, mkt, adjust);
    std::vector<double> res =
        emm_residual(priced, std::span<const double>(mkt.forward_rates()));
    double worst = 0.0;
    for (double x : res) worst = std::max(worst, std::abs(x));

    TerminalDraws draws = simulate_terminal(priced, mkt.t_maturity, n_paths, seed,
                                            antithetic, sampler_points);
    const int n = m.size();
    const double discount = std::exp(-mkt.r * mkt.t_maturity);

    std::vector<double> f(static_cast<std::size_t>(n_paths));
    detail::parallel_for(n_paths, [&](std::int64_t lo, std::int64_t hi) {
        std::vector<double> spots(static_cast<std::size_t>(n));
        for (std::int64_t p = lo; p < hi; ++p) {
            std::span<const double> u = draws.row(p);
            for (int s = 0; s < n; ++s)
                spots[static_cast<std::size_t>(s)] =
                    mkt.spots[static_cast<std::size_t>(s)] * std::exp(u[static_cast<std::size_t>(s)]);
            f[static_cast<std::size_t>(p)] =
                discount * payoff_eval(payoff, std::span<const double>(spots));
        }
    });

    // Collapse antithetic pairs before estimating the variance.
    std::vector<double> obs;
    if (antithetic) {
        obs.resize(static_cast<std::size_t>(n_paths / 2));
        for (long q = 0; q < n_paths / 2; ++q)
            obs[static_cast<std::size_t>(q)] =
                0.5 * (f[static_cast<std::size_t>(2 * q)] + f[static_cast<std::size_t>(2 * q + 1)]);
    } else {
        obs = std::move(f);
    }
    const long n_obs = static_cast<long>(obs.size());
    double mean = detail::pairwise_sum(std::span<const double>(obs)) / n_obs;
    std::vector<double> sq(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        double dvt = obs[i] - mean;
        sq[i] = dvt * dvt;
    }
    double var = n_obs > 1
                     ? detail::pairwise_sum(std::span<const double>(sq)) / (n_obs - 1.0)
                     : 0.0;

    McResult out;
    out.estimate = mean;
    out.std_error = std::sqrt(var / n_obs);
    out.n_paths = n_paths;
    out.seed = seed;
    out.antithetic = antithetic;
    out.max_residual = worst;
    return out;
}

// Empirical characteristic function (1/P) sum_p exp(i <v, U^(p)>).
inline cplx empirical_cf(const TerminalDraws& draws, std::span<const double> v) {
    if (static_cast<int>(v.size()) != draws.n)
        throw domain_error("argument dimension must match draw dimension");
    std::vector<cplx> terms(static_cast<std::size_t>(draws.n_paths));
    detail::parallel_for(draws.n_paths, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t p = lo; p < hi; ++p) {
            std::span<const double> row = draws.row(p);
            double dot = 0.0;
            for (int s = 0; s < draws.n; ++s)
                dot += v[static_cast<std::size_t>(s)] * row[static_cast<std::size_t>(s)];
            terms[static_cast<std::size_t>(p)] = std::exp(cplx(0.0, dot));
        }
    });
    return detail::pairwise_sum(std::span<const cplx>(terms)) /
           static_cast<double>(draws.n_paths);
}

}  // namespace levymix
