#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "levymix/errors.hpp"
#include "levymix/fft.hpp"
#include "levymix/levy_core.hpp"
#include "levymix/model.hpp"
#include "levymix/parallel.hpp"

namespace levymix {

// Uniform tensor grid for density inversion.  Per axis d the state cells
// are centered at x0(d) + k dx(d) over [center - L, center + L], and the
// frequency nodes are (j - N/2) dxi(d).  The spacings satisfy
// dx * dxi = 2 pi / N by construction.
struct FourierGrid {
    int points = 0;                 // N, shared by all axes, power of two
    std::vector<double> center;     // per axis
    std::vector<double> halfwidth;  // per axis, L > 0

    int dim() const { return static_cast<int>(center.size()); }
    double dx(int d) const { return 2.0 * halfwidth[static_cast<std::size_t>(d)] / points; }
    double dxi(int d) const { return std::numbers::pi / halfwidth[static_cast<std::size_t>(d)]; }
    double x0(int d) const {
        return center[static_cast<std::size_t>(d)] - halfwidth[static_cast<std::size_t>(d)] +
               0.5 * dx(d);
    }
    double node(int d, int k) const { return x0(d) + k * dx(d); }
    double freq(int d, int j) const { return (j - points / 2) * dxi(d); }

    double cell_volume() const {
        double v = 1.0;
        for (int d = 0; d < dim(); ++d) v *= dx(d);
        return v;
    }

    void validate() const {
        if (center.size() != halfwidth.size())
            throw domain_error("grid center and halfwidth dimensions differ");
        if (dim() < 1 || dim() > 3) throw domain_error("grid dimension must be 1, 2 or 3");
        if (points < 64 || points > (1 << 22) || (points & (points - 1)) != 0)
            throw domain_error("grid points must be a power of two in [64, 2^22]");
        for (int d = 0; d < dim(); ++d) {
            detail::require_finite(center[static_cast<std::size_t>(d)], "grid center");
            double l = halfwidth[static_cast<std::size_t>(d)];
            if (!std::isfinite(l) || l <= 0.0)
                throw domain_error("grid halfwidth must be positive and finite");
        }
    }
};

inline int default_points_for_dim(int n) { return n == 1 ? 4096 : n == 2 ? 1024 : 128; }

// Centers the box on the mean and takes eight standard deviations of
// halfwidth, floored at 1 so short horizons keep enough support.
template <one_dim_exponent E>
FourierGrid default_grid(const E& e, double t, int points = 4096) {
    CumulantRates c = cumulant_rates(e);
    if (!(c.variance_rate > 0.0))
        throw domain_error("degenerate law (zero variance rate) has no density grid");
    FourierGrid g;
    g.points = points;
    g.center = {t * c.mean_rate};
    g.halfwidth = {std::max(8.0 * std::sqrt(t * c.variance_rate), 1.0)};
    g.validate();
    return g;
}

inline FourierGrid default_grid(const BasketModel& m, double t, int points = 0) {
    FourierGrid g;
    g.points = points > 0 ? points : default_points_for_dim(m.size());
    for (int s = 0; s < m.size(); ++s) {
        MarginalExponent e(m, s);
        CumulantRates c = cumulant_rates(e);
        if (!(c.variance_rate > 0.0))
            throw domain_error("asset " + std::to_string(s) +
                               ": degenerate marginal (zero variance rate) has no density");
        g.center.push_back(t * c.mean_rate);
        g.halfwidth.push_back(std::max(8.0 * std::sqrt(t * c.variance_rate), 1.0));
    }
    g.validate();
    return g;
}

// Density values on a FourierGrid, with the quality figures every
// consumer should check before trusting them.
struct DensityTensor {
    FourierGrid grid;
    double t = 0.0;
    std::vector<double> values;          // row major, size N^dim
    double normalization_defect = 0.0;   // |sum * cell_volume - 1|
    double min_value = 0.0;
    double boundary_mass = 0.0;          // mass within three cells of a face

    int dim() const { return grid.dim(); }

    // Integrates out every axis except `axis`.
    std::vector<double> marginal(int axis) const {
        const int n = dim();
        if (axis < 0 || axis >= n) throw domain_error("marginal axis out of range");
        const int N = grid.points;
        double slab = 1.0;
        for (int d = 0; d < n; ++d)
            if (d != axis) slab *= grid.dx(d);
        std::vector<double> out(static_cast<std::size_t>(N), 0.0);
        std::int64_t total = static_cast<std::int64_t>(values.size());
        std::int64_t stride = 1;
        for (int d = n - 1; d > axis; --d) stride *= N;
        for (std::int64_t idx = 0; idx < total; ++idx) {
            int k = static_cast<int>((idx / stride) % N);
            out[static_cast<std::size_t>(k)] += values[static_cast<std::size_t>(idx)] * slab;
        }
        return out;
    }
};

namespace detail {

// Checks the quality figures common to all density builds.  The grid sum
// is pinned near one by construction (the discrete inversion periodizes
// the density), so a box that is too small shows up as mass parked near
// the faces rather than as a mass defect; both figures are kept.
inline void check_density_quality(DensityTensor& d) {
    const int n = d.grid.dim();
    const int N = d.grid.points;
    const int band = 3;
    double sum = 0.0;
    double edge = 0.0;
    double mn = std::numeric_limits<double>::infinity();
    for (std::int64_t flat = 0; flat < static_cast<std::int64_t>(d.values.size()); ++flat) {
        double v = d.values[static_cast<std::size_t>(flat)];
        sum += v;
        if (v < mn) mn = v;
        std::int64_t rem = flat;
        for (int a = n - 1; a >= 0; --a) {
            int k = static_cast<int>(rem % N);
            rem /= N;
            if (k < band || k >= N - band) {
                edge += v;
                break;
            }
        }
    }
    d.normalization_defect = std::abs(sum * d.grid.cell_volume() - 1.0);
    d.min_value = mn;
    d.boundary_mass = edge * d.grid.cell_volume();
    if (d.normalization_defect > 1e-3)
        throw numeric_error("density mass defect " + fmt(d.normalization_defect) +
                            ": grid too small, increase halfwidth or points");
    if (d.min_value < -1e-6)
        throw numeric_error("density dips to " + fmt(d.min_value) +
                            ": grid too coarse, increase points");
    if (d.boundary_mass > 1e-4)
        throw numeric_error("density mass " + fmt(d.boundary_mass) +
                            " sits on the grid boundary: grid too small, increase halfwidth");
}

// FFT along one axis of a flat row-major tensor with extent N per axis.
inline void fft_axis(std::vector<cplx>& buf, int n_dims, int axis, int N) {
    std::int64_t stride = 1;
    for (int d = n_dims - 1; d > axis; --d) stride *= N;
    const std::int64_t block = stride * N;
    const std::int64_t lines = static_cast<std::int64_t>(buf.size()) / N;
    parallel_for(lines, [&](std::int64_t lo, std::int64_t hi) {
        std::vector<cplx> line(static_cast<std::size_t>(N));
        for (std::int64_t li = lo; li < hi; ++li) {
            std::int64_t outer = li / stride;
            std::int64_t inner = li % stride;
            std::int64_t base = outer * block + inner;
            for (int j = 0; j < N; ++j)
                line[static_cast<std::size_t>(j)] = buf[static_cast<std::size_t>(base + j * stride)];
            fft_inplace(line);
            for (int j = 0; j < N; ++j)
                buf[static_cast<std::size_t>(base + j * stride)] = line[static_cast<std::size_t>(j)];
        }
    });
}

}  // namespace detail

// Terminal density of a one-dimensional law with exponent e at horizon t.
// The characteristic function is sampled on the frequency lattice and
// inverted with one FFT; the alternating sign and phase factors place the
// result on the shifted cell-center grid.  With the full weight kept at
// the leftmost frequency node, taking the real part reproduces the exact
// trapezoid rule over the symmetric frequency box.
template <one_dim_exponent E>
DensityTensor density_1d(const E& e, double t, const FourierGrid& g) {
    g.validate();
    if (g.dim() != 1) throw domain_error("density_1d needs a one-dimensional grid");
    if (!(t > 0.0) || !std::isfinite(t)) throw domain_error("time horizon must be positive");
    if (!(cumulant_rates(e).variance_rate > 0.0))
        throw domain_error("degenerate law (zero variance rate) has no density");

    const int N = g.points;
    const double x0 = g.x0(0);
    std::vector<cplx> buf(static_cast<std::size_t>(N));
    detail::parallel_for(N, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t j = lo; j < hi; ++j) {
            double xi = g.freq(0, static_cast<int>(j));
            cplx phi = std::exp(-t * e.evaluate(cplx(xi, 0.0)));
            buf[static_cast<std::size_t>(j)] = phi * std::exp(cplx(0.0, -x0 * xi));
        }
    });
    detail::fft_inplace(buf);

    DensityTensor d;
    d.grid = g;
    d.t = t;
    d.values.resize(static_cast<std::size_t>(N));
    const double scale = g.dxi(0) / (2.0 * std::numbers::pi);
    for (int k = 0; k < N; ++k) {
        double sign = (k & 1) ? -1.0 : 1.0;
        d.values[static_cast<std::size_t>(k)] = scale * sign * buf[static_cast<std::size_t>(k)].real();
    }
    detail::check_density_quality(d);
    return d;
}

// Joint terminal density of the basket model on a tensor grid, by the
// same scheme applied per axis.  Supports up to three assets; beyond
// that the tensor grid is out of reach and Monte Carlo must be used.
inline DensityTensor density_nd(const BasketModel& m, double t, const FourierGrid& g) {
    const int n = m.size();
    if (n > 3)
        throw capability_error("tensor density limited to 3 assets, use Monte Carlo");
    g.validate();
    if (g.dim() != n) throw domain_error("grid dimension must match asset count");
    if (!(t > 0.0) || !std::isfinite(t)) throw domain_error("time horizon must be positive");
    for (int s = 0; s < n; ++s)
        if (!(cumulant_rates(MarginalExponent(m, s)).variance_rate > 0.0))
            throw domain_error("asset " + std::to_string(s) +
                               ": degenerate marginal (zero variance rate) has no density");

    const int N = g.points;
    std::int64_t total = 1;
    for (int d = 0; d < n; ++d) total *= N;

    // Per-axis tables: frequency nodes, x-block exponent values, phases.
    std::vector<std::vector<double>> freq(static_cast<std::size_t>(n));
    std::vector<std::vector<cplx>> xval(static_cast<std::size_t>(n));
    std::vector<std::vector<cplx>> phase(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) {
        freq[d].resize(static_cast<std::size_t>(N));
        xval[d].resize(static_cast<std::size_t>(N));
        phase[d].resize(static_cast<std::size_t>(N));
        const double x0 = g.x0(d);
        for (int j = 0; j < N; ++j) {
            double xi = g.freq(d, j);
            freq[d][static_cast<std::size_t>(j)] = xi;
            xval[d][static_cast<std::size_t>(j)] = m.x_block(d).evaluate(cplx(xi, 0.0));
            phase[d][static_cast<std::size_t>(j)] = std::exp(cplx(0.0, -x0 * xi));
        }
    }

    std::vector<cplx> buf(static_cast<std::size_t>(total));
    detail::parallel_for(total, [&](std::int64_t lo, std::int64_t hi) {
        std::vector<int> idx(static_cast<std::size_t>(n));
        std::vector<double> v(static_cast<std::size_t>(n));
        for (std::int64_t flat = lo; flat < hi; ++flat) {
            std::int64_t rem = flat;
            for (int d = n - 1; d >= 0; --d) {
                idx[static_cast<std::size_t>(d)] = static_cast<int>(rem % N);
                rem /= N;
            }
            cplx psi(0.0, 0.0);
            cplx ph(1.0, 0.0);
            for (int d = 0; d < n; ++d) {
                int j = idx[static_cast<std::size_t>(d)];
                v[static_cast<std::size_t>(d)] = freq[d][static_cast<std::size_t>(j)];
                psi += xval[d][static_cast<std::size_t>(j)];
                ph *= phase[d][static_cast<std::size_t>(j)];
            }
            for (int k = 0; k < n; ++k) {
                double w = 0.0;
                for (int j = 0; j < n; ++j) w += m.mixing()(j, k) * v[static_cast<std::size_t>(j)];
                psi += m.z_block(k).evaluate(cplx(w, 0.0));
            }
            buf[static_cast<std::size_t>(flat)] = std::exp(-t * psi) * ph;
        }
    });

    for (int d = 0; d < n; ++d) detail::fft_axis(buf, n, d, N);

    double scale = 1.0;
    for (int d = 0; d < n; ++d) scale *= g.dxi(d) / (2.0 * std::numbers::pi);

    DensityTensor dsty;
    dsty.grid = g;
    dsty.t = t;
    dsty.values.resize(static_cast<std::size_t>(total));
    detail::parallel_for(total, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t flat = lo; flat < hi; ++flat) {
            std::int64_t rem = flat;
            int ksum = 0;
            for (int d = 0; d < n; ++d) {
                ksum += static_cast<int>(rem % N);
                rem /= N;
            }
            double sign = (ksum & 1) ? -1.0 : 1.0;
            dsty.values[static_cast<std::size_t>(flat)] =
                scale * sign * buf[static_cast<std::size_t>(flat)].real();
        }
    });
    detail::check_density_quality(dsty);
    return dsty;
}

}  // namespace levymix
