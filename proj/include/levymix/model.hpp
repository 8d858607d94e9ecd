#pragma once

#include <cmath>
#include <complex>
#include <sstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "levymix/errors.hpp"
#include "levymix/levy_core.hpp"

namespace levymix {

// Dense square matrix, row major.  Used both for the mixing matrix A and
// for covariance results.
class Matrix {
  public:
    Matrix() : n_(0) {}

    explicit Matrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {
        if (n < 0) throw domain_error("matrix size must be nonnegative");
    }

    static Matrix identity(int n) {
        Matrix m(n);
        for (int j = 0; j < n; ++j) m(j, j) = 1.0;
        return m;
    }

    static Matrix ones(int n) {
        Matrix m(n);
        for (double& v : m.a_) v = 1.0;
        return m;
    }

    static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
        int n = static_cast<int>(rows.size());
        Matrix m(n);
        for (int j = 0; j < n; ++j) {
            if (static_cast<int>(rows[j].size()) != n)
                throw domain_error("matrix rows must form a square matrix");
            for (int k = 0; k < n; ++k) m(j, k) = rows[j][k];
        }
        return m;
    }

    int size() const { return n_; }

    double operator()(int j, int k) const { return a_[static_cast<std::size_t>(j) * n_ + k]; }
    double& operator()(int j, int k) { return a_[static_cast<std::size_t>(j) * n_ + k]; }

    void validate_finite() const {
        for (double v : a_)
            if (!std::isfinite(v)) throw domain_error("matrix entries must be finite");
    }

  private:
    int n_;
    std::vector<double> a_;
};

// Joint model U_t = X_t + A Z_t with independent one-dimensional blocks
// X_1..X_n, Z_1..Z_n and a fixed n x n mixing matrix A.
class BasketModel {
  public:
    BasketModel(std::vector<CharExponent> x_blocks, std::vector<CharExponent> z_blocks,
                Matrix mixing)
        : x_(std::move(x_blocks)), z_(std::move(z_blocks)), a_(std::move(mixing)) {
        const int n = static_cast<int>(x_.size());
        if (n == 0) throw domain_error("model needs at least one asset");
        if (static_cast<int>(z_.size()) != n)
            throw domain_error("x and z block counts must match");
        if (a_.size() != n) throw domain_error("mixing matrix size must match block count");
        a_.validate_finite();
    }

    int size() const { return static_cast<int>(x_.size()); }
    const CharExponent& x_block(int s) const { return x_[static_cast<std::size_t>(s)]; }
    const CharExponent& z_block(int m) const { return z_[static_cast<std::size_t>(m)]; }
    const Matrix& mixing() const { return a_; }

    // Copy with per-asset drift shifts applied to the x blocks.
    BasketModel with_x_drift_shifts(std::span<const double> delta) const {
        if (static_cast<int>(delta.size()) != size())
            throw domain_error("drift shift count must match asset count");
        std::vector<CharExponent> shifted;
        shifted.reserve(x_.size());
        for (int s = 0; s < size(); ++s)
            shifted.push_back(delta[s] == 0.0 ? x_[s] : x_[s].with_drift_shift(delta[s]));
        return BasketModel(std::move(shifted), z_, a_);
    }

  private:
    std::vector<CharExponent> x_;
    std::vector<CharExponent> z_;
    Matrix a_;
};

namespace detail {

inline std::string block_label(const char* family, int index) {
    std::ostringstream os;
    os << family << "[" << index << "]";
    return os.str();
}

}  // namespace detail

// Joint characteristic exponent Psi(v) = sum_s psi_s(v_s) + sum_m phi_m((A^T v)_m).
// Each summand is checked against its own strip so errors name the block.
inline cplx joint_exponent(const BasketModel& m, std::span<const cplx> v) {
    const int n = m.size();
    if (static_cast<int>(v.size()) != n)
        throw domain_error("argument dimension must match asset count");
    cplx total(0.0, 0.0);
    for (int s = 0; s < n; ++s) {
        detail::check_strip(m.x_block(s).strip(), v[s], detail::block_label("x", s).c_str());
        total += m.x_block(s).evaluate(v[s]);
    }
    for (int k = 0; k < n; ++k) {
        cplx w(0.0, 0.0);
        for (int j = 0; j < n; ++j) w += m.mixing()(j, k) * v[j];
        detail::check_strip(m.z_block(k).strip(), w, detail::block_label("z", k).c_str());
        total += m.z_block(k).evaluate(w);
    }
    return total;
}

inline cplx joint_exponent(const BasketModel& m, std::span<const double> v) {
    std::vector<cplx> vc(v.begin(), v.end());
    return joint_exponent(m, std::span<const cplx>(vc));
}

// Joint characteristic function E exp(i <v, U_t>) = exp(-t Psi(v)).
inline cplx characteristic_function(const BasketModel& m, std::span<const cplx> v, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw domain_error("time horizon must be positive");
    return std::exp(-t * joint_exponent(m, v));
}

inline cplx characteristic_function(const BasketModel& m, std::span<const double> v, double t) {
    std::vector<cplx> vc(v.begin(), v.end());
    return characteristic_function(m, std::span<const cplx>(vc), t);
}

// Exponent of the s-th marginal U_s = X_s + sum_m a_{s,m} Z_m, as a
// self-contained evaluable: x -> psi_s(x) + sum_m phi_m(a_{s,m} x).
class MarginalExponent {
  public:
    MarginalExponent(const BasketModel& m, int s)
        : x_(check_index(m, s).x_block(s)), strip_(m.x_block(s).strip()) {
        for (int k = 0; k < m.size(); ++k) {
            double a = m.mixing()(s, k);
            if (a == 0.0) continue;
            weighted_.emplace_back(a, m.z_block(k));
            strip_ = Strip::intersect(strip_, Strip::pulled_back(m.z_block(k).strip(), a));
        }
        if (strip_.empty()) throw domain_error("marginal strip is empty");
    }

    cplx evaluate(cplx xi) const {
        detail::check_strip(strip_, xi, "marginal exponent");
        cplx total = x_.evaluate(xi);
        for (const auto& [a, e] : weighted_) total += e.evaluate(a * xi);
        return total;
    }

    Strip strip() const { return strip_; }

  private:
    static const BasketModel& check_index(const BasketModel& m, int s) {
        if (s < 0 || s >= m.size()) throw domain_error("marginal index out of range");
        return m;
    }

    CharExponent x_;
    std::vector<std::pair<double, CharExponent>> weighted_;
    Strip strip_;
};

inline MarginalExponent marginal_exponent(const BasketModel& m, int s) {
    return MarginalExponent(m, s);
}

// Covariance matrix of U_t: t * (diag(vx) + A diag(vz) A^T) where vx, vz
// are the per-unit-time variances of the blocks.
inline Matrix second_cumulants(const BasketModel& m, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw domain_error("time horizon must be positive");
    const int n = m.size();
    std::vector<double> vx(n), vz(n);
    for (int s = 0; s < n; ++s) vx[s] = cumulant_rates(m.x_block(s)).variance_rate;
    for (int k = 0; k < n; ++k) vz[k] = cumulant_rates(m.z_block(k)).variance_rate;
    Matrix cov(n);
    for (int s = 0; s < n; ++s)
        for (int l = 0; l < n; ++l) {
            double acc = s == l ? vx[s] : 0.0;
            for (int k = 0; k < n; ++k) acc += m.mixing()(s, k) * vz[k] * m.mixing()(l, k);
            cov(s, l) = t * acc;
        }
    return cov;
}

// Pearson correlation of U_s and U_l at horizon t.
inline double correlation(const BasketModel& m, int s, int l, double t) {
    const int n = m.size();
    if (s < 0 || s >= n || l < 0 || l >= n) throw domain_error("asset index out of range");
    if (s == l) throw domain_error("correlation needs two distinct assets");
    Matrix cov = second_cumulants(m, t);
    double vs = cov(s, s), vl = cov(l, l);
    if (!(vs > 0.0) || !(vl > 0.0))
        throw domain_error("correlation undefined for a degenerate marginal");
    return cov(s, l) / std::sqrt(vs * vl);
}

}  // namespace levymix
