// End-to-end acceptance checks.  Each criterion prints one PASS/FAIL line
// with the measured figures; the process exits nonzero if any line fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "levymix/levymix.hpp"

using namespace levymix;
using levymix::detail::fmt;

namespace {

const std::string kConfigDir = LEVYMIX_CONFIG_DIR;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Harness {
    int failed = 0;

    template <class Fn>
    void run(int idx, const std::string& what, Fn&& fn) {
        bool ok = false;
        std::string detail;
        try {
            std::tie(ok, detail) = fn();
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << idx << " [" << what
                  << "]: " << detail << "\n";
        if (!ok) ++failed;
    }
};

using Outcome = std::pair<bool, std::string>;

KoBoLParams random_kobol(std::mt19937& gen, bool high_order) {
    std::uniform_real_distribution<double> nu_lo(0.1, 0.95), nu_hi(1.05, 1.9);
    std::uniform_real_distribution<double> uc(0.2, 3.0), ul(2.0, 8.0), um(-0.5, 0.5);
    KoBoLParams p;
    p.nu = high_order ? nu_hi(gen) : nu_lo(gen);
    p.c_plus = uc(gen);
    p.c_minus = uc(gen);
    p.lambda_plus = ul(gen);
    p.lambda_minus = -ul(gen);
    p.mu = um(gen);
    return p;
}

EngineConfig fixture(const std::string& name) { return load_config(kConfigDir + "/" + name); }

BasketModel calibrated(const EngineConfig& cfg) {
    std::vector<double> rates = cfg.market.forward_rates();
    return adjust_drifts(cfg.model, std::span<const double>(rates));
}

// Exponent and its integral form agree after reconciling the drift
// constant.  Below order one the constant is explicit; above it the two
// parameterizations differ by a term exactly linear in frequency, so the
// constant is pinned at one frequency and every other one is a check.
Outcome criterion_levy_khintchine() {
    auto t0 = Clock::now();
    std::mt19937 gen(101);
    double worst = 0.0;
    for (bool high : {false, true}) {
        for (int trial = 0; trial < 10; ++trial) {
            KoBoLParams p = random_kobol(gen, high);
            LevyDensitySpec d = kobol_levy_density(p);
            double b;
            if (!high) {
                b = p.mu + p.c_plus * incomplete_b(p.nu, -p.lambda_minus) -
                    p.c_minus * incomplete_b(p.nu, p.lambda_plus);
            } else {
                const double xi0 = 0.37;
                cplx lk0 = lk_exponent_numeric(d, 0.0, 0.0, cplx(xi0, 0.0));
                KoBoLParams p0 = p;
                p0.mu = 0.0;
                cplx k0 = kobol_exponent(p0, cplx(xi0, 0.0));
                b = p.mu + (lk0 - k0).imag() / xi0;
            }
            for (int j = 0; j < 40; ++j) {
                double xi = -10.0 + 20.0 * (j + 0.5) / 40.0;
                cplx lhs = kobol_exponent(p, cplx(xi, 0.0));
                cplx rhs = lk_exponent_numeric(d, 0.0, b, cplx(xi, 0.0));
                worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
            }
        }
    }
    double secs = seconds_since(t0);
    bool ok = worst <= 1e-6 && secs < 60.0;
    return {ok, "sup rel gap " + fmt(worst) + " over 20 param sets x 40 xi (bound 1e-06), " +
                    fmt(secs) + "s (budget 60s)"};
}

Outcome criterion_exponent_identities() {
    std::mt19937 gen(202);
    std::uniform_real_distribution<double> uxi(-20.0, 20.0);
    double worst_zero = 0.0, worst_herm = 0.0, worst_re = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        KoBoLParams p = random_kobol(gen, trial % 2 == 1);
        worst_zero = std::max(worst_zero, std::abs(kobol_exponent(p, cplx(0.0, 0.0))));
        for (int j = 0; j < 20; ++j) {
            double xi = uxi(gen);
            cplx plus = kobol_exponent(p, cplx(xi, 0.0));
            cplx minus = kobol_exponent(p, cplx(-xi, 0.0));
            worst_herm = std::max(worst_herm,
                                  std::abs(std::conj(minus) - plus) / (1.0 + std::abs(plus)));
            worst_re = std::max(worst_re, -plus.real());
        }
    }
    bool ok = worst_zero <= 1e-12 && worst_herm <= 1e-12 && worst_re <= 1e-12;
    return {ok, "100 param sets x 20 xi: |psi(0)| " + fmt(worst_zero) + ", hermitian gap " +
                    fmt(worst_herm) + ", worst -Re psi " + fmt(worst_re) +
                    " (bounds 1e-12)"};
}

Outcome criterion_empirical_cf() {
    auto t0 = Clock::now();
    std::mt19937 gen(303);
    double worst = 0.0;
    for (const std::string& name : {std::string("kobol_2asset.json"),
                                    std::string("mixed_3asset.json")}) {
        EngineConfig cfg = fixture(name);
        BasketModel m = calibrated(cfg);
        const double t = cfg.market.t_maturity;
        TerminalDraws draws = simulate_terminal(m, t, 1000000, 333);
        const int n = m.size();
        std::uniform_real_distribution<double> uv(-4.0 / std::sqrt(double(n)),
                                                  4.0 / std::sqrt(double(n)));
        for (int k = 0; k < 20; ++k) {
            std::vector<double> v(static_cast<std::size_t>(n));
            for (double& c : v) c = uv(gen);
            cplx model_cf = characteristic_function(m, std::span<const double>(v), t);
            cplx emp = empirical_cf(draws, std::span<const double>(v));
            worst = std::max(worst, std::abs(model_cf - emp));
        }
    }
    double secs = seconds_since(t0);
    bool ok = worst <= 5e-3 && secs < 120.0;
    return {ok, "worst |model cf - empirical cf| " + fmt(worst) +
                    " over 2 models x 20 args x 1e6 paths (bound 5e-03), " + fmt(secs) +
                    "s (budget 120s)"};
}

Outcome criterion_correlation() {
    double worst_ana = 0.0, worst_mc = 0.0;
    for (int n : {2, 3}) {
        std::vector<CharExponent> x, z;
        for (int s = 0; s < n; ++s) {
            x.push_back(CharExponent::gaussian({1.0, 0.0}));
            z.push_back(CharExponent::gaussian({1.0, 0.0}));
        }
        BasketModel m(std::move(x), std::move(z), Matrix::ones(n));
        const double rho = double(n) / double(n + 1);
        for (int s = 0; s < n; ++s)
            for (int l = s + 1; l < n; ++l)
                worst_ana = std::max(worst_ana,
                                     std::abs(correlation(m, s, l, 1.0) - rho));

        const long paths = 200000;
        TerminalDraws d = simulate_terminal(m, 1.0, paths, 77, /*antithetic=*/false);
        double m0 = 0.0, m1 = 0.0;
        for (long p = 0; p < paths; ++p) {
            m0 += d.row(p)[0];
            m1 += d.row(p)[1];
        }
        m0 /= paths;
        m1 /= paths;
        double v0 = 0.0, v1 = 0.0, cv = 0.0;
        for (long p = 0; p < paths; ++p) {
            double a = d.row(p)[0] - m0, b = d.row(p)[1] - m1;
            v0 += a * a;
            v1 += b * b;
            cv += a * b;
        }
        double sample_rho = cv / std::sqrt(v0 * v1);
        double tol = 3.0 * (1.0 - rho * rho) / std::sqrt(double(paths));
        worst_mc = std::max(worst_mc, std::abs(sample_rho - rho) / tol);
    }
    bool ok = worst_ana <= 1e-10 && worst_mc <= 1.0;
    return {ok, "all-ones mixing, n=2,3: analytic corr gap " + fmt(worst_ana) +
                    " (bound 1e-10), sample corr at " + fmt(worst_mc) +
                    " of its 3 sigma allowance"};
}

Outcome criterion_martingale() {
    double worst_res = 0.0, worst_fwd = 0.0;
    for (const std::string& name :
         {std::string("bs_1asset.json"), std::string("margrabe_2asset.json"),
          std::string("kobol_2asset.json"), std::string("mixed_3asset.json")}) {
        EngineConfig cfg = fixture(name);
        BasketModel m = calibrated(cfg);
        std::vector<double> rates = cfg.market.forward_rates();
        std::vector<double> res = emm_residual(m, std::span<const double>(rates));
        for (double r : res) worst_res = std::max(worst_res, std::abs(r));

        const double t = cfg.market.t_maturity;
        const long paths = 1000000;
        TerminalDraws d = simulate_terminal(m, t, paths, 55, /*antithetic=*/false);
        for (int s = 0; s < m.size(); ++s) {
            double target = cfg.market.spots[static_cast<std::size_t>(s)] *
                            std::exp(rates[static_cast<std::size_t>(s)] * t);
            double mean = 0.0;
            for (long p = 0; p < paths; ++p)
                mean += cfg.market.spots[static_cast<std::size_t>(s)] *
                        std::exp(d.row(p)[static_cast<std::size_t>(s)]);
            mean /= paths;
            double var = 0.0;
            for (long p = 0; p < paths; ++p) {
                double y = cfg.market.spots[static_cast<std::size_t>(s)] *
                               std::exp(d.row(p)[static_cast<std::size_t>(s)]) -
                           mean;
                var += y * y;
            }
            double se = std::sqrt(var / (paths - 1.0) / paths);
            worst_fwd = std::max(worst_fwd, std::abs(mean - target) / (3.0 * se));
        }
    }
    bool ok = worst_res <= 1e-10 && worst_fwd <= 1.0;
    return {ok, "4 fixtures: max |residual| " + fmt(worst_res) +
                    " (bound 1e-10), worst forward gap at " + fmt(worst_fwd) +
                    " of its 3 sigma allowance over 1e6 paths"};
}

Outcome criterion_black_scholes() {
    auto t0 = Clock::now();
    EngineConfig cfg = fixture("bs_1asset.json");
    BasketModel m = calibrated(cfg);
    FourierGrid grid = resolve_grid(cfg.grid, m, cfg.market.t_maturity);
    PriceResult res = price_basket(m, cfg.market, cfg.payoff, grid, /*adjust=*/false);
    double exact = black_scholes_call(100.0, 100.0, 0.05, 0.2, 1.0);
    double rel = std::abs(res.price / exact - 1.0);

    McResult mc = mc_price(m, cfg.market, cfg.payoff, cfg.mc.paths, cfg.mc.seed,
                           cfg.mc.antithetic, /*adjust=*/false);
    double mc_gap = std::abs(mc.estimate - exact) / (3.0 * mc.std_error);
    double secs = seconds_since(t0);
    bool ok = rel <= 1e-4 && mc_gap <= 1.0 && secs < 30.0;
    return {ok, "transform rel err " + fmt(rel) + " (bound 1e-04), mc gap at " + fmt(mc_gap) +
                    " of 3 sigma, " + fmt(secs) + "s (budget 30s)"};
}

Outcome criterion_margrabe() {
    auto t0 = Clock::now();
    EngineConfig cfg = fixture("margrabe_2asset.json");
    BasketModel m = calibrated(cfg);
    FourierGrid grid = resolve_grid(cfg.grid, m, cfg.market.t_maturity);
    PriceResult res = price_basket(m, cfg.market, cfg.payoff, grid, /*adjust=*/false);
    double exact = margrabe_price(100.0, 95.0, 0.3, 0.2, 0.5, 1.0);
    double rel = std::abs(res.price / exact - 1.0);

    McResult mc = mc_price(m, cfg.market, cfg.payoff, cfg.mc.paths, cfg.mc.seed,
                           cfg.mc.antithetic, /*adjust=*/false);
    double mc_gap = std::abs(mc.estimate - exact) / (3.0 * mc.std_error);
    double secs = seconds_since(t0);
    bool ok = rel <= 5e-4 && mc_gap <= 1.0 && secs < 120.0;
    return {ok, "transform rel err " + fmt(rel) + " (bound 5e-04), mc gap at " + fmt(mc_gap) +
                    " of 3 sigma, " + fmt(secs) + "s (budget 120s)"};
}

Outcome criterion_density_quality() {
    double worst_defect = 0.0, worst_min = 0.0, worst_marg = 0.0;
    for (const std::string& name :
         {std::string("bs_1asset.json"), std::string("margrabe_2asset.json"),
          std::string("kobol_2asset.json"), std::string("mixed_3asset.json")}) {
        EngineConfig cfg = fixture(name);
        BasketModel m = calibrated(cfg);
        const double t = cfg.market.t_maturity;
        FourierGrid grid = resolve_grid(cfg.grid, m, t);
        DensityTensor dens = density_nd(m, t, grid);
        worst_defect = std::max(worst_defect, dens.normalization_defect);
        worst_min = std::min(worst_min, dens.min_value);
        for (int s = 0; s < m.size(); ++s) {
            std::vector<double> marg = dens.marginal(s);
            FourierGrid g1;
            g1.points = grid.points;
            g1.center = {grid.center[static_cast<std::size_t>(s)]};
            g1.halfwidth = {grid.halfwidth[static_cast<std::size_t>(s)]};
            DensityTensor d1 = density_1d(MarginalExponent(m, s), t, g1);
            for (int k = 0; k < grid.points; ++k)
                worst_marg = std::max(worst_marg,
                                      std::abs(marg[static_cast<std::size_t>(k)] -
                                               d1.values[static_cast<std::size_t>(k)]));
        }
    }
    bool ok = worst_defect <= 1e-4 && worst_min >= -1e-6 && worst_marg <= 1e-4;
    return {ok, "4 fixtures: mass defect " + fmt(worst_defect) +
                    " (bound 1e-04), min value " + fmt(worst_min) +
                    " (bound -1e-06), marginal consistency gap " + fmt(worst_marg) +
                    " (bound 1e-04)"};
}

Outcome criterion_reproducibility() {
    for (const std::string& name :
         {std::string("bs_1asset.json"), std::string("kobol_2asset.json")}) {
        cli::Options opt;
        opt.config_path = kConfigDir + "/" + name;
        opt.paths = 200000;
        std::string first;
        for (int threads : {1, 4, 1}) {
            opt.threads = threads;
            std::ostringstream out, err;
            int code = cli::dispatch("mc", opt, out, err);
            if (code != 0) return {false, name + ": mc exited with code " + std::to_string(code)};
            if (first.empty())
                first = out.str();
            else if (out.str() != first)
                return {false, name + ": mc report changed across runs (threads " +
                                   std::to_string(threads) + ")"};
        }
    }
    return {true, "mc reports byte-identical across repeats and thread counts 1 and 4"};
}

Outcome criterion_refusals() {
    // deliberately uncalibrated pricing must be refused, and the refusal
    // must be visible both as an exit code and in the validate report
    cli::Options opt;
    opt.config_path = kConfigDir + "/bs_1asset.json";
    opt.no_adjust = true;
    opt.paths = 2000;

    std::ostringstream vout, verr;
    int vcode = cli::dispatch("validate", opt, vout, verr);
    if (vcode == 0) return {false, "validate --no-adjust exited 0 on an uncalibrated model"};
    if (vout.str().find("FAILED martingale_residual") == std::string::npos)
        return {false, "validate --no-adjust did not report the martingale failure"};

    std::ostringstream pout, perr;
    int pcode = cli::dispatch("price", opt, pout, perr);
    if (pcode != 3)
        return {false, "price --no-adjust exited " + std::to_string(pcode) + ", expected 3"};
    if (perr.str().find("drift adjustment") == std::string::npos)
        return {false, "price refusal did not point at the drift adjustment"};

    const std::string four_path = "acceptance_four_assets.json";
    {
        std::ofstream f(four_path, std::ios::binary);
        f << R"({
            "assets": [{"spot": 100.0, "x": {"family": "gaussian", "a": 0.04}},
                       {"spot": 100.0, "x": {"family": "gaussian", "a": 0.04}},
                       {"spot": 100.0, "x": {"family": "gaussian", "a": 0.04}},
                       {"spot": 100.0, "x": {"family": "gaussian", "a": 0.04}}],
            "z": [{"family": "null"}, {"family": "null"}, {"family": "null"},
                  {"family": "null"}],
            "mixing": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]],
            "market": {"r": 0.05, "expiry": 1.0},
            "payoff": {"weights": [0.25, 0.25, 0.25, 0.25], "strike": 100.0}
        })";
    }
    cli::Options fopt;
    fopt.config_path = four_path;
    std::ostringstream fout, ferr;
    int fcode = cli::dispatch("price", fopt, fout, ferr);
    std::remove(four_path.c_str());
    if (fcode != 5)
        return {false, "4-asset transform price exited " + std::to_string(fcode) +
                           ", expected 5"};
    if (ferr.str().find("mc") == std::string::npos)
        return {false, "4-asset refusal did not route to monte carlo"};

    return {true, "uncalibrated pricing exits 3 and fails validate; 4-asset transform exits 5 "
                  "and routes to mc"};
}

}  // namespace

int main() {
    Harness h;
    h.run(1, "exponent matches levy-khintchine integral", criterion_levy_khintchine);
    h.run(2, "exponent identities", criterion_exponent_identities);
    h.run(3, "empirical cf matches the model", criterion_empirical_cf);
    h.run(4, "factor correlation", criterion_correlation);
    h.run(5, "martingale calibration and forwards", criterion_martingale);
    h.run(6, "black-scholes agreement", criterion_black_scholes);
    h.run(7, "margrabe agreement", criterion_margrabe);
    h.run(8, "density quality and marginals", criterion_density_quality);
    h.run(9, "bitwise reproducibility", criterion_reproducibility);
    h.run(10, "misuse refusals", criterion_refusals);
    if (h.failed == 0) {
        std::cout << "acceptance: 10 of 10 criteria passed\n";
        return 0;
    }
    std::cout << "acceptance: " << h.failed << " criteria failed\n";
    return 1;
}
