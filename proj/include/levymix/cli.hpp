#pragma once

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "levymix/calibration.hpp"
#include "levymix/config.hpp"
#include "levymix/errors.hpp"
#include "levymix/fourier.hpp"
#include "levymix/montecarlo.hpp"
#include "levymix/parallel.hpp"
#include "levymix/pricing.hpp"
#include "levymix/version.hpp"

namespace levymix::cli {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<long> paths;
    std::optional<int> grid_points;
    std::optional<double> grid_halfwidth;
    std::optional<int> asset;  // density: emit this marginal instead of the joint law
    bool no_adjust = false;
    std::optional<std::string> out_path;
    std::string format;  // price/mc: json (default) or csv; validate: text (default) or json
    int threads = 0;
};

namespace detail {

using ojson = nlohmann::ordered_json;

inline void emit(const Options& opt, const std::string& text, std::ostream& fallback) {
    if (opt.out_path) {
        std::ofstream f(*opt.out_path, std::ios::binary);
        if (!f) throw config_error("cannot open output file '" + *opt.out_path + "'");
        f << text;
        return;
    }
    fallback << text;
}

// key,value rows; arrays and objects are flattened with [] and . paths
// so no cell ever contains a comma.
inline void flatten_csv(const ojson& j, const std::string& prefix, std::ostream& os) {
    if (j.is_object()) {
        for (const auto& item : j.items())
            flatten_csv(item.value(), prefix.empty() ? item.key() : prefix + "." + item.key(),
                        os);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten_csv(j[i], prefix + "[" + std::to_string(i) + "]", os);
    } else {
        os << prefix << "," << j.dump() << "\n";
    }
}

inline std::string render_report(const ojson& j, const std::string& format) {
    if (format == "json") return j.dump(2) + "\n";
    if (format == "csv") {
        std::ostringstream os;
        flatten_csv(j, "", os);
        return os.str();
    }
    throw config_error("unknown format '" + format + "' (expected json or csv)");
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline ojson engine_block() {
    ojson e;
    e["name"] = "levymix";
    e["version"] = engine_version;
    return e;
}

inline ojson config_block(const EngineConfig& cfg) {
    ojson c;
    c["path"] = cfg.source;
    c["fingerprint"] = "fnv1a64:" + cfg.fingerprint;
    return c;
}

inline ojson martingale_block(double pre, double post, bool adjusted) {
    ojson m;
    m["adjusted"] = adjusted;
    m["pre_residual_max"] = pre;
    m["post_residual_max"] = post;
    return m;
}

inline ojson grid_block(const FourierGrid& g) {
    ojson j;
    j["points"] = g.points;
    j["center"] = g.center;
    j["halfwidth"] = g.halfwidth;
    return j;
}

}  // namespace detail

inline int run_price(const Options& opt, std::ostream& out, std::ostream&) {
    set_thread_count(opt.threads);
    EngineConfig cfg = load_config(opt.config_path);
    std::vector<double> rates = cfg.market.forward_rates();

    if (cfg.model.size() > 3)
        throw capability_error("transform pricing limited to 3 assets, use the mc command");

    double pre = detail::max_abs(emm_residual(cfg.model, std::span<const double>(rates)));
    BasketModel priced =
        opt.no_adjust ? cfg.model : adjust_drifts(cfg.model, std::span<const double>(rates));
    double post = detail::max_abs(emm_residual(priced, std::span<const double>(rates)));

    FourierGrid grid = resolve_grid(cfg.grid, priced, cfg.market.t_maturity, opt.grid_points,
                                    opt.grid_halfwidth);
    PriceResult res = price_basket(priced, cfg.market, cfg.payoff, grid, /*adjust=*/false);

    detail::ojson rep;
    rep["engine"] = detail::engine_block();
    rep["command"] = "price";
    rep["config"] = detail::config_block(cfg);
    rep["maturity"] = cfg.market.t_maturity;
    rep["rate"] = cfg.market.r;
    rep["grid"] = detail::grid_block(grid);
    rep["martingale"] = detail::martingale_block(pre, post, !opt.no_adjust);
    rep["price"] = res.price;
    detail::ojson diag;
    diag["normalization_defect"] = res.diagnostics.normalization_defect;
    diag["boundary_mass"] = res.diagnostics.boundary_mass;
    diag["payoff_reaches_grid"] = res.diagnostics.payoff_reaches_grid;
    rep["diagnostics"] = diag;
    detail::emit(opt, detail::render_report(rep, opt.format.empty() ? "json" : opt.format), out);
    return 0;
}

inline int run_mc(const Options& opt, std::ostream& out, std::ostream&) {
    set_thread_count(opt.threads);
    EngineConfig cfg = load_config(opt.config_path);
    std::vector<double> rates = cfg.market.forward_rates();

    double pre = detail::max_abs(emm_residual(cfg.model, std::span<const double>(rates)));
    BasketModel priced =
        opt.no_adjust ? cfg.model : adjust_drifts(cfg.model, std::span<const double>(rates));
    double post = detail::max_abs(emm_residual(priced, std::span<const double>(rates)));

    long paths = opt.paths.value_or(cfg.mc.paths);
    std::uint64_t seed = opt.seed.value_or(cfg.mc.seed);
    McResult res = mc_price(priced, cfg.market, cfg.payoff, paths, seed, cfg.mc.antithetic,
                            /*adjust=*/false);

    detail::ojson rep;
    rep["engine"] = detail::engine_block();
    rep["command"] = "mc";
    rep["config"] = detail::config_block(cfg);
    rep["maturity"] = cfg.market.t_maturity;
    rep["rate"] = cfg.market.r;
    rep["martingale"] = detail::martingale_block(pre, post, !opt.no_adjust);
    detail::ojson mc;
    mc["paths"] = res.n_paths;
    mc["seed"] = res.seed;
    mc["antithetic"] = res.antithetic;
    mc["sampler_points"] = 2048;
    rep["mc"] = mc;
    rep["estimate"] = res.estimate;
    rep["std_error"] = res.std_error;
    detail::emit(opt, detail::render_report(rep, opt.format.empty() ? "json" : opt.format), out);
    return 0;
}

inline int run_density(const Options& opt, std::ostream& out, std::ostream&) {
    set_thread_count(opt.threads);
    EngineConfig cfg = load_config(opt.config_path);
    std::vector<double> rates = cfg.market.forward_rates();
    BasketModel priced =
        opt.no_adjust ? cfg.model : adjust_drifts(cfg.model, std::span<const double>(rates));

    std::ostringstream csv;
    csv.precision(17);
    if (opt.asset) {
        int s = *opt.asset;
        if (s < 0 || s >= priced.size())
            throw config_error("--asset index out of range for this config");
        MarginalExponent e(priced, s);
        int points = opt.grid_points.value_or(cfg.grid.points);
        if (points == 0) points = 4096;
        FourierGrid g = default_grid(e, cfg.market.t_maturity, points);
        if (opt.grid_halfwidth) g.halfwidth = {*opt.grid_halfwidth};
        if (!cfg.grid.center.empty()) g.center = {cfg.grid.center[static_cast<std::size_t>(s)]};
        if (!cfg.grid.halfwidth.empty() && !opt.grid_halfwidth)
            g.halfwidth = {cfg.grid.halfwidth[static_cast<std::size_t>(s)]};
        g.validate();
        DensityTensor d = density_1d(e, cfg.market.t_maturity, g);
        csv << "x,density\n";
        for (int k = 0; k < g.points; ++k)
            csv << g.node(0, k) << "," << d.values[static_cast<std::size_t>(k)] << "\n";
    } else {
        if (priced.size() > 3)
            throw capability_error(
                "joint density limited to 3 assets, use --asset for a marginal");
        FourierGrid g = resolve_grid(cfg.grid, priced, cfg.market.t_maturity, opt.grid_points,
                                     opt.grid_halfwidth);
        DensityTensor d = density_nd(priced, cfg.market.t_maturity, g);
        const int n = d.dim();
        const int N = g.points;
        for (int s = 0; s < n; ++s) csv << "x" << s << ",";
        csv << "density\n";
        std::vector<int> idx(static_cast<std::size_t>(n), 0);
        for (std::size_t flat = 0; flat < d.values.size(); ++flat) {
            std::int64_t rem = static_cast<std::int64_t>(flat);
            for (int s = n - 1; s >= 0; --s) {
                idx[static_cast<std::size_t>(s)] = static_cast<int>(rem % N);
                rem /= N;
            }
            for (int s = 0; s < n; ++s)
                csv << g.node(s, idx[static_cast<std::size_t>(s)]) << ",";
            csv << d.values[flat] << "\n";
        }
    }
    detail::emit(opt, csv.str(), out);
    return 0;
}

// Self-checks over a config: calibration, density quality, and agreement
// between the transform and Monte Carlo prices.  Returns 0 only if every
// check passes; failures are reported, not thrown.
inline int run_validate(const Options& opt, std::ostream& out, std::ostream&) {
    set_thread_count(opt.threads);
    if (!opt.format.empty() && opt.format != "text" && opt.format != "json")
        throw config_error("unknown format '" + opt.format + "' (expected text or json)");
    EngineConfig cfg = load_config(opt.config_path);
    std::vector<double> rates = cfg.market.forward_rates();

    struct Check {
        std::string name;
        bool passed;
        std::string detail;
    };
    std::vector<Check> checks;
    auto record = [&](const std::string& name, bool ok, const std::string& det) {
        checks.push_back({name, ok, det});
    };

    BasketModel priced = cfg.model;
    try {
        if (!opt.no_adjust) priced = adjust_drifts(cfg.model, std::span<const double>(rates));
        double worst = detail::max_abs(emm_residual(priced, std::span<const double>(rates)));
        record("martingale_residual", worst <= 1e-8,
               "max |residual| " + levymix::detail::fmt(worst) + " (bound 1e-08)");
    } catch (const std::exception& e) {
        record("martingale_residual", false, e.what());
    }

    bool have_density = false;
    DensityTensor dens;
    if (cfg.model.size() <= 3) {
        try {
            FourierGrid grid = resolve_grid(cfg.grid, priced, cfg.market.t_maturity,
                                            opt.grid_points, opt.grid_halfwidth);
            dens = density_nd(priced, cfg.market.t_maturity, grid);
            have_density = true;
            record("density_mass", dens.normalization_defect <= 1e-4,
                   "defect " + levymix::detail::fmt(dens.normalization_defect) +
                       " (bound 1e-04)");
            record("density_positivity", dens.min_value >= -1e-6,
                   "min value " + levymix::detail::fmt(dens.min_value) + " (bound -1e-06)");
        } catch (const std::exception& e) {
            record("density_mass", false, e.what());
        }
    }

    try {
        long paths = opt.paths.value_or(cfg.mc.paths);
        std::uint64_t seed = opt.seed.value_or(cfg.mc.seed);
        McResult mc = mc_price(priced, cfg.market, cfg.payoff, paths, seed, cfg.mc.antithetic,
                               /*adjust=*/false);
        if (cfg.model.size() <= 3 && have_density) {
            FourierGrid grid = resolve_grid(cfg.grid, priced, cfg.market.t_maturity,
                                            opt.grid_points, opt.grid_halfwidth);
            PriceResult pr =
                price_basket(priced, cfg.market, cfg.payoff, grid, /*adjust=*/false);
            double gap = std::abs(pr.price - mc.estimate);
            double tol = 3.0 * mc.std_error + 1e-4 * (1.0 + std::abs(pr.price));
            record("transform_vs_mc", gap <= tol,
                   "transform " + levymix::detail::fmt(pr.price) + ", mc " +
                       levymix::detail::fmt(mc.estimate) + " +- " +
                       levymix::detail::fmt(mc.std_error) + ", gap " +
                       levymix::detail::fmt(gap) + " (bound " + levymix::detail::fmt(tol) +
                       ")");
        } else {
            record("mc_price_finite", std::isfinite(mc.estimate) && mc.std_error >= 0.0,
                   "estimate " + levymix::detail::fmt(mc.estimate));
        }
    } catch (const std::exception& e) {
        record("transform_vs_mc", false, e.what());
    }

    int failed = 0;
    std::ostringstream text;
    for (const Check& c : checks) {
        if (!c.passed) ++failed;
        text << (c.passed ? "PASSED " : "FAILED ") << c.name << ": " << c.detail << "\n";
    }
    text << "summary: " << (checks.size() - static_cast<std::size_t>(failed)) << " passed, "
         << failed << " failed\n";

    if (opt.format == "json") {
        detail::ojson rep;
        rep["engine"] = detail::engine_block();
        rep["command"] = "validate";
        rep["config"] = detail::config_block(cfg);
        detail::ojson arr = detail::ojson::array();
        for (const Check& c : checks) {
            detail::ojson jc;
            jc["name"] = c.name;
            jc["passed"] = c.passed;
            jc["detail"] = c.detail;
            arr.push_back(jc);
        }
        rep["checks"] = arr;
        rep["failed"] = failed;
        detail::emit(opt, detail::render_report(rep, "json"), out);
    } else {
        detail::emit(opt, text.str(), out);
    }
    return failed == 0 ? 0 : 1;
}

// Maps the error taxonomy onto process exit codes.
template <class Fn>
int guarded(Fn&& fn, std::ostream& err) {
    try {
        return fn();
    } catch (const config_error& e) {
        err << "error (config): " << e.what() << "\n";
        return 2;
    } catch (const capability_error& e) {
        err << "error (capability): " << e.what() << "\n";
        return 5;
    } catch (const numeric_error& e) {
        err << "error (numeric): " << e.what() << "\n";
        return 4;
    } catch (const domain_error& e) {
        err << "error (domain): " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    }
}

inline int dispatch(const std::string& command, const Options& opt, std::ostream& out,
                    std::ostream& err) {
    return guarded(
        [&]() -> int {
            if (command == "price") return run_price(opt, out, err);
            if (command == "mc") return run_mc(opt, out, err);
            if (command == "density") return run_density(opt, out, err);
            if (command == "validate") return run_validate(opt, out, err);
            throw config_error("unknown command '" + command + "'");
        },
        err);
}

}  // namespace levymix::cli
