#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "levymix/errors.hpp"
#include "levymix/fourier.hpp"
#include "levymix/model.hpp"
#include "levymix/pricing.hpp"

namespace levymix {

struct GridSettings {
    int points = 0;                 // 0 means pick by dimension
    std::vector<double> halfwidth;  // empty means derive from cumulants
    std::vector<double> center;     // empty means derive from cumulants
};

struct McSettings {
    long paths = 200000;
    std::uint64_t seed = 1;
    bool antithetic = true;
};

struct EngineConfig {
    BasketModel model;
    MarketSpec market;
    PayoffSpec payoff;
    GridSettings grid;
    McSettings mc;
    std::string fingerprint;
    std::string source;
};

// 64-bit FNV-1a over the raw config bytes; embedded in every report so
// outputs can be traced back to their exact input file.
inline std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

namespace detail {

using njson = nlohmann::json;

inline std::string cfg_where(const std::string& path) { return path.empty() ? "config" : path; }

inline const njson& cfg_need(const njson& o, const char* key, const std::string& path) {
    auto it = o.find(key);
    if (it == o.end())
        throw config_error(cfg_where(path) + ": missing required key '" + key + "'");
    return *it;
}

inline void cfg_known_keys(const njson& o, std::initializer_list<const char*> keys,
                           const std::string& path) {
    for (const auto& item : o.items()) {
        bool ok = false;
        for (const char* k : keys)
            if (item.key() == k) ok = true;
        if (!ok) throw config_error(cfg_where(path) + ": unknown key '" + item.key() + "'");
    }
}

inline double cfg_number(const njson& v, const std::string& path) {
    if (!v.is_number()) throw config_error(cfg_where(path) + ": expected a number");
    return v.get<double>();
}

inline long cfg_integer(const njson& v, const std::string& path) {
    if (!v.is_number_integer()) throw config_error(cfg_where(path) + ": expected an integer");
    return v.get<long>();
}

inline bool cfg_boolean(const njson& v, const std::string& path) {
    if (!v.is_boolean()) throw config_error(cfg_where(path) + ": expected a boolean");
    return v.get<bool>();
}

inline std::vector<double> cfg_number_array(const njson& v, const std::string& path) {
    if (!v.is_array()) throw config_error(cfg_where(path) + ": expected an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(cfg_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline CharExponent cfg_block(const njson& v, const std::string& path) {
    if (!v.is_object()) throw config_error(cfg_where(path) + ": expected an object");
    const njson& fam = cfg_need(v, "family", path);
    if (!fam.is_string()) throw config_error(path + ".family: expected a string");
    std::string family = fam.get<std::string>();
    try {
        if (family == "null") {
            cfg_known_keys(v, {"family"}, path);
            return CharExponent::null();
        }
        if (family == "gaussian") {
            cfg_known_keys(v, {"family", "a", "gamma"}, path);
            GaussianParams p;
            p.a = cfg_number(cfg_need(v, "a", path), path + ".a");
            p.gamma = v.contains("gamma") ? cfg_number(v["gamma"], path + ".gamma") : 0.0;
            return CharExponent::gaussian(p);
        }
        if (family == "kobol") {
            cfg_known_keys(
                v, {"family", "nu", "c_plus", "c_minus", "lambda_plus", "lambda_minus", "mu"},
                path);
            KoBoLParams p;
            p.nu = cfg_number(cfg_need(v, "nu", path), path + ".nu");
            p.c_plus = cfg_number(cfg_need(v, "c_plus", path), path + ".c_plus");
            p.c_minus = cfg_number(cfg_need(v, "c_minus", path), path + ".c_minus");
            p.lambda_plus = cfg_number(cfg_need(v, "lambda_plus", path), path + ".lambda_plus");
            p.lambda_minus =
                cfg_number(cfg_need(v, "lambda_minus", path), path + ".lambda_minus");
            p.mu = v.contains("mu") ? cfg_number(v["mu"], path + ".mu") : 0.0;
            return CharExponent::kobol(p);
        }
    } catch (const domain_error& e) {
        throw config_error(cfg_where(path) + ": " + e.what());
    }
    throw config_error(path + ".family: unknown family '" + family +
                       "' (expected kobol, gaussian or null)");
}

}  // namespace detail

// Parses and fully validates a model configuration.  Every invariant of
// the underlying types is re-raised as a config_error naming the JSON
// path that caused it.
inline EngineConfig parse_config(std::string_view text, const std::string& source_name) {
    using detail::njson;
    njson root;
    try {
        root = njson::parse(text);
    } catch (const njson::exception& e) {
        throw config_error(source_name + ": " + e.what());
    }
    if (!root.is_object()) throw config_error(source_name + ": top level must be an object");
    detail::cfg_known_keys(root, {"assets", "z", "mixing", "market", "payoff", "grid", "mc"},
                           "");

    const njson& assets = detail::cfg_need(root, "assets", "");
    if (!assets.is_array() || assets.empty())
        throw config_error("assets: expected a nonempty array");
    const int n = static_cast<int>(assets.size());

    std::vector<double> spots;
    std::vector<CharExponent> xblocks;
    for (int s = 0; s < n; ++s) {
        std::string path = "assets[" + std::to_string(s) + "]";
        const njson& a = assets[static_cast<std::size_t>(s)];
        if (!a.is_object()) throw config_error(path + ": expected an object");
        detail::cfg_known_keys(a, {"spot", "x"}, path);
        spots.push_back(detail::cfg_number(detail::cfg_need(a, "spot", path), path + ".spot"));
        xblocks.push_back(detail::cfg_block(detail::cfg_need(a, "x", path), path + ".x"));
    }

    const njson& zarr = detail::cfg_need(root, "z", "");
    if (!zarr.is_array() || static_cast<int>(zarr.size()) != n)
        throw config_error("z: expected an array with one block per asset");
    std::vector<CharExponent> zblocks;
    for (int k = 0; k < n; ++k)
        zblocks.push_back(detail::cfg_block(zarr[static_cast<std::size_t>(k)],
                                            "z[" + std::to_string(k) + "]"));

    const njson& mix = detail::cfg_need(root, "mixing", "");
    if (!mix.is_array() || static_cast<int>(mix.size()) != n)
        throw config_error("mixing: expected an n x n array of rows");
    std::vector<std::vector<double>> rows;
    for (int j = 0; j < n; ++j) {
        rows.push_back(detail::cfg_number_array(mix[static_cast<std::size_t>(j)],
                                                "mixing[" + std::to_string(j) + "]"));
        if (static_cast<int>(rows.back().size()) != n)
            throw config_error("mixing[" + std::to_string(j) + "]: expected " +
                               std::to_string(n) + " entries");
    }

    MarketSpec market;
    market.spots = spots;
    {
        const njson& mkt = detail::cfg_need(root, "market", "");
        if (!mkt.is_object()) throw config_error("market: expected an object");
        detail::cfg_known_keys(mkt, {"r", "expiry", "asset_rates"}, "market");
        market.r = detail::cfg_number(detail::cfg_need(mkt, "r", "market"), "market.r");
        market.t_maturity =
            detail::cfg_number(detail::cfg_need(mkt, "expiry", "market"), "market.expiry");
        if (mkt.contains("asset_rates"))
            market.asset_rates = detail::cfg_number_array(mkt["asset_rates"], "market.asset_rates");
    }

    PayoffSpec payoff;
    {
        const njson& po = detail::cfg_need(root, "payoff", "");
        if (!po.is_object()) throw config_error("payoff: expected an object");
        detail::cfg_known_keys(po, {"weights", "strike"}, "payoff");
        payoff.weights =
            detail::cfg_number_array(detail::cfg_need(po, "weights", "payoff"), "payoff.weights");
        payoff.strike =
            detail::cfg_number(detail::cfg_need(po, "strike", "payoff"), "payoff.strike");
    }

    GridSettings grid;
    if (root.contains("grid")) {
        const njson& g = root["grid"];
        if (!g.is_object()) throw config_error("grid: expected an object");
        detail::cfg_known_keys(g, {"points", "halfwidth", "center"}, "grid");
        if (g.contains("points")) {
            long p = detail::cfg_integer(g["points"], "grid.points");
            if (p < 64 || p > (1 << 22) || (p & (p - 1)) != 0)
                throw config_error("grid.points: expected a power of two in [64, 2^22]");
            grid.points = static_cast<int>(p);
        }
        if (g.contains("halfwidth")) {
            if (g["halfwidth"].is_number())
                grid.halfwidth.assign(static_cast<std::size_t>(n),
                                      detail::cfg_number(g["halfwidth"], "grid.halfwidth"));
            else
                grid.halfwidth = detail::cfg_number_array(g["halfwidth"], "grid.halfwidth");
            if (static_cast<int>(grid.halfwidth.size()) != n)
                throw config_error("grid.halfwidth: expected one entry per asset");
            for (double l : grid.halfwidth)
                if (!(l > 0.0)) throw config_error("grid.halfwidth: entries must be positive");
        }
        if (g.contains("center")) {
            grid.center = detail::cfg_number_array(g["center"], "grid.center");
            if (static_cast<int>(grid.center.size()) != n)
                throw config_error("grid.center: expected one entry per asset");
        }
    }

    McSettings mc;
    if (root.contains("mc")) {
        const njson& m = root["mc"];
        if (!m.is_object()) throw config_error("mc: expected an object");
        detail::cfg_known_keys(m, {"paths", "seed", "antithetic"}, "mc");
        if (m.contains("paths")) {
            mc.paths = detail::cfg_integer(m["paths"], "mc.paths");
            if (mc.paths <= 0) throw config_error("mc.paths: must be positive");
        }
        if (m.contains("seed")) {
            long s = detail::cfg_integer(m["seed"], "mc.seed");
            if (s < 0) throw config_error("mc.seed: must be nonnegative");
            mc.seed = static_cast<std::uint64_t>(s);
        }
        if (m.contains("antithetic"))
            mc.antithetic = detail::cfg_boolean(m["antithetic"], "mc.antithetic");
    }

    try {
        BasketModel model(std::move(xblocks), std::move(zblocks), Matrix::from_rows(rows));
        market.validate();
        payoff.validate();
        if (static_cast<int>(payoff.weights.size()) != n)
            throw domain_error("payoff.weights: expected one weight per asset");
        return EngineConfig{std::move(model), std::move(market), std::move(payoff),
                            std::move(grid),  std::move(mc),     fnv1a64_hex(text),
                            source_name};
    } catch (const domain_error& e) {
        throw config_error(source_name + ": " + e.what());
    }
}

inline EngineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

// Grid used for transform pricing and densities: explicit settings win,
// anything left open is derived from the adjusted model's cumulants.
inline FourierGrid resolve_grid(const GridSettings& gs, const BasketModel& model, double t,
                                std::optional<int> points_override = std::nullopt,
                                std::optional<double> halfwidth_override = std::nullopt) {
    int points = points_override.value_or(gs.points);
    if (points == 0) points = default_points_for_dim(model.size());
    FourierGrid g = default_grid(model, t, points);
    if (!gs.halfwidth.empty()) g.halfwidth = gs.halfwidth;
    if (halfwidth_override)
        g.halfwidth.assign(static_cast<std::size_t>(model.size()), *halfwidth_override);
    if (!gs.center.empty()) g.center = gs.center;
    g.validate();
    return g;
}

}  // namespace levymix
