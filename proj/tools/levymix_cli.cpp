#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "levymix/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"levymix: European basket options under mixed tempered-stable models"};
    app.require_subcommand(1);

    levymix::cli::Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", opt.config_path, "model configuration (JSON)")
            ->required();
        sub->add_option("--threads", opt.threads, "worker thread count (0 = auto)");
        sub->add_option("--out", opt.out_path, "write the report to this file");
        sub->add_flag("--no-adjust", opt.no_adjust,
                      "skip the martingale drift adjustment (negative control)");
    };

    CLI::App* price = app.add_subcommand("price", "transform price of the basket option");
    add_common(price);
    price->add_option("--grid-n", opt.grid_points, "grid points per axis (power of two)");
    price->add_option("--grid-l", opt.grid_halfwidth, "grid halfwidth, all axes");
    price->add_option("--format", opt.format, "report format: json or csv");

    CLI::App* mc = app.add_subcommand("mc", "Monte Carlo price of the basket option");
    add_common(mc);
    mc->add_option("--paths", opt.paths, "number of Monte Carlo paths");
    mc->add_option("--seed", opt.seed, "random seed");
    mc->add_option("--format", opt.format, "report format: json or csv");

    CLI::App* density = app.add_subcommand("density", "terminal density as CSV");
    add_common(density);
    density->add_option("--grid-n", opt.grid_points, "grid points per axis (power of two)");
    density->add_option("--grid-l", opt.grid_halfwidth, "grid halfwidth, all axes");
    density->add_option("--asset", opt.asset, "emit this asset's marginal instead");

    CLI::App* validate = app.add_subcommand("validate", "run self-checks on a config");
    add_common(validate);
    validate->add_option("--paths", opt.paths, "Monte Carlo paths for the price check");
    validate->add_option("--seed", opt.seed, "random seed for the price check");
    validate->add_option("--grid-n", opt.grid_points, "grid points per axis");
    validate->add_option("--grid-l", opt.grid_halfwidth, "grid halfwidth, all axes");
    validate->add_option("--format", opt.format, "report format: text or json");

    CLI11_PARSE(app, argc, argv);

    std::string command;
    if (price->parsed()) command = "price";
    if (mc->parsed()) command = "mc";
    if (density->parsed()) command = "density";
    if (validate->parsed()) command = "validate";

    return levymix::cli::dispatch(command, opt, std::cout, std::cerr);
}
