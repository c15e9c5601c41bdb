// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"

int main(int argc, char** argv)
{
    using namespace iop::cli;
    CLI::App app{"iop-sim: terahertz in-paint channel and network simulator"};
    app.set_version_flag("--version", std::string(iop::kVersion));
    app.require_subcommand(1);

    RunConfig rc;
    std::string config, out = ".";
    std::uint64_t seed = 0;
    bool svg = false;

    auto add_common = [&](CLI::App* sub, bool with_seed) {
        sub->add_option("--config", config, "JSON run document")->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory");
        sub->add_flag("--svg", svg, "also write an SVG plot");
        if (with_seed)
            sub->add_option("--seed", seed, "override the seed in the run document");
    };

    auto* materials = app.add_subcommand("materials", "inspect or validate material catalogs");
    materials->require_subcommand(1);
    auto* mlist = materials->add_subcommand("list", "print the effective catalog as CSV");
    mlist->add_option("--config", config, "JSON run document (for a materials overlay)")->check(CLI::ExistingFile);
    std::string mfile;
    auto* mvalidate = materials->add_subcommand("validate", "check a materials file");
    mvalidate->add_option("file", mfile, "materials JSON")->required();

    auto* calibrate = app.add_subcommand("calibrate", "fit absorption and lateral coupling to reference deltas");
    add_common(calibrate, false);
    auto* pathloss = app.add_subcommand("pathloss", "per-path loss vs burial depth");
    add_common(pathloss, false);
    auto* capacity = app.add_subcommand("capacity", "band capacity vs separation, paint and air");
    add_common(capacity, false);
    auto* netsim = app.add_subcommand("netsim", "Monte Carlo connectivity of a random in-paint network");
    add_common(netsim, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    if (!config.empty())
        rc.config_path = config;
    rc.out_dir = out;
    rc.svg = svg;
    if (netsim->count("--seed"))
        rc.seed = seed;

    if (*mvalidate)
        return run_materials_validate(mfile);
    if (*mlist) {
        rc.scenario = "materials";
        return run_materials_list(rc);
    }
    if (*calibrate) {
        rc.scenario = "calibrate";
        return run_calibrate(rc);
    }
    if (*pathloss) {
        rc.scenario = "pathloss";
        return run_pathloss(rc);
    }
    if (*capacity) {
        rc.scenario = "capacity";
        return run_capacity(rc);
    }
    rc.scenario = "netsim";
    return run_netsim(rc);
}
