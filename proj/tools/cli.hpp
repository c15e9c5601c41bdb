// SPDX-License-Identifier: Apache-2.0
#pragma once

// Scenario runners behind the iop-sim command line. Each runner reads one JSON
// run document, writes its outputs into the output directory and returns an
// exit code: 0 success, 2 configuration error, 3 model or calibration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "iop/iop.hpp"

namespace iop::cli {

namespace fs = std::filesystem;
using nlohmann::json;

enum ExitCode : int { kOk = 0, kConfigError = 2, kModelError = 3 };

struct RunConfig {
    std::string scenario;
    std::optional<fs::path> config_path;
    fs::path out_dir = ".";
    std::optional<std::uint64_t> seed;
    bool svg = false;
};

// Parsed run document plus the provenance needed for CSV headers.
struct Document {
    json root = json::object();
    fs::path base_dir = ".";
    std::string hash = hex64(fnv1a64(""));
};

inline Document read_document(const RunConfig& rc)
{
    Document d;
    if (!rc.config_path)
        return d;
    std::ifstream in(*rc.config_path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config '" + rc.config_path->string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    d.hash = hex64(fnv1a64(text));
    d.base_dir = rc.config_path->parent_path();
    try {
        d.root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!d.root.is_object())
        throw ConfigError("config: top level must be an object");
    if (d.root.contains("scenario") && d.root["scenario"].get<std::string>() != rc.scenario)
        throw ConfigError("config scenario '" + d.root["scenario"].get<std::string>() + "' does not match command '" +
                          rc.scenario + "'");
    return d;
}

template <class T>
T get_or(const json& j, const char* key, T fallback)
{
    if (!j.contains(key))
        return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

// Either [v0, v1, ...] or {"start": a, "stop": b, "count": n} (inclusive, linear).
inline std::vector<double> read_range(const json& j, const char* key, std::vector<double> fallback)
{
    if (!j.contains(key)) {
        if (fallback.empty())
            throw ConfigError(std::string("config key '") + key + "' is required");
        return fallback;
    }
    const auto& r = j.at(key);
    std::vector<double> out;
    try {
        if (r.is_array()) {
            out = r.get<std::vector<double>>();
        } else if (r.is_number()) {
            out = {r.get<double>()};
        } else if (r.is_object()) {
            const double a = r.at("start").get<double>();
            const double b = r.at("stop").get<double>();
            const auto n = r.at("count").get<long long>();
            if (n < 0)
                throw ConfigError(std::string("config key '") + key + "': negative count");
            for (long long i = 0; i < n; ++i)
                out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
        } else {
            throw ConfigError(std::string("config key '") + key + "': expected array or range object");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
    if (out.empty())
        throw ConfigError(std::string("config key '") + key + "': empty range");
    return out;
}

inline MaterialDb read_materials(const Document& d)
{
    if (!d.root.contains("materials"))
        return preset_materials();
    fs::path p = get_or<std::string>(d.root, "materials", "");
    if (p.is_relative())
        p = d.base_dir / p;
    return load_materials(p.string());
}

inline LayerStack read_stack(const Document& d, const MaterialDb& db)
{
    return make_stack(db, get_or(d.root, "paint_thickness_m", 2e-3), get_or<std::string>(d.root, "paint", "titanium-white-paint"),
                      get_or<std::string>(d.root, "plaster", "plaster"), get_or<std::string>(d.root, "air", "air"));
}

inline PropagationOptions read_propagation(const Document& d)
{
    PropagationOptions o;
    const auto j = get_or(d.root, "propagation", json::object());
    const auto pol = get_or<std::string>(j, "polarization", "TE");
    if (pol == "TE")
        o.polarization = Polarization::TE;
    else if (pol == "TM")
        o.polarization = Polarization::TM;
    else if (pol == "average")
        o.polarization = Polarization::average;
    else
        throw ConfigError("unknown polarization '" + pol + "'");
    o.lateral_exponent = get_or(j, "lateral_exponent", o.lateral_exponent);
    o.lateral_coupling_db = get_or(j, "lateral_coupling_db", o.lateral_coupling_db);
    return o;
}

inline LinkOptions read_link(const Document& d, LinkOptions o = {})
{
    o.propagation = read_propagation(d);
    o.n_subbands = get_or<std::size_t>(d.root, "n_subbands", o.n_subbands);
    o.tx_psd_w_per_hz = get_or(d.root, "tx_psd_w_per_hz", o.tx_psd_w_per_hz);
    const auto comb = get_or<std::string>(d.root, "combine", "noncoherent");
    if (comb == "noncoherent")
        o.combine = Combining::noncoherent;
    else if (comb == "coherent")
        o.combine = Combining::coherent;
    else
        throw ConfigError("unknown combining mode '" + comb + "'");
    const auto n = get_or(d.root, "noise", json::object());
    o.noise.temperature_k = get_or(n, "temperature_k", o.noise.temperature_k);
    o.noise.noise_figure_db = get_or(n, "noise_figure_db", o.noise.noise_figure_db);
    const auto rule = get_or<std::string>(n, "path_rule", "dominant");
    if (rule == "dominant")
        o.noise.path_rule = NoisePathRule::dominant;
    else if (rule == "worst")
        o.noise.path_rule = NoisePathRule::worst;
    else
        throw ConfigError("unknown noise path rule '" + rule + "'");
    return o;
}

inline Band read_band(const Document& d)
{
    const auto b = read_range(d.root, "band_hz", {200e9, 300e9});
    if (b.size() != 2)
        throw ConfigError("band_hz must hold exactly [f_lo, f_hi]");
    return {b[0], b[1]};
}

inline std::string header_line(const Document& d, std::uint64_t seed)
{
    return std::string("# iop-sim ") + kVersion + " config_hash=fnv1a64:" + d.hash + " seed=" + std::to_string(seed);
}

inline std::uint64_t effective_seed(const RunConfig& rc, const Document& d)
{
    if (rc.seed)
        return *rc.seed;
    return get_or<std::uint64_t>(d.root, "seed", 1);
}

inline void ensure_out_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir))
        throw ConfigError("output directory '" + dir.string() + "' is not usable");
}

// ---------------------------------------------------------------------------

inline void run_pathloss_impl(const RunConfig& rc, std::ostream& log)
{
    const auto d = read_document(rc);
    const auto db = read_materials(d);
    const auto stack = read_stack(d, db);
    const auto prop = read_propagation(d);
    const double f = get_or(d.root, "frequency_hz", 200e9);
    const auto depths = read_range(d.root, "depths_m", {});
    const auto rhos = read_range(d.root, "rho_d_m", {0.02, 0.04});
    ensure_out_dir(rc.out_dir);

    CsvWriter csv(header_line(d, effective_seed(rc, d)),
                  {"burial_depth_m", "rho_D_m", "f_hz", "path_kind", "spreading_db", "absorption_db",
                   "reflection_db", "roughness_db", "total_db", "coupling_db"});
    std::vector<Series> series;
    for (double rho : rhos)
        for (auto k : kAllPathKinds)
            series.push_back({std::string(to_string(k)) + " rho=" + fmt_num(rho), {}});

    std::size_t rows = 0;
    for (double h : depths) {
        for (std::size_t ri = 0; ri < rhos.size(); ++ri) {
            const auto losses = path_losses({h, h, rhos[ri]}, stack, f, prop);
            for (std::size_t k = 0; k < losses.size(); ++k) {
                if (!losses[k])
                    continue;
                const auto& pl = *losses[k];
                csv.row_strings({fmt_num(h), fmt_num(rhos[ri]), fmt_num(f), std::string(to_string(pl.kind)),
                                 fmt_num(pl.spreading_db), fmt_num(pl.absorption_db), fmt_num(pl.reflection_db),
                                 fmt_num(pl.roughness_db), fmt_num(pl.total_db), fmt_num(pl.coupling_db)});
                series[ri * kAllPathKinds.size() + k].points.emplace_back(h, pl.total_db);
                ++rows;
            }
        }
    }
    write_atomically(rc.out_dir / "pathloss.csv", csv.str());
    if (rc.svg)
        write_atomically(rc.out_dir / "pathloss.svg",
                         svg_plot("Path loss vs burial depth", "burial depth (m)", "path loss (dB)", series));
    log << "pathloss: " << rows << " rows -> " << (rc.out_dir / "pathloss.csv").string() << "\n";
}

inline void run_capacity_impl(const RunConfig& rc, std::ostream& log)
{
    const auto d = read_document(rc);
    const auto db = read_materials(d);
    const auto stack = read_stack(d, db);
    const auto link = read_link(d);
    const auto band = read_band(d);
    const auto depths = read_range(d.root, "depths_m", {0.05e-3, 0.1e-3, 1.95e-3});
    const auto rhos = read_range(d.root, "rho_d_m", {0.01, 0.015, 0.02, 0.025, 0.03, 0.035, 0.04});
    const bool include_air = get_or(d.root, "include_air", true);
    ensure_out_dir(rc.out_dir);

    CsvWriter csv(header_line(d, effective_seed(rc, d)), {"rho_D_m", "depth_m", "medium", "capacity_bps"});
    std::vector<Series> series;
    for (double h : depths)
        series.push_back({"paint h=" + fmt_num(h), {}});
    series.push_back({"air", {}});

    std::size_t rows = 0;
    for (double rho : rhos) {
        for (std::size_t i = 0; i < depths.size(); ++i) {
            const double c = link_capacity({depths[i], depths[i], rho}, stack, band, link).total_capacity_bps;
            csv.row_strings({fmt_num(rho), fmt_num(depths[i]), "paint-multipath", fmt_num(c)});
            series[i].points.emplace_back(rho, c);
            ++rows;
        }
        if (include_air) {
            const double c = air_capacity(rho, band, link).total_capacity_bps;
            csv.row_strings({fmt_num(rho), "", "air", fmt_num(c)});
            series.back().points.emplace_back(rho, c);
            ++rows;
        }
    }
    if (!include_air)
        series.pop_back();
    write_atomically(rc.out_dir / "capacity.csv", csv.str());
    if (rc.svg)
        write_atomically(rc.out_dir / "capacity.svg",
                         svg_plot("Channel capacity, paint vs air", "rho_D (m)", "capacity (bit/s)", series, true));
    log << "capacity: " << rows << " rows -> " << (rc.out_dir / "capacity.csv").string() << "\n";
}

inline DeltaTargets read_targets(const Document& d)
{
    DeltaTargets t;
    const auto j = get_or(d.root, "targets", json::object());
    t.dw_db = get_or(j, "dw_db", t.dw_db);
    t.rw_a_db = get_or(j, "rw_a_db", t.rw_a_db);
    t.rw_p_db = get_or(j, "rw_p_db", t.rw_p_db);
    t.lw_a_db = get_or(j, "lw_a_db", t.lw_a_db);
    t.lw_p_db = get_or(j, "lw_p_db", t.lw_p_db);
    t.frequency_hz = get_or(j, "frequency_hz", t.frequency_hz);
    t.paint_thickness_m = get_or(j, "paint_thickness_m", t.paint_thickness_m);
    t.depth_m = get_or(j, "depth_m", t.depth_m);
    t.rho_near_m = get_or(j, "rho_near_m", t.rho_near_m);
    t.rho_far_m = get_or(j, "rho_far_m", t.rho_far_m);
    return t;
}

inline void run_calibrate_impl(const RunConfig& rc, std::ostream& log)
{
    const auto d = read_document(rc);
    const auto db = read_materials(d);
    const auto t = read_targets(d);
    auto stack = read_stack(d, db);
    const auto link = read_link(d);
    const auto fit = calibrate_absorption(t, stack, link.propagation);

    const auto calibrated = apply_absorption_fit(db, fit, stack.paint.name, stack.plaster.name);
    auto fitted_stack = make_stack(calibrated, t.paint_thickness_m, stack.paint.name, stack.plaster.name,
                                   stack.air.name);
    const double coupling = calibrate_lateral_coupling({}, fitted_stack, link);
    ensure_out_dir(rc.out_dir);

    // Overlay holds only the fitted entries.
    MaterialDb overlay;
    overlay.put(calibrated.at(stack.paint.name), Provenance::calibrated);
    overlay.put(calibrated.at(stack.plaster.name), Provenance::calibrated);
    write_atomically(rc.out_dir / "materials_calibrated.json", serialize_materials(overlay));

    std::ostringstream r;
    r << header_line(d, effective_seed(rc, d)) << "\n";
    r << "alpha_paint_per_m=" << fmt_num(fit.alpha_paint) << "\n";
    r << "alpha_plaster_per_m=" << fmt_num(fit.alpha_plaster) << "\n";
    r << "residual_rw_a_db=" << fmt_num(fit.residual_rw_a_db) << "\n";
    r << "residual_rw_p_db=" << fmt_num(fit.residual_rw_p_db) << "\n";
    r << "residual_lw_a_db=" << fmt_num(fit.residual_lw_a_db) << "\n";
    r << "lateral_coupling_db=" << fmt_num(coupling) << "\n";
    write_atomically(rc.out_dir / "calibration.txt", r.str());
    log << r.str();
}

inline NetworkConfig read_network(const Document& d, const RunConfig& rc, const MaterialDb& db)
{
    NetworkConfig c = default_network_config(db);
    c.stack = read_stack(d, db);
    c.link = read_link(d, c.link);
    c.band = read_band(d);
    const auto j = get_or(d.root, "netsim", json::object());
    c.wall_width_m = get_or(j, "wall_width_m", c.wall_width_m);
    c.wall_height_m = get_or(j, "wall_height_m", c.wall_height_m);
    c.density_per_m2 = get_or(j, "density_per_m2", c.density_per_m2);
    c.trials = get_or<std::size_t>(j, "trials", c.trials);
    c.max_range_m = get_or(j, "max_range_m", c.max_range_m);
    c.threads = get_or<unsigned>(j, "threads", c.threads);
    c.seed = effective_seed(rc, d);
    if (j.contains("cone")) {
        const auto& cone = j["cone"];
        c.orientation = Cone{get_or(cone, "beamwidth_rad", phys::pi / 3), get_or(cone, "boresight_gain_dbi", 6.0)};
    }
    if (j.contains("min_capacity_bps"))
        c.link_rule = MinCapacity{get_or(j, "min_capacity_bps", 0.0)};
    else
        c.link_rule = SnrThreshold{get_or(j, "snr_threshold_db", 0.0)};
    validate(c);
    return c;
}

inline void run_netsim_impl(const RunConfig& rc, std::ostream& log)
{
    const auto d = read_document(rc);
    const auto db = read_materials(d);
    const auto cfg = read_network(d, rc, db);
    ensure_out_dir(rc.out_dir);

    const auto cut = verify_cutoff(cfg);
    if (!cut.ok)
        throw ConfigError("max_range_m too short: best-case link at the cutoff is " + fmt_num(cut.best_case_db) +
                          " dB, needs < " + fmt_num(cut.limit_db) + " dB");
    const auto rep = connectivity(cfg);
    const auto head = header_line(d, cfg.seed);

    CsvWriter trials(head, {"trial", "n_devices", "n_edges", "mean_degree", "largest_component_fraction",
                            "isolated_fraction"});
    for (std::size_t t = 0; t < rep.per_trial.size(); ++t) {
        const auto& s = rep.per_trial[t];
        trials.row_strings({std::to_string(t), std::to_string(s.n_devices), std::to_string(s.n_edges),
                            fmt_num(s.mean_degree), fmt_num(s.largest_component_fraction),
                            fmt_num(s.isolated_fraction)});
    }
    CsvWriter summary(head, {"metric", "mean", "stddev"});
    summary.row_strings({"mean_degree", fmt_num(rep.mean_degree.mean), fmt_num(rep.mean_degree.stddev)});
    summary.row_strings({"largest_component_fraction", fmt_num(rep.largest_component_fraction.mean),
                         fmt_num(rep.largest_component_fraction.stddev)});
    summary.row_strings(
        {"isolated_fraction", fmt_num(rep.isolated_fraction.mean), fmt_num(rep.isolated_fraction.stddev)});
    write_atomically(rc.out_dir / "netsim_trials.csv", trials.str());
    write_atomically(rc.out_dir / "netsim_summary.csv", summary.str());
    log << "netsim: " << rep.per_trial.size() << " trials, mean degree " << fmt_num(rep.mean_degree.mean)
        << ", largest component " << fmt_num(rep.largest_component_fraction.mean) << "\n";
}

inline std::string format_absorption(const MediumSpec& m)
{
    if (const auto* a = std::get_if<double>(&m.absorption))
        return fmt_num(*a);
    const auto& s = std::get<std::vector<AbsorptionSample>>(m.absorption);
    return std::to_string(s.size()) + " samples";
}

inline void run_materials_list_impl(const RunConfig& rc, std::ostream& out)
{
    const auto d = read_document(rc);
    const auto db = read_materials(d);
    CsvWriter csv("# iop-sim " + std::string(kVersion) + " materials", {"name", "refractive_index", "alpha_per_m",
                                                                       "roughness_rms_m", "provenance", "note"});
    for (const auto& [name, e] : db.entries())
        csv.row_strings({name, fmt_num(e.spec.refractive_index), format_absorption(e.spec),
                         fmt_num(e.spec.roughness_rms_m), std::string(to_string(e.provenance)), e.note});
    out << csv.str();
}

inline void run_materials_validate_impl(const fs::path& file, std::ostream& out)
{
    const auto db = load_materials(file.string());
    std::size_t from_file = 0;
    for (const auto& [name, e] : db.entries())
        from_file += e.provenance == Provenance::file;
    out << "ok: " << from_file << " entries from " << file.string() << ", " << db.size() << " total\n";
}

// Maps exceptions onto exit codes.
template <class F>
int guarded(F&& f, std::ostream& err)
{
    try {
        f();
        return kOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const ModelError& e) {
        err << "model error: " << e.what() << "\n";
        return kModelError;
    } catch (const fs::filesystem_error& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    }
}

inline int run_pathloss(const RunConfig& rc, std::ostream& log = std::cout, std::ostream& err = std::cerr)
{
    return guarded([&] { run_pathloss_impl(rc, log); }, err);
}
inline int run_capacity(const RunConfig& rc, std::ostream& log = std::cout, std::ostream& err = std::cerr)
{
    return guarded([&] { run_capacity_impl(rc, log); }, err);
}
inline int run_calibrate(const RunConfig& rc, std::ostream& log = std::cout, std::ostream& err = std::cerr)
{
    return guarded([&] { run_calibrate_impl(rc, log); }, err);
}
inline int run_netsim(const RunConfig& rc, std::ostream& log = std::cout, std::ostream& err = std::cerr)
{
    return guarded([&] { run_netsim_impl(rc, log); }, err);
}
inline int run_materials_list(const RunConfig& rc, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    return guarded([&] { run_materials_list_impl(rc, out); }, err);
}
inline int run_materials_validate(const fs::path& file, std::ostream& out = std::cout,
                                  std::ostream& err = std::cerr)
{
    return guarded([&] { run_materials_validate_impl(file, out); }, err);
}

} // namespace iop::cli
