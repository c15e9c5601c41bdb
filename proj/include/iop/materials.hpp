// SPDX-License-Identifier: Apache-2.0
#pragma once

// Electromagnetic material descriptions for the air / paint / plaster stack
// and the polymer catalog, plus conversions from tabulated dielectric data.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "iop/core.hpp"

namespace iop {

struct AbsorptionSample {
    double frequency_hz;
    double alpha_per_m;

    friend bool operator==(const AbsorptionSample&, const AbsorptionSample&) = default;
};

// Power absorption coefficient, either frequency independent or sampled.
using AbsorptionProfile = std::variant<double, std::vector<AbsorptionSample>>;

struct MediumSpec {
    std::string name;
    double refractive_index = 1.0;
    AbsorptionProfile absorption = 0.0;
    double roughness_rms_m = 0.0;

    friend bool operator==(const MediumSpec&, const MediumSpec&) = default;
};

inline void validate(const MediumSpec& m)
{
    auto fail = [&](const std::string& what) { throw DomainError("material '" + m.name + "': " + what); };
    if (m.name.empty())
        throw DomainError("material with empty name");
    if (!(m.refractive_index >= 1.0))
        fail("refractive_index must be >= 1");
    if (!(m.roughness_rms_m >= 0.0))
        fail("roughness_rms_m must be >= 0");
    if (const auto* a = std::get_if<double>(&m.absorption)) {
        if (!(*a >= 0.0) || !std::isfinite(*a))
            fail("absorption must be finite and >= 0");
        return;
    }
    const auto& samples = std::get<std::vector<AbsorptionSample>>(m.absorption);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i].frequency_hz > 0.0))
            fail("sample frequency must be > 0");
        if (!(samples[i].alpha_per_m >= 0.0) || !std::isfinite(samples[i].alpha_per_m))
            fail("sample alpha must be finite and >= 0");
        if (i > 0 && !(samples[i].frequency_hz > samples[i - 1].frequency_hz))
            fail("sample frequencies must be strictly increasing");
    }
}

inline double refractive_from_permittivity(double eps_r)
{
    if (!(eps_r >= 1.0))
        throw DomainError("relative permittivity must be >= 1");
    return std::sqrt(eps_r);
}

// Low-loss plane-wave power absorption: alpha = 2*pi*f*sqrt(eps_r)*tan_delta / c.
inline double absorption_from_loss_tangent(double f_hz, double eps_r, double tan_delta)
{
    if (!(f_hz > 0.0))
        throw DomainError("frequency must be > 0");
    if (!(eps_r >= 1.0))
        throw DomainError("relative permittivity must be >= 1");
    if (!(tan_delta >= 0.0))
        throw DomainError("loss tangent must be >= 0");
    return 2.0 * phys::pi * f_hz * std::sqrt(eps_r) * tan_delta / phys::c;
}

struct AlphaLookup {
    double alpha_per_m;
    bool extrapolated; // query fell outside the sampled range; end value held
};

namespace detail {

// Linear in (log f, alpha). Ends are held constant.
inline AlphaLookup interpolate_log_f(std::span<const AbsorptionSample> samples, double f_hz)
{
    if (samples.empty())
        throw ConfigError("empty absorption profile");
    if (!(f_hz > 0.0))
        throw DomainError("frequency must be > 0");
    if (f_hz < samples.front().frequency_hz)
        return {samples.front().alpha_per_m, true};
    if (f_hz > samples.back().frequency_hz)
        return {samples.back().alpha_per_m, true};
    auto hi = std::lower_bound(samples.begin(), samples.end(), f_hz,
                               [](const AbsorptionSample& s, double f) { return s.frequency_hz < f; });
    if (hi->frequency_hz == f_hz)
        return {hi->alpha_per_m, false};
    auto lo = hi - 1;
    const double t = std::log(f_hz / lo->frequency_hz) / std::log(hi->frequency_hz / lo->frequency_hz);
    return {lo->alpha_per_m + t * (hi->alpha_per_m - lo->alpha_per_m), false};
}

// Standard mid-latitude atmosphere (7.5 g/m^3 water vapour), specific attenuation
// in dB/km at 100 GHz steps. Values sit in the windows between the strong water
// lines, read off ITU-R P.676 curves; a coarse table, not a line-by-line model.
inline constexpr std::array<std::pair<double, double>, 10> kAtmosphereDbPerKm{{
    {100e9, 0.42},
    {200e9, 3.2},
    {300e9, 6.8},
    {400e9, 52.0},
    {500e9, 75.0},
    {600e9, 150.0},
    {700e9, 210.0},
    {800e9, 380.0},
    {900e9, 420.0},
    {1000e9, 1200.0},
}};

inline std::vector<AbsorptionSample> atmosphere_samples()
{
    std::vector<AbsorptionSample> out;
    out.reserve(kAtmosphereDbPerKm.size());
    for (auto [f, db_km] : kAtmosphereDbPerKm)
        out.push_back({f, db_km / 1000.0 / phys::db_per_neper_power});
    return out;
}

} // namespace detail

inline AlphaLookup alpha_at(const MediumSpec& medium, double f_hz)
{
    if (const auto* a = std::get_if<double>(&medium.absorption))
        return {*a, false};
    return detail::interpolate_log_f(std::get<std::vector<AbsorptionSample>>(medium.absorption), f_hz);
}

// Molecular absorption coefficient of standard air, 0.1 THz to 1 THz.
inline double atmospheric_alpha(double f_hz)
{
    if (!(f_hz >= 100e9 && f_hz <= 1000e9))
        throw DomainError("atmospheric absorption table covers 0.1-1 THz only");
    static const std::vector<AbsorptionSample> table = detail::atmosphere_samples();
    return detail::interpolate_log_f(table, f_hz).alpha_per_m;
}

// ---------------------------------------------------------------------------
// Catalog

enum class Provenance { preset, file, calibrated };

inline std::string_view to_string(Provenance p)
{
    switch (p) {
    case Provenance::preset: return "preset";
    case Provenance::file: return "file";
    case Provenance::calibrated: return "calibrated";
    }
    return "?";
}

namespace presets {
// Paint and plaster absorption at 200 GHz, fitted so that the layered-path model
// reproduces the published direct-wave and paint/plaster lateral-wave distance
// deltas (see calibration.hpp). Held flat over 200-300 GHz.
inline constexpr double kPaintAlpha = 321.2014;
inline constexpr double kPlasterAlpha = 212.7651;
inline constexpr double kPaintIndex = 2.13;
inline constexpr double kPlasterIndex = 1.73;
} // namespace presets

class MaterialDb {
public:
    struct Entry {
        MediumSpec spec;
        Provenance provenance = Provenance::preset;
        std::string note;
    };

    const MediumSpec& at(const std::string& name) const { return entry(name).spec; }

    const Entry& entry(const std::string& name) const
    {
        auto it = entries_.find(name);
        if (it == entries_.end())
            throw ConfigError("unknown material '" + name + "'");
        return it->second;
    }

    bool contains(const std::string& name) const { return entries_.contains(name); }

    // Inserts or replaces.
    void put(MediumSpec spec, Provenance provenance, std::string note = {})
    {
        validate(spec);
        auto name = spec.name;
        entries_.insert_or_assign(std::move(name), Entry{std::move(spec), provenance, std::move(note)});
    }

    const std::map<std::string, Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, Entry> entries_;
};

inline MaterialDb preset_materials()
{
    MaterialDb db;
    db.put({"air", 1.0, detail::atmosphere_samples(), 0.0}, Provenance::preset,
           "molecular absorption of standard air");
    db.put({"titanium-white-paint", presets::kPaintIndex, presets::kPaintAlpha, 0.0}, Provenance::preset,
           "alpha calibrated at 200 GHz, flat over 200-300 GHz");
    db.put({"plaster", presets::kPlasterIndex, presets::kPlasterAlpha, 0.0}, Provenance::preset,
           "alpha calibrated at 200 GHz, flat over 200-300 GHz");

    // Polymer substrates, 0.2-2.5 THz. Index from sqrt(eps_r) unless tabulated.
    db.put({"PET", refractive_from_permittivity(2.86), 25.0e2, 0.0}, Provenance::preset,
           "eps_r 2.86, tan_delta 0.053-0.072");
    db.put({"PEN", refractive_from_permittivity(2.56), 1.0e2, 0.0}, Provenance::preset,
           "eps_r 2.56, tan_delta 0.003");
    db.put({"PMMA", 1.49, 22.0e2, 0.0}, Provenance::preset, "eps_r 2.22, tan_delta 0.042-0.07");
    db.put({"polypropylene", refractive_from_permittivity(3.0), 2.0e2, 0.0}, Provenance::preset,
           "eps_r 3, tan_delta 0.12 (tabulated tan_delta inconsistent with tabulated alpha)");
    db.put({"PTFE", 1.42, 1.6e2, 0.0}, Provenance::preset,
           "tabulated n 1.42 disagrees with sqrt(eps_r 2.39) = 1.546; tabulated n kept");
    return db;
}

// ---------------------------------------------------------------------------
// Material file: {"version": "iop-materials/1", "materials": [ ... ]}
// A bare top-level array is also accepted. Each entry:
//   {"name": str, "refractive_index": num, "roughness_rms_m": num,
//    "absorption": {"constant_per_m": num} | {"samples": [[f_hz, alpha_per_m], ...]}}

inline constexpr std::string_view kMaterialsVersion = "iop-materials/1";

namespace detail {

inline MediumSpec medium_from_json(const nlohmann::json& j, std::size_t index)
{
    const std::string where = "materials[" + std::to_string(index) + "]";
    if (!j.is_object())
        throw LoadError(where + ": entry must be an object");
    MediumSpec m;
    try {
        m.name = j.at("name").get<std::string>();
        m.refractive_index = j.at("refractive_index").get<double>();
        m.roughness_rms_m = j.value("roughness_rms_m", 0.0);
        const auto& abs = j.at("absorption");
        if (abs.contains("constant_per_m") == abs.contains("samples"))
            throw LoadError(where + " ('" + m.name + "'): absorption needs exactly one of constant_per_m, samples");
        if (abs.contains("constant_per_m")) {
            m.absorption = abs.at("constant_per_m").get<double>();
        } else {
            std::vector<AbsorptionSample> samples;
            for (const auto& s : abs.at("samples")) {
                if (!s.is_array() || s.size() != 2)
                    throw LoadError(where + " ('" + m.name + "'): samples must be [f_hz, alpha_per_m] pairs");
                samples.push_back({s[0].get<double>(), s[1].get<double>()});
            }
            if (samples.empty())
                throw LoadError(where + " ('" + m.name + "'): empty samples list");
            m.absorption = std::move(samples);
        }
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(where + (m.name.empty() ? "" : " ('" + m.name + "')") + ": " + e.what());
    }
    try {
        validate(m);
    } catch (const DomainError& e) {
        throw LoadError(where + ": " + e.what());
    }
    return m;
}

inline nlohmann::json medium_to_json(const MediumSpec& m)
{
    nlohmann::json abs;
    if (const auto* a = std::get_if<double>(&m.absorption)) {
        abs["constant_per_m"] = *a;
    } else {
        auto arr = nlohmann::json::array();
        for (const auto& s : std::get<std::vector<AbsorptionSample>>(m.absorption))
            arr.push_back({s.frequency_hz, s.alpha_per_m});
        abs["samples"] = std::move(arr);
    }
    return {{"name", m.name},
            {"refractive_index", m.refractive_index},
            {"roughness_rms_m", m.roughness_rms_m},
            {"absorption", std::move(abs)}};
}

} // namespace detail

// Merges file entries over `base`. Duplicate names inside one document are an error.
inline MaterialDb parse_materials(std::string_view text, MaterialDb base = preset_materials(),
                                  Provenance provenance = Provenance::file)
{
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos)
        return base;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw LoadError(std::string("materials file: ") + e.what());
    }
    const nlohmann::json* list = &doc;
    if (doc.is_object()) {
        const auto version = doc.value("version", std::string{});
        if (version != kMaterialsVersion)
            throw LoadError("materials file: unsupported version '" + version + "', expected '" +
                            std::string(kMaterialsVersion) + "'");
        if (!doc.contains("materials"))
            throw LoadError("materials file: missing 'materials' array");
        list = &doc["materials"];
    }
    if (!list->is_array())
        throw LoadError("materials file: expected an array of materials");

    std::vector<MediumSpec> parsed;
    for (std::size_t i = 0; i < list->size(); ++i) {
        auto m = detail::medium_from_json((*list)[i], i);
        for (const auto& prev : parsed)
            if (prev.name == m.name)
                throw LoadError("materials file: duplicate entry '" + m.name + "'");
        parsed.push_back(std::move(m));
    }
    for (auto& m : parsed)
        base.put(std::move(m), provenance);
    return base;
}

inline MaterialDb load_materials(const std::string& path, MaterialDb base = preset_materials())
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw LoadError("cannot open materials file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_materials(ss.str(), std::move(base));
}

inline std::string serialize_materials(const MaterialDb& db)
{
    nlohmann::json doc;
    doc["version"] = kMaterialsVersion;
    auto arr = nlohmann::json::array();
    for (const auto& [name, e] : db.entries())
        arr.push_back(detail::medium_to_json(e.spec));
    doc["materials"] = std::move(arr);
    return doc.dump(2) + "\n";
}

} // namespace iop
