// SPDX-License-Identifier: Apache-2.0
#pragma once

// Sub-band aggregated Shannon capacity for paint links and the air baseline.

#include <cmath>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "iop/core.hpp"
#include "iop/materials.hpp"
#include "iop/noise.hpp"
#include "iop/propagation.hpp"

namespace iop {

struct Band {
    double f_lo_hz = 200e9;
    double f_hi_hz = 300e9;

    double width() const { return f_hi_hz - f_lo_hz; }
};

inline constexpr double kDefaultTxPsd = 1e-14; // 1 mW spread over 100 GHz

struct LinkOptions {
    std::size_t n_subbands = 256;
    double tx_psd_w_per_hz = kDefaultTxPsd;
    Combining combine = Combining::noncoherent;
    PropagationOptions propagation{};
    NoiseOptions noise{};
    double antenna_gain_db = 0.0; // sum of both ends
};

struct Subband {
    double center_hz;
    double gain;  // channel power gain, antenna gains included
    double noise_psd;
    double snr;
    double capacity_bps;
};

struct LinkBudget {
    Band band;
    std::size_t n_subbands = 0;
    double tx_psd_w_per_hz = 0.0;
    std::vector<Subband> per_subband;
    double total_capacity_bps = 0.0;

    // 10*log10(total received power / total noise power) over the band.
    double band_snr_db() const
    {
        double sig = 0.0, noise = 0.0;
        for (const auto& s : per_subband) {
            sig += s.snr * s.noise_psd;
            noise += s.noise_psd;
        }
        return 10.0 * std::log10(sig / noise);
    }
};

inline std::vector<double> subband_centers(const Band& band, std::size_t n)
{
    if (!(band.f_lo_hz > 0.0 && band.f_hi_hz > band.f_lo_hz))
        throw DomainError("band must satisfy 0 < f_lo < f_hi");
    if (n < 1)
        throw DomainError("need at least one sub-band");
    const double df = band.width() / static_cast<double>(n);
    std::vector<double> centers(n);
    for (std::size_t i = 0; i < n; ++i)
        centers[i] = band.f_lo_hz + (static_cast<double>(i) + 0.5) * df;
    return centers;
}

// Aggregates df*log2(1 + SNR_i) over sub-bands given per-center gain and noise.
inline LinkBudget aggregate_capacity(const Band& band, const LinkOptions& opt, std::span<const double> centers,
                                     std::span<const double> gain, std::span<const double> noise_psd)
{
    if (!(opt.tx_psd_w_per_hz > 0.0))
        throw DomainError("transmit PSD must be > 0");
    LinkBudget lb{band, centers.size(), opt.tx_psd_w_per_hz, {}, 0.0};
    const double df = band.width() / static_cast<double>(centers.size());
    const double antenna = std::pow(10.0, opt.antenna_gain_db / 10.0);
    lb.per_subband.reserve(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double g = gain[i] * antenna;
        const double snr = opt.tx_psd_w_per_hz * g / noise_psd[i];
        const double c = df * std::log2(1.0 + snr);
        lb.per_subband.push_back({centers[i], g, noise_psd[i], snr, c});
        lb.total_capacity_bps += c;
    }
    return lb;
}

inline LinkBudget link_capacity(const Placement& p, const LayerStack& s, const Band& band,
                                const LinkOptions& opt = {})
{
    const auto centers = subband_centers(band, opt.n_subbands);
    const auto response = channel_response(p, s, centers, opt.propagation, opt.combine);
    const auto noise = total_noise_psd(centers, p, s, opt.propagation, opt.noise);
    return aggregate_capacity(band, opt, centers, response.total_gain, noise.psd);
}

// Free-space line of sight through standard air.
inline LinkBudget air_capacity(double distance_m, const Band& band, const LinkOptions& opt = {})
{
    if (!(distance_m > 0.0))
        throw DomainError("distance must be > 0");
    const auto centers = subband_centers(band, opt.n_subbands);
    std::vector<double> gain, noise;
    const double thermal = thermal_noise_psd(opt.noise);
    for (double f : centers) {
        const double absorption = absorption_loss(distance_m, atmospheric_alpha(f));
        gain.push_back(db_to_linear(std::max(0.0, spreading_loss(distance_m, f, 1.0)) + absorption));
        const double tau = detail::clamp_transmissivity(std::pow(10.0, -absorption / 10.0));
        noise.push_back(thermal + molecular_noise_psd(tau, opt.noise.temperature_k));
    }
    return aggregate_capacity(band, opt, centers, gain, noise);
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxis { rho_d, depth, thickness, n_paint };

inline std::string_view to_string(SweepAxis a)
{
    switch (a) {
    case SweepAxis::rho_d: return "rho_D";
    case SweepAxis::depth: return "depth";
    case SweepAxis::thickness: return "thickness";
    case SweepAxis::n_paint: return "n_paint";
    }
    return "?";
}

// Equal burial depths for both ends.
struct SweepConfig {
    LayerStack stack;
    double depth_m = 1e-3;
    double rho_d_m = 2e-2;
    Band band{};
    LinkOptions link{};
};

inline SweepConfig default_sweep_config(const MaterialDb& db = preset_materials())
{
    return SweepConfig{make_stack(db, 2e-3)};
}

struct SweepRow {
    double axis_value;
    Placement placement;
    double paint_thickness_m;
    double n_paint;
    double total_capacity_bps;
    double band_snr_db;
};

inline SweepConfig apply_axis(SweepConfig cfg, SweepAxis axis, double v)
{
    switch (axis) {
    case SweepAxis::rho_d: cfg.rho_d_m = v; break;
    case SweepAxis::depth: cfg.depth_m = v; break;
    case SweepAxis::thickness: cfg.stack.paint_thickness_m = v; break;
    case SweepAxis::n_paint: cfg.stack.paint.refractive_index = v; break;
    }
    return cfg;
}

inline std::vector<SweepRow> capacity_sweep(SweepAxis axis, std::span<const double> values,
                                            const SweepConfig& fixed)
{
    if (values.empty())
        throw ConfigError("sweep range is empty");
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (double v : values) {
        const auto cfg = apply_axis(fixed, axis, v);
        validate(cfg.stack);
        const Placement p{cfg.depth_m, cfg.depth_m, cfg.rho_d_m};
        const auto lb = link_capacity(p, cfg.stack, cfg.band, cfg.link);
        rows.push_back({v, p, cfg.stack.paint_thickness_m, cfg.stack.paint.refractive_index,
                        lb.total_capacity_bps, lb.band_snr_db()});
    }
    return rows;
}

} // namespace iop
