// SPDX-License-Identifier: Apache-2.0
#pragma once

// Receiver noise PSD: thermal floor plus absorption-induced (emissivity) noise.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "iop/core.hpp"
#include "iop/propagation.hpp"

namespace iop {

enum class NoisePathRule {
    dominant, // transmissivity of the lowest-loss path
    worst,    // transmissivity of the most absorbing feasible path
};

struct NoiseOptions {
    double temperature_k = 290.0;
    double noise_figure_db = 0.0; // stands in for device and appliance noise
    NoisePathRule path_rule = NoisePathRule::dominant;
};

struct NoisePsd {
    std::vector<double> frequencies;
    std::vector<double> psd; // W/Hz
    std::vector<double> thermal;
    std::vector<double> molecular;
};

inline double thermal_noise_psd(const NoiseOptions& opt)
{
    if (!(opt.temperature_k > 0.0))
        throw DomainError("noise temperature must be > 0");
    return phys::k_B * opt.temperature_k * std::pow(10.0, opt.noise_figure_db / 10.0);
}

// Emission of an absorbing path at temperature T0: k_B * T0 * (1 - transmissivity).
inline double molecular_noise_psd(double transmissivity, double temperature_k)
{
    if (!(transmissivity > 0.0 && transmissivity <= 1.0))
        throw DomainError("transmissivity must lie in (0, 1]");
    if (!(temperature_k > 0.0))
        throw DomainError("noise temperature must be > 0");
    return phys::k_B * temperature_k * (1.0 - transmissivity);
}

// Absorption-only power ratio; spreading excluded.
inline double absorption_transmissivity(const PathLoss& pl)
{
    return std::pow(10.0, -pl.absorption_db / 10.0);
}

namespace detail {

inline double noise_transmissivity(const PathLossSet& losses, NoisePathRule rule)
{
    if (rule == NoisePathRule::dominant) {
        const auto k = dominant_path(losses);
        return absorption_transmissivity(*losses[static_cast<std::size_t>(k)]);
    }
    double worst = 1.0;
    for (const auto& pl : losses)
        if (pl)
            worst = std::min(worst, absorption_transmissivity(*pl));
    return worst;
}

// Transmissivities below the smallest normal double clamp to it; the emission
// term is then k_B*T0 to machine precision.
inline double clamp_transmissivity(double tau)
{
    return std::max(tau, std::numeric_limits<double>::min());
}

} // namespace detail

inline NoisePsd total_noise_psd(std::span<const double> grid, const Placement& p, const LayerStack& s,
                                const PropagationOptions& prop = {}, const NoiseOptions& opt = {})
{
    NoisePsd n;
    n.frequencies.assign(grid.begin(), grid.end());
    const double thermal = thermal_noise_psd(opt);
    for (double f : grid) {
        const double tau = detail::noise_transmissivity(path_losses(p, s, f, prop), opt.path_rule);
        const double mol = molecular_noise_psd(detail::clamp_transmissivity(tau), opt.temperature_k);
        n.thermal.push_back(thermal);
        n.molecular.push_back(mol);
        n.psd.push_back(thermal + mol);
    }
    return n;
}

} // namespace iop
