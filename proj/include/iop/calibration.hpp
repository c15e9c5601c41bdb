// SPDX-License-Identifier: Apache-2.0
#pragma once

// Fits the free model constants to published link measurements:
//  - paint and plaster absorption from distance deltas of the direct and the
//    paint-plaster lateral wave at 200 GHz,
//  - the lateral-wave coupling loss from the near-surface vs deep capacity gap.

#include <cmath>
#include <functional>

#include "iop/capacity.hpp"
#include "iop/core.hpp"
#include "iop/geometry.hpp"
#include "iop/materials.hpp"
#include "iop/propagation.hpp"

namespace iop {

// Path-loss growth from rho_near to rho_far at equal burial depths.
struct DeltaTargets {
    double dw_db = 53.89;
    double rw_a_db = 52.82;
    double rw_p_db = 52.39;
    double lw_a_db = 12.79;
    double lw_p_db = 41.97;

    double frequency_hz = 200e9;
    double paint_thickness_m = 2e-3;
    double depth_m = 1e-3;
    double rho_near_m = 1e-2;
    double rho_far_m = 4e-2;
};

inline double target_delta(const DeltaTargets& t, PathKind k)
{
    switch (k) {
    case PathKind::DW: return t.dw_db;
    case PathKind::RW_A: return t.rw_a_db;
    case PathKind::RW_P: return t.rw_p_db;
    case PathKind::LW_A: return t.lw_a_db;
    case PathKind::LW_P: return t.lw_p_db;
    }
    return 0.0;
}

inline double path_delta(PathKind k, const LayerStack& s, const DeltaTargets& t, const PropagationOptions& opt = {})
{
    auto at = [&](double rho) {
        const Placement p{t.depth_m, t.depth_m, rho};
        validate(p, s);
        const auto g = try_path(k, p, s);
        if (!g)
            throw InfeasiblePathError(std::string(to_string(k)) + " infeasible at the calibration geometry");
        return path_loss(*g, s, t.frequency_hz, opt).total_db;
    };
    return at(t.rho_far_m) - at(t.rho_near_m);
}

struct AbsorptionFit {
    double alpha_paint;
    double alpha_plaster;
    // model delta minus published delta for the kinds that were not fitted
    double residual_rw_a_db;
    double residual_rw_p_db;
    double residual_lw_a_db;
};

namespace detail {

inline double layer_length(const PathGeometry& g, Layer l)
{
    double sum = 0.0;
    for (const auto& seg : g.segments)
        if (seg.layer == l)
            sum += seg.length_m;
    return sum;
}

// Solves delta(alpha) = target for a medium entering the delta linearly with
// slope 4.343 * (extra length in that medium at rho_far).
inline double solve_alpha(PathKind k, Layer layer, LayerStack s, const DeltaTargets& t,
                          const PropagationOptions& opt)
{
    MediumSpec& m = layer == Layer::Paint ? s.paint : s.plaster;
    m.absorption = 0.0;
    const double base = path_delta(k, s, t, opt);
    auto g_near = try_path(k, {t.depth_m, t.depth_m, t.rho_near_m}, s);
    auto g_far = try_path(k, {t.depth_m, t.depth_m, t.rho_far_m}, s);
    const double extra = layer_length(*g_far, layer) - layer_length(*g_near, layer);
    if (!(extra > 0.0))
        throw CalibrationError(std::string(to_string(k)) + ": no added path length in the fitted medium");
    const double alpha = (target_delta(t, k) - base) / (phys::db_per_neper_power * extra);
    if (!(alpha > 0.0))
        throw CalibrationError(std::string(to_string(k)) + ": spreading alone exceeds the target delta (" +
                               std::to_string(base) + " dB >= " + std::to_string(target_delta(t, k)) + " dB)");
    return alpha;
}

} // namespace detail

// `base` supplies indices and the air medium; its paint/plaster absorption is replaced.
inline AbsorptionFit calibrate_absorption(const DeltaTargets& t, LayerStack base,
                                          const PropagationOptions& opt = {})
{
    base.paint_thickness_m = t.paint_thickness_m;
    validate(base);
    AbsorptionFit fit{};
    fit.alpha_paint = detail::solve_alpha(PathKind::DW, Layer::Paint, base, t, opt);
    base.paint.absorption = fit.alpha_paint;
    fit.alpha_plaster = detail::solve_alpha(PathKind::LW_P, Layer::Plaster, base, t, opt);
    base.plaster.absorption = fit.alpha_plaster;
    fit.residual_rw_a_db = path_delta(PathKind::RW_A, base, t, opt) - t.rw_a_db;
    fit.residual_rw_p_db = path_delta(PathKind::RW_P, base, t, opt) - t.rw_p_db;
    fit.residual_lw_a_db = path_delta(PathKind::LW_A, base, t, opt) - t.lw_a_db;
    return fit;
}

inline MaterialDb apply_absorption_fit(MaterialDb db, const AbsorptionFit& fit,
                                       const std::string& paint = "titanium-white-paint",
                                       const std::string& plaster = "plaster")
{
    auto p = db.at(paint);
    p.absorption = fit.alpha_paint;
    db.put(std::move(p), Provenance::calibrated, "fitted to direct-wave distance delta");
    auto q = db.at(plaster);
    q.absorption = fit.alpha_plaster;
    db.put(std::move(q), Provenance::calibrated, "fitted to paint-plaster lateral-wave distance delta");
    return db;
}

// ---------------------------------------------------------------------------

// Near-surface minus deep capacity at the far end of the separation sweep.
struct CapacityGapTarget {
    double gap_bps = 1.9e9;
    double rho_d_m = 4e-2;
    double near_depth_m = 0.05e-3;
    double deep_depth_m = 1.95e-3;
    double paint_thickness_m = 2e-3;
    Band band{};
};

inline double capacity_gap(const CapacityGapTarget& t, const LayerStack& s, const LinkOptions& opt)
{
    const double near = link_capacity({t.near_depth_m, t.near_depth_m, t.rho_d_m}, s, t.band, opt).total_capacity_bps;
    const double deep = link_capacity({t.deep_depth_m, t.deep_depth_m, t.rho_d_m}, s, t.band, opt).total_capacity_bps;
    return near - deep;
}

// Lateral coupling loss (dB) at which the capacity gap hits the target. The gap
// shrinks as coupling loss grows; solved by bisection.
inline double calibrate_lateral_coupling(const CapacityGapTarget& t, LayerStack s, LinkOptions opt = {},
                                         double lo_db = 0.0, double hi_db = 80.0)
{
    s.paint_thickness_m = t.paint_thickness_m;
    validate(s);
    auto excess = [&](double coupling_db) {
        opt.propagation.lateral_coupling_db = coupling_db;
        return capacity_gap(t, s, opt) - t.gap_bps;
    };
    if (excess(lo_db) < 0.0 || excess(hi_db) > 0.0)
        throw CalibrationError("capacity gap target not bracketed by the coupling-loss search interval");
    for (int i = 0; i < 60 && hi_db - lo_db > 1e-9; ++i) {
        const double mid = 0.5 * (lo_db + hi_db);
        (excess(mid) > 0.0 ? lo_db : hi_db) = mid;
    }
    return 0.5 * (lo_db + hi_db);
}

} // namespace iop
