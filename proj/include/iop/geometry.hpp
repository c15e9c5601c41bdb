// SPDX-License-Identifier: Apache-2.0
#pragma once

// Air / paint / plaster stack and the five ray constructions between two
// transceivers buried in the paint layer.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iop/core.hpp"
#include "iop/materials.hpp"

namespace iop {

struct LayerStack {
    double paint_thickness_m;
    MediumSpec air;
    MediumSpec paint;
    MediumSpec plaster;
};

inline void validate(const LayerStack& s)
{
    if (!(s.paint_thickness_m > 0.0))
        throw DomainError("paint thickness must be > 0");
    validate(s.air);
    validate(s.paint);
    validate(s.plaster);
    if (!(s.paint.refractive_index > s.air.refractive_index))
        throw DomainError("paint index must exceed air index for an air-paint lateral wave");
    if (!(s.paint.refractive_index > s.plaster.refractive_index))
        throw DomainError("paint index must exceed plaster index for a paint-plaster lateral wave");
}

inline LayerStack make_stack(const MaterialDb& db, double paint_thickness_m,
                             const std::string& paint = "titanium-white-paint",
                             const std::string& plaster = "plaster", const std::string& air = "air")
{
    LayerStack s{paint_thickness_m, db.at(air), db.at(paint), db.at(plaster)};
    validate(s);
    return s;
}

// Burial depths are measured down from the air-paint interface.
struct Placement {
    double h_t;
    double h_r;
    double rho_d; // horizontal separation
};

inline void validate(const Placement& p, const LayerStack& s)
{
    const double T = s.paint_thickness_m;
    if (!(p.h_t > 0.0 && p.h_t < T))
        throw DomainError("transmitter depth must lie strictly inside the paint layer");
    if (!(p.h_r > 0.0 && p.h_r < T))
        throw DomainError("receiver depth must lie strictly inside the paint layer");
    if (!(p.rho_d > 0.0))
        throw DomainError("horizontal separation must be > 0");
}

enum class PathKind { DW, RW_A, RW_P, LW_A, LW_P };

// Fixed evaluation and tie-break order.
inline constexpr std::array<PathKind, 5> kAllPathKinds{PathKind::DW, PathKind::RW_A, PathKind::RW_P,
                                                       PathKind::LW_A, PathKind::LW_P};

inline std::string_view to_string(PathKind k)
{
    switch (k) {
    case PathKind::DW: return "DW";
    case PathKind::RW_A: return "RW-A";
    case PathKind::RW_P: return "RW-P";
    case PathKind::LW_A: return "LW-A";
    case PathKind::LW_P: return "LW-P";
    }
    return "?";
}

enum class Interface { AirPaint, PaintPlaster };
enum class Layer { Air, Paint, Plaster };

struct Segment {
    Layer layer;
    double length_m;
};

struct PathGeometry {
    PathKind kind;
    std::vector<Segment> segments;
    double incidence_angle_rad = 0.0; // from the interface normal; 0 for DW

    double total_length() const
    {
        double sum = 0.0;
        for (const auto& s : segments)
            sum += s.length_m;
        return sum;
    }
};

inline const MediumSpec& medium_of(const LayerStack& s, Layer l)
{
    switch (l) {
    case Layer::Air: return s.air;
    case Layer::Paint: return s.paint;
    case Layer::Plaster: return s.plaster;
    }
    return s.paint;
}

inline double critical_angle(double n_dense, double n_rare)
{
    if (!(n_rare > 0.0) || !(n_dense > n_rare))
        throw DomainError("no critical angle: the incident medium must be optically denser");
    return std::asin(n_rare / n_dense);
}

inline PathGeometry direct_path(const Placement& p)
{
    const double dz = p.h_t - p.h_r;
    return {PathKind::DW, {{Layer::Paint, std::hypot(p.rho_d, dz)}}, 0.0};
}

namespace detail {

struct InterfaceDepths {
    double t;
    double r;
};

inline InterfaceDepths depths_to(Interface i, const Placement& p, const LayerStack& s)
{
    if (i == Interface::AirPaint)
        return {p.h_t, p.h_r};
    return {s.paint_thickness_m - p.h_t, s.paint_thickness_m - p.h_r};
}

inline const MediumSpec& second_medium(Interface i, const LayerStack& s)
{
    return i == Interface::AirPaint ? s.air : s.plaster;
}

} // namespace detail

// First-order mirror-image reflection off one interface.
inline PathGeometry reflected_path(const Placement& p, const LayerStack& s, Interface i)
{
    const auto d = detail::depths_to(i, p, s);
    const double depth_sum = d.t + d.r;
    const double length = std::hypot(p.rho_d, depth_sum);
    return {i == Interface::AirPaint ? PathKind::RW_A : PathKind::RW_P,
            {{Layer::Paint, length * d.t / depth_sum}, {Layer::Paint, length * d.r / depth_sum}},
            std::atan(p.rho_d / depth_sum)};
}

// Critical-angle slant up to the interface, a run along the interface in the
// rarer medium, and a critical-angle slant back down. Slants use each
// transceiver's own distance to the interface.
inline std::optional<PathGeometry> try_lateral_path(const Placement& p, const LayerStack& s, Interface i)
{
    const auto& second = detail::second_medium(i, s);
    const double theta_c = critical_angle(s.paint.refractive_index, second.refractive_index);
    const auto d = detail::depths_to(i, p, s);
    const double rho_l = p.rho_d - (d.t + d.r) * std::tan(theta_c);
    if (!(rho_l > 0.0))
        return std::nullopt;
    const double cos_c = std::cos(theta_c);
    return PathGeometry{i == Interface::AirPaint ? PathKind::LW_A : PathKind::LW_P,
                        {{Layer::Paint, d.t / cos_c},
                         {i == Interface::AirPaint ? Layer::Air : Layer::Plaster, rho_l},
                         {Layer::Paint, d.r / cos_c}},
                        theta_c};
}

inline PathGeometry lateral_path(const Placement& p, const LayerStack& s, Interface i)
{
    auto g = try_lateral_path(p, s, i);
    if (!g)
        throw InfeasiblePathError(std::string(i == Interface::AirPaint ? "LW-A" : "LW-P") +
                                  ": separation too short for a critical-angle lateral path");
    return *std::move(g);
}

// nullopt only for infeasible lateral paths.
inline std::optional<PathGeometry> try_path(PathKind k, const Placement& p, const LayerStack& s)
{
    switch (k) {
    case PathKind::DW: return direct_path(p);
    case PathKind::RW_A: return reflected_path(p, s, Interface::AirPaint);
    case PathKind::RW_P: return reflected_path(p, s, Interface::PaintPlaster);
    case PathKind::LW_A: return try_lateral_path(p, s, Interface::AirPaint);
    case PathKind::LW_P: return try_lateral_path(p, s, Interface::PaintPlaster);
    }
    return std::nullopt;
}

} // namespace iop
