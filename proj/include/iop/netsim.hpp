// SPDX-License-Identifier: Apache-2.0
#pragma once

// Monte Carlo dense-network layer: random device populations inside the paint
// slab, pairwise link evaluation and connectivity statistics.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "iop/capacity.hpp"
#include "iop/core.hpp"
#include "iop/geometry.hpp"

namespace iop {

struct Vec3 {
    double x, y, z;

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }

    friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct Isotropic {};

// Boresight gain with a Gaussian roll-off that reaches -20 dB (relative) at the
// cone edge, half of `beamwidth_rad` off boresight; -20 dB sidelobe floor beyond.
struct Cone {
    double beamwidth_rad;
    double boresight_gain_dbi;
};

using OrientationModel = std::variant<Isotropic, Cone>;

inline double antenna_gain_db(const OrientationModel& m, const Vec3& boresight, const Vec3& toward)
{
    const auto* cone = std::get_if<Cone>(&m);
    if (!cone)
        return 0.0;
    const double cos_psi = std::clamp(boresight.dot(toward) / (boresight.norm() * toward.norm()), -1.0, 1.0);
    const double psi = std::acos(cos_psi);
    const double edge = 0.5 * cone->beamwidth_rad;
    const double u = std::min(psi / edge, 1.0);
    return cone->boresight_gain_dbi - 20.0 * u * u;
}

struct SnrThreshold {
    double db;
};
struct MinCapacity {
    double bps;
};
using LinkRule = std::variant<SnrThreshold, MinCapacity>;

struct NetworkConfig {
    double wall_width_m = 0.05;
    double wall_height_m = 0.05;
    double density_per_m2 = 2.0e4;
    LayerStack stack;
    OrientationModel orientation = Isotropic{};
    LinkRule link_rule = SnrThreshold{0.0};
    std::size_t trials = 100;
    std::uint64_t seed = 1;

    Band band{};
    LinkOptions link = [] {
        LinkOptions o;
        o.n_subbands = 16;
        return o;
    }();
    double max_range_m = 0.10;
    unsigned threads = 1; // 0: hardware concurrency
};

inline void validate(const NetworkConfig& c)
{
    validate(c.stack);
    if (!(c.wall_width_m > 0.0 && c.wall_height_m > 0.0))
        throw ConfigError("wall dimensions must be > 0");
    if (!(c.density_per_m2 >= 0.0))
        throw ConfigError("density must be >= 0");
    if (c.trials < 1)
        throw ConfigError("need at least one trial");
    if (!(c.max_range_m > 0.0))
        throw ConfigError("max range must be > 0");
    if (const auto* cone = std::get_if<Cone>(&c.orientation))
        if (!(cone->beamwidth_rad > 0.0 && cone->beamwidth_rad <= phys::pi))
            throw ConfigError("cone beamwidth must lie in (0, pi]");
}

inline NetworkConfig default_network_config(const MaterialDb& db = preset_materials())
{
    NetworkConfig c;
    c.stack = make_stack(db, 2e-3);
    return c;
}

struct Device {
    double x, y;  // wall plane
    double depth; // below the air-paint interface
    Vec3 orientation;

    friend bool operator==(const Device&, const Device&) = default;
};

struct NetworkRealization {
    std::vector<Device> devices;
};

namespace detail {

inline std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    return std::mt19937_64(seq);
}

inline Vec3 random_unit_vector(std::mt19937_64& rng)
{
    std::normal_distribution<double> n01;
    for (;;) {
        Vec3 v{n01(rng), n01(rng), n01(rng)};
        const double r = v.norm();
        if (r > 1e-12)
            return {v.x / r, v.y / r, v.z / r};
    }
}

} // namespace detail

// Fully determined by (cfg.seed, trial_index).
inline NetworkRealization sample_network(const NetworkConfig& cfg, std::uint64_t trial_index)
{
    auto rng = detail::trial_engine(cfg.seed, trial_index);
    const double mean = cfg.density_per_m2 * cfg.wall_width_m * cfg.wall_height_m;
    NetworkRealization r;
    if (mean <= 0.0)
        return r;
    const auto count = std::poisson_distribution<long long>(mean)(rng);
    std::uniform_real_distribution<double> ux(0.0, cfg.wall_width_m), uy(0.0, cfg.wall_height_m),
        ud(0.0, cfg.stack.paint_thickness_m);
    r.devices.reserve(static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i) {
        Device d{};
        d.x = ux(rng);
        d.y = uy(rng);
        do {
            d.depth = ud(rng);
        } while (d.depth <= 0.0);
        d.orientation = detail::random_unit_vector(rng);
        r.devices.push_back(d);
    }
    return r;
}

struct PairLink {
    double snr_db;
    double capacity_bps;
};

inline double planar_distance(const Device& a, const Device& b) { return std::hypot(b.x - a.x, b.y - a.y); }

// Reciprocal: the pair is put in a canonical order before evaluation.
inline PairLink pair_link(const Device& a, const Device& b, const NetworkConfig& cfg)
{
    auto key = [](const Device& d) { return std::array{d.depth, d.x, d.y}; };
    const Device& t = key(a) <= key(b) ? a : b;
    const Device& r = &t == &a ? b : a;

    const double rho = planar_distance(t, r);
    if (!(rho > 0.0))
        throw DomainError("degenerate pair: coincident wall-plane positions");
    const Vec3 t_to_r{r.x - t.x, r.y - t.y, r.depth - t.depth};
    const Vec3 r_to_t{-t_to_r.x, -t_to_r.y, -t_to_r.z};

    LinkOptions opt = cfg.link;
    opt.antenna_gain_db += antenna_gain_db(cfg.orientation, t.orientation, t_to_r) +
                           antenna_gain_db(cfg.orientation, r.orientation, r_to_t);
    const auto lb = link_capacity({t.depth, r.depth, rho}, cfg.stack, cfg.band, opt);
    return {lb.band_snr_db(), lb.total_capacity_bps};
}

inline bool link_admissible(const PairLink& l, const LinkRule& rule)
{
    if (const auto* s = std::get_if<SnrThreshold>(&rule))
        return l.snr_db >= s->db;
    return l.capacity_bps >= std::get<MinCapacity>(rule).bps;
}

using Edge = std::pair<std::size_t, std::size_t>; // i < j

// Edges within max range that satisfy the link rule, sorted. Candidate pairs
// come from a uniform grid with cell size max_range.
inline std::vector<Edge> build_edges(const NetworkRealization& net, const NetworkConfig& cfg)
{
    const auto& dev = net.devices;
    const double cell = cfg.max_range_m;
    std::map<std::pair<long, long>, std::vector<std::size_t>> grid;
    auto cell_of = [&](const Device& d) {
        return std::pair<long, long>{static_cast<long>(std::floor(d.x / cell)),
                                     static_cast<long>(std::floor(d.y / cell))};
    };
    for (std::size_t i = 0; i < dev.size(); ++i)
        grid[cell_of(dev[i])].push_back(i);

    std::vector<Edge> edges;
    for (std::size_t i = 0; i < dev.size(); ++i) {
        const auto [cx, cy] = cell_of(dev[i]);
        for (long gx = cx - 1; gx <= cx + 1; ++gx) {
            for (long gy = cy - 1; gy <= cy + 1; ++gy) {
                auto it = grid.find({gx, gy});
                if (it == grid.end())
                    continue;
                for (std::size_t j : it->second) {
                    if (j <= i || planar_distance(dev[i], dev[j]) > cfg.max_range_m)
                        continue;
                    if (link_admissible(pair_link(dev[i], dev[j], cfg), cfg.link_rule))
                        edges.emplace_back(i, j);
                }
            }
        }
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        if (size_[a] < size_[b])
            std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }

    std::size_t component_size(std::size_t x) { return size_[find(x)]; }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

struct TrialStats {
    std::size_t n_devices = 0;
    std::size_t n_edges = 0;
    double mean_degree = 0.0;
    double largest_component_fraction = 0.0;
    double isolated_fraction = 0.0;

    friend bool operator==(const TrialStats&, const TrialStats&) = default;
};

inline TrialStats graph_stats(std::size_t n, const std::vector<Edge>& edges)
{
    TrialStats s;
    s.n_devices = n;
    s.n_edges = edges.size();
    if (n == 0)
        return s;
    UnionFind uf(n);
    std::vector<std::size_t> degree(n, 0);
    for (auto [i, j] : edges) {
        uf.unite(i, j);
        ++degree[i];
        ++degree[j];
    }
    std::size_t largest = 0, isolated = 0;
    for (std::size_t i = 0; i < n; ++i) {
        largest = std::max(largest, uf.component_size(i));
        isolated += degree[i] == 0;
    }
    const double nd = static_cast<double>(n);
    s.mean_degree = 2.0 * static_cast<double>(edges.size()) / nd;
    s.largest_component_fraction = static_cast<double>(largest) / nd;
    s.isolated_fraction = static_cast<double>(isolated) / nd;
    return s;
}

struct Summary {
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation

    friend bool operator==(const Summary&, const Summary&) = default;
};

struct ConnectivityReport {
    std::vector<TrialStats> per_trial;
    Summary mean_degree;
    Summary largest_component_fraction;
    Summary isolated_fraction;

    friend bool operator==(const ConnectivityReport&, const ConnectivityReport&) = default;
};

namespace detail {

template <class Get>
Summary summarize(const std::vector<TrialStats>& trials, Get get)
{
    Summary s;
    const double n = static_cast<double>(trials.size());
    for (const auto& t : trials)
        s.mean += get(t);
    s.mean /= n;
    if (trials.size() > 1) {
        double ss = 0.0;
        for (const auto& t : trials)
            ss += (get(t) - s.mean) * (get(t) - s.mean);
        s.stddev = std::sqrt(ss / (n - 1.0));
    }
    return s;
}

} // namespace detail

inline TrialStats run_trial(const NetworkConfig& cfg, std::uint64_t trial)
{
    const auto net = sample_network(cfg, trial);
    return graph_stats(net.devices.size(), build_edges(net, cfg));
}

// Trials run on `cfg.threads` workers; each trial owns its random stream and
// results are reduced in trial order, so the report does not depend on threading.
inline ConnectivityReport connectivity(const NetworkConfig& cfg)
{
    validate(cfg);
    ConnectivityReport rep;
    rep.per_trial.resize(cfg.trials);

    unsigned workers = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, cfg.trials));
    if (workers <= 1) {
        for (std::size_t t = 0; t < cfg.trials; ++t)
            rep.per_trial[t] = run_trial(cfg, t);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back([&, w] {
                    try {
                        for (std::size_t t = w; t < cfg.trials; t += workers)
                            rep.per_trial[t] = run_trial(cfg, t);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
        }
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    rep.mean_degree = detail::summarize(rep.per_trial, [](const TrialStats& t) { return t.mean_degree; });
    rep.largest_component_fraction =
        detail::summarize(rep.per_trial, [](const TrialStats& t) { return t.largest_component_fraction; });
    rep.isolated_fraction = detail::summarize(rep.per_trial, [](const TrialStats& t) { return t.isolated_fraction; });
    return rep;
}

struct CutoffCheck {
    double best_case_db;  // SNR (dB) or 10*log10(capacity) at the cutoff
    double limit_db;      // must stay below this
    bool ok;
};

// Best case at the cutoff: both ends just below the air-paint interface, both
// antennas at boresight. Requires a 10 dB margin below the link rule.
inline CutoffCheck verify_cutoff(const NetworkConfig& cfg)
{
    validate(cfg);
    const double h = 1e-3 * cfg.stack.paint_thickness_m;
    LinkOptions opt = cfg.link;
    if (const auto* cone = std::get_if<Cone>(&cfg.orientation))
        opt.antenna_gain_db += 2.0 * cone->boresight_gain_dbi;
    if (const auto* s = std::get_if<SnrThreshold>(&cfg.link_rule)) {
        const auto lb = link_capacity({h, h, cfg.max_range_m}, cfg.stack, cfg.band, opt);
        const double snr = lb.band_snr_db();
        return {snr, s->db - 10.0, snr < s->db - 10.0};
    }
    opt.tx_psd_w_per_hz *= 10.0;
    const double c = link_capacity({h, h, cfg.max_range_m}, cfg.stack, cfg.band, opt).total_capacity_bps;
    const double limit = std::get<MinCapacity>(cfg.link_rule).bps;
    return {10.0 * std::log10(c), 10.0 * std::log10(limit), c < limit};
}

} // namespace iop
