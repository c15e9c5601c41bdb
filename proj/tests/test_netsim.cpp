// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "iop/netsim.hpp"

using Catch::Approx;
using namespace iop;

namespace {

NetworkConfig small_cfg()
{
    auto c = default_network_config();
    c.wall_width_m = 0.03;
    c.wall_height_m = 0.03;
    c.density_per_m2 = 3e4; // ~27 devices
    c.trials = 10;
    c.link.n_subbands = 8;
    c.max_range_m = 0.03;
    return c;
}

std::vector<Edge> brute_force_edges(const NetworkRealization& net, const NetworkConfig& cfg)
{
    std::vector<Edge> out;
    const auto& d = net.devices;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j) {
            const double rho = std::sqrt((d[i].x - d[j].x) * (d[i].x - d[j].x) + (d[i].y - d[j].y) * (d[i].y - d[j].y));
            if (rho <= cfg.max_range_m && link_admissible(pair_link(d[i], d[j], cfg), cfg.link_rule))
                out.emplace_back(i, j);
        }
    return out;
}

} // namespace

TEST_CASE("sampling")
{
    auto c = small_cfg();
    SECTION("zero density")
    {
        c.density_per_m2 = 0.0;
        CHECK(sample_network(c, 0).devices.empty());
    }
    SECTION("determinism and trial independence")
    {
        const auto a = sample_network(c, 3), b = sample_network(c, 3), d = sample_network(c, 4);
        CHECK(a.devices == b.devices);
        CHECK(a.devices != d.devices);
        c.seed = 2;
        CHECK(sample_network(c, 3).devices != a.devices);
    }
    SECTION("devices lie inside the wall and the paint")
    {
        for (std::uint64_t t = 0; t < 20; ++t)
            for (const auto& d : sample_network(c, t).devices) {
                CHECK(d.x >= 0.0);
                CHECK(d.x <= c.wall_width_m);
                CHECK(d.y >= 0.0);
                CHECK(d.y <= c.wall_height_m);
                CHECK(d.depth > 0.0);
                CHECK(d.depth < c.stack.paint_thickness_m);
                CHECK(d.orientation.norm() == Approx(1.0).epsilon(1e-12));
            }
    }
    SECTION("Poisson mean over 1000 trials")
    {
        const double mean = c.density_per_m2 * c.wall_width_m * c.wall_height_m;
        double sum = 0.0;
        for (std::uint64_t t = 0; t < 1000; ++t)
            sum += static_cast<double>(sample_network(c, t).devices.size());
        CHECK(std::abs(sum / 1000.0 - mean) / mean < 0.05);
    }
    SECTION("orientations cover the sphere evenly")
    {
        c.density_per_m2 = 1e7;
        const auto net = sample_network(c, 0);
        double mz = 0.0, mz2 = 0.0;
        for (const auto& d : net.devices) {
            mz += d.orientation.z;
            mz2 += d.orientation.z * d.orientation.z;
        }
        const double n = static_cast<double>(net.devices.size());
        // uniform on the sphere: E[z] = 0, E[z^2] = 1/3, Var[z^2] = 4/45; 4 standard errors
        CHECK(std::abs(mz / n) < 4.0 * std::sqrt(1.0 / 3.0 / n));
        CHECK(std::abs(mz2 / n - 1.0 / 3.0) < 4.0 * std::sqrt(4.0 / 45.0 / n));
    }
}

TEST_CASE("antenna gain")
{
    const Vec3 up{0, 0, 1};
    CHECK(antenna_gain_db(Isotropic{}, up, {1, 0, 0}) == 0.0);
    const Cone cone{1.0, 8.0};
    CHECK(antenna_gain_db(cone, up, {0, 0, 3}) == 8.0);
    CHECK(antenna_gain_db(cone, up, {std::sin(0.5), 0, std::cos(0.5)}) == Approx(-12.0).epsilon(1e-9));
    CHECK(antenna_gain_db(cone, up, {0, 0, -1}) == -12.0);
    CHECK(antenna_gain_db(cone, up, {std::sin(0.25), 0, std::cos(0.25)}) == Approx(8.0 - 5.0).epsilon(1e-9));
}

TEST_CASE("pair link")
{
    auto c = small_cfg();
    const Device a{0.001, 0.002, 0.3e-3, {0, 0, 1}}, b{0.011, 0.002, 0.9e-3, {1, 0, 0}};

    SECTION("isotropic equals the bare link")
    {
        const auto l = pair_link(a, b, c);
        const auto lb = link_capacity({a.depth, b.depth, 0.01}, c.stack, c.band, c.link);
        CHECK(l.capacity_bps == Approx(lb.total_capacity_bps).epsilon(1e-12));
        CHECK(l.snr_db == Approx(lb.band_snr_db()).epsilon(1e-12));
    }
    SECTION("reciprocity")
    {
        c.orientation = Cone{1.2, 6.0};
        const auto ab = pair_link(a, b, c), ba = pair_link(b, a, c);
        CHECK(ab.capacity_bps == ba.capacity_bps);
        CHECK(ab.snr_db == ba.snr_db);
    }
    SECTION("aligned cones add both boresight gains")
    {
        c.orientation = Cone{0.8, 5.0};
        const Vec3 los{b.x - a.x, b.y - a.y, b.depth - a.depth};
        const Device ta{a.x, a.y, a.depth, los}, tb{b.x, b.y, b.depth, {-los.x, -los.y, -los.z}};
        auto o = c.link;
        o.antenna_gain_db = 10.0;
        const auto lb = link_capacity({a.depth, b.depth, 0.01}, c.stack, c.band, o);
        CHECK(pair_link(ta, tb, c).capacity_bps == Approx(lb.total_capacity_bps).epsilon(1e-12));
    }
    SECTION("coincident positions")
    {
        const Device d{a.x, a.y, 1.1e-3, {0, 1, 0}};
        CHECK_THROWS_AS(pair_link(a, d, c), DomainError);
    }
}

TEST_CASE("union-find statistics")
{
    const auto s = graph_stats(5, {{0, 1}, {1, 2}, {3, 4}});
    CHECK(s.n_devices == 5);
    CHECK(s.n_edges == 3);
    CHECK(s.mean_degree == Approx(6.0 / 5.0));
    CHECK(s.largest_component_fraction == Approx(0.6));
    CHECK(s.isolated_fraction == 0.0);

    const auto lone = graph_stats(4, {});
    CHECK(lone.largest_component_fraction == 0.25);
    CHECK(lone.isolated_fraction == 1.0);

    const auto empty = graph_stats(0, {});
    CHECK(empty.n_devices == 0);
}

TEST_CASE("edges match an all-pairs brute force")
{
    auto c = small_cfg();
    c.max_range_m = 0.012; // grid cells smaller than the wall
    for (double thr : {-10.0, 0.0, 10.0}) {
        c.link_rule = SnrThreshold{thr};
        for (std::uint64_t t = 0; t < 10; ++t) {
            const auto net = sample_network(c, t);
            REQUIRE(net.devices.size() <= 50);
            const auto edges = build_edges(net, c);
            CHECK(edges == brute_force_edges(net, c));
            for (auto [i, j] : edges)
                CHECK(i < j);
        }
    }
    c.link_rule = MinCapacity{5e9};
    const auto net = sample_network(c, 0);
    CHECK(build_edges(net, c) == brute_force_edges(net, c));
}

TEST_CASE("connectivity edge cases")
{
    auto c = small_cfg();
    c.trials = 3;
    SECTION("unreachable threshold isolates everyone")
    {
        c.link_rule = SnrThreshold{HUGE_VAL};
        const auto rep = connectivity(c);
        for (const auto& t : rep.per_trial) {
            CHECK(t.n_edges == 0);
            if (t.n_devices > 0)
                CHECK(t.isolated_fraction == 1.0);
        }
    }
    SECTION("two adjacent devices form one component")
    {
        NetworkRealization net{{{0.01, 0.01, 0.1e-3, {0, 0, 1}}, {0.012, 0.01, 0.1e-3, {0, 0, 1}}}};
        c.link_rule = SnrThreshold{-1e9};
        const auto s = graph_stats(2, build_edges(net, c));
        CHECK(s.largest_component_fraction == 1.0);
    }
    SECTION("fractions stay in range")
    {
        const auto rep = connectivity(c);
        for (const auto& t : rep.per_trial) {
            CHECK(t.largest_component_fraction >= 0.0);
            CHECK(t.largest_component_fraction <= 1.0);
            if (t.n_devices > 0)
                CHECK(t.largest_component_fraction >= 1.0 / static_cast<double>(t.n_devices));
            CHECK(t.isolated_fraction >= 0.0);
            CHECK(t.isolated_fraction <= 1.0);
        }
    }
}

TEST_CASE("reports are identical across thread counts")
{
    auto c = small_cfg();
    c.trials = 6;
    c.orientation = Cone{1.5, 4.0};
    c.threads = 1;
    const auto serial = connectivity(c);
    c.threads = 3;
    CHECK(connectivity(c) == serial);
    CHECK(connectivity(c) == serial);
}

TEST_CASE("cutoff check")
{
    auto c = default_network_config();
    const auto ok = verify_cutoff(c);
    CHECK(ok.ok);
    CHECK(ok.best_case_db < ok.limit_db);
    c.max_range_m = 0.005;
    CHECK_FALSE(verify_cutoff(c).ok);
    c.max_range_m = 0.2;
    c.link_rule = MinCapacity{1e6};
    CHECK_FALSE(verify_cutoff(c).ok); // still about 1 Gbit/s at 20 cm
    c.link_rule = MinCapacity{10e9};
    CHECK(verify_cutoff(c).ok);
}

TEST_CASE("config validation")
{
    auto c = default_network_config();
    c.trials = 0;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = default_network_config();
    c.density_per_m2 = -1.0;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = default_network_config();
    c.orientation = Cone{4.0, 3.0};
    CHECK_THROWS_AS(validate(c), ConfigError);
}
